#include "boundselect/ci.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "boundselect/error.hpp"

namespace boundselect {

const char* ci_kind_name(CiKind kind) {
  switch (kind) {
    case CiKind::Conventional: return "conventional";
    case CiKind::Conditional: return "conditional";
    case CiKind::Projection: return "projection";
    case CiKind::Hybrid: return "hybrid";
  }
  return "unknown";
}

CiKind parse_ci_kind(const std::string& name) {
  if (name == "conventional" || name == "conv") return CiKind::Conventional;
  if (name == "conditional" || name == "cond") return CiKind::Conditional;
  if (name == "projection" || name == "proj") return CiKind::Projection;
  if (name == "hybrid" || name == "hyb") return CiKind::Hybrid;
  throw Error(ErrorCode::ConfigInvalid, "unknown interval kind '" + name + "'");
}

void CiOptions::validate() const {
  auto level_ok = [](double a) { return a > 0.0 && a < 0.5; };
  if (!level_ok(alpha1) || !level_ok(alpha2)) {
    throw Error(ErrorCode::ConfigInvalid, "alpha1 and alpha2 must lie in (0, 0.5)");
  }
  if (!(beta_frac > 0.0 && beta_frac < 0.5)) {
    throw Error(ErrorCode::ConfigInvalid, "beta_frac must lie in (0, 0.5) so that beta < alpha");
  }
  if (draws < 100) throw Error(ErrorCode::ConfigInvalid, "draws must be >= 100");
}

Mat stacked_covariance(const BoundsSpec& spec, const Mat& sigma, Side side) {
  const auto& family = side == Side::Lower ? spec.lower : spec.upper;
  const int J = side == Side::Lower ? spec.num_lower() : spec.num_upper();
  Mat rows(spec.num_options * J, spec.dim_p);
  for (int d = 0; d < spec.num_options; ++d) {
    for (int j = 0; j < J; ++j) rows.row(d * J + j) = family[d][j].coef.transpose();
  }
  return rows * sigma * rows.transpose();
}

std::shared_ptr<const MaxStatDistribution> max_stat_distribution(const Mat& cov, int draws,
                                                                 std::uint64_t seed) {
  using Key = std::tuple<int, std::uint64_t, Eigen::Index, std::vector<double>>;
  static std::shared_mutex mu;
  static std::map<Key, std::shared_ptr<const MaxStatDistribution>> cache;
  static std::deque<Key> order;
  constexpr std::size_t kMaxEntries = 64;

  Key key{draws, seed, cov.rows(), std::vector<double>(cov.data(), cov.data() + cov.size())};
  {
    std::shared_lock lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto dist = std::make_shared<const MaxStatDistribution>(cov, draws, seed);
  std::unique_lock lock(mu);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  if (cache.size() >= kMaxEntries) {
    cache.erase(order.front());
    order.pop_front();
  }
  order.push_back(key);
  cache.emplace(std::move(key), dist);
  return dist;
}

namespace {

struct SideData {
  const Piece* piece = nullptr;
  double estimate = 0.0;
  DirectionData dd;
  bool degenerate = false;
};

SideData side_data(const BoundsSpec& spec, const ReducedForm& rf, const SelectionOutcome& sel,
                   Side side) {
  if (sel.d_hat < 0 || sel.d_hat >= spec.num_options) {
    throw Error(ErrorCode::DimensionMismatch, "selected option out of range for spec");
  }
  SideData out;
  out.piece = side == Side::Lower ? &spec.lower[sel.d_hat][sel.j_L]
                                  : &spec.upper[sel.d_hat][sel.j_U];
  out.estimate = out.piece->offset + out.piece->coef.dot(rf.p_hat);
  const double var = out.piece->coef.dot(rf.sigma_hat * out.piece->coef);
  const double floor = 1e-14 * std::max(1.0, rf.sigma_hat.trace()) *
                       std::max(1.0, out.piece->coef.squaredNorm());
  if (var <= floor) {
    out.degenerate = true;
    return out;
  }
  out.dd = direction(out.piece->coef, out.piece->offset, rf);
  return out;
}

ConditioningWindow realized_window(const Polyhedron& poly, const DirectionData& dd, long n,
                                   const char* side) {
  ConditioningWindow w = truncation_bounds(poly, dd, n);
  const double tol = 1e-8 * (1.0 + std::abs(dd.s_obs));
  if (!w.contains(dd.s_obs, tol)) {
    throw Error(ErrorCode::EventViolated,
                std::string(side) + " statistic " + std::to_string(dd.s_obs) +
                    " lies outside its truncation window [" + std::to_string(w.v_minus) + ", " +
                    std::to_string(w.v_plus) + "] (v0=" + std::to_string(w.v_zero) + ")");
  }
  // Rounding can leave s_obs a hair outside; treat it as on the edge.
  w.v_minus = std::min(w.v_minus, dd.s_obs);
  w.v_plus = std::max(w.v_plus, dd.s_obs);
  return w;
}

double critical_value(const BoundsSpec& spec, const ReducedForm& rf, Side side, double level,
                      const CiOptions& opts) {
  const Mat full = stacked_covariance(spec, rf.sigma_hat, side);
  std::vector<Eigen::Index> keep;
  const double floor = 1e-14 * std::max(1.0, full.diagonal().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < full.rows(); ++i) {
    if (full(i, i) > floor) keep.push_back(i);
  }
  if (keep.empty()) return 0.0;
  Mat cov(keep.size(), keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = 0; b < keep.size(); ++b) cov(a, b) = full(keep[a], keep[b]);
  }
  return max_stat_distribution(cov, opts.draws, opts.seed)->quantile(level);
}

ConfidenceInterval make(CiKind kind, const CiOptions& opts) {
  opts.validate();
  ConfidenceInterval ci;
  ci.kind = kind;
  ci.alpha1 = opts.alpha1;
  ci.alpha2 = opts.alpha2;
  return ci;
}

void fill_diag(SideDiagnostics& diag, const SideData& sd) {
  diag.estimate = sd.estimate;
  diag.s_obs = sd.dd.s_obs;
  diag.var_s = sd.dd.var_s;
}

}  // namespace

ConfidenceInterval conventional_ci(const BoundsSpec& spec, const ReducedForm& rf,
                                   const SelectionOutcome& sel, const CiOptions& opts) {
  ConfidenceInterval ci = make(CiKind::Conventional, opts);
  const SideData lo = side_data(spec, rf, sel, Side::Lower);
  const SideData up = side_data(spec, rf, sel, Side::Upper);
  fill_diag(ci.diag_L, lo);
  fill_diag(ci.diag_U, up);
  const double rn = rf.sqrt_n();
  ci.diag_L.critical = norm_quantile(1.0 - opts.alpha1);
  ci.diag_U.critical = norm_quantile(1.0 - opts.alpha2);
  ci.lower = lo.estimate - ci.diag_L.critical * std::sqrt(lo.dd.var_s) / rn;
  ci.upper = up.estimate + ci.diag_U.critical * std::sqrt(up.dd.var_s) / rn;
  return ci;
}

ConfidenceInterval conditional_ci(const BoundsSpec& spec, const ReducedForm& rf,
                                  const SelectionOutcome& sel, const CiOptions& opts) {
  ConfidenceInterval ci = make(CiKind::Conditional, opts);
  const SideData lo = side_data(spec, rf, sel, Side::Lower);
  const SideData up = side_data(spec, rf, sel, Side::Upper);
  fill_diag(ci.diag_L, lo);
  fill_diag(ci.diag_U, up);
  const double rn = rf.sqrt_n();

  if (lo.degenerate) {
    ci.lower = lo.estimate;
  } else {
    ci.diag_L.window = realized_window(sel.poly_L, lo.dd, rf.n, "lower");
    ci.diag_L.target = 1.0 - opts.alpha1;
    const SolveResult r = solve_location(lo.dd.s_obs, ci.diag_L.target, lo.dd.var_s,
                                         ci.diag_L.window.v_minus, ci.diag_L.window.v_plus,
                                         opts.solver);
    ci.lower = r.mu / rn;
    ci.diag_L.iterations = r.iterations;
    ci.diag_L.at_limit = r.at_limit;
  }
  if (up.degenerate) {
    ci.upper = up.estimate;
  } else {
    ci.diag_U.window = realized_window(sel.poly_U, up.dd, rf.n, "upper");
    ci.diag_U.target = opts.alpha2;
    const SolveResult r = solve_location(up.dd.s_obs, ci.diag_U.target, up.dd.var_s,
                                         ci.diag_U.window.v_minus, ci.diag_U.window.v_plus,
                                         opts.solver);
    ci.upper = r.mu / rn;
    ci.diag_U.iterations = r.iterations;
    ci.diag_U.at_limit = r.at_limit;
  }
  return ci;
}

ConfidenceInterval projection_ci(const BoundsSpec& spec, const ReducedForm& rf,
                                 const SelectionOutcome& sel, const CiOptions& opts) {
  ConfidenceInterval ci = make(CiKind::Projection, opts);
  const SideData lo = side_data(spec, rf, sel, Side::Lower);
  const SideData up = side_data(spec, rf, sel, Side::Upper);
  fill_diag(ci.diag_L, lo);
  fill_diag(ci.diag_U, up);
  ci.draws = opts.draws;
  ci.seed = opts.seed;
  const double rn = rf.sqrt_n();
  ci.diag_L.critical = critical_value(spec, rf, Side::Lower, 1.0 - opts.alpha1, opts);
  ci.diag_U.critical = critical_value(spec, rf, Side::Upper, 1.0 - opts.alpha2, opts);
  ci.lower = lo.estimate - std::sqrt(lo.dd.var_s) * ci.diag_L.critical / rn;
  ci.upper = up.estimate + std::sqrt(up.dd.var_s) * ci.diag_U.critical / rn;
  return ci;
}

ConfidenceInterval hybrid_ci(const BoundsSpec& spec, const ReducedForm& rf,
                             const SelectionOutcome& sel, const CiOptions& opts) {
  ConfidenceInterval ci = make(CiKind::Hybrid, opts);
  const SideData lo = side_data(spec, rf, sel, Side::Lower);
  const SideData up = side_data(spec, rf, sel, Side::Upper);
  fill_diag(ci.diag_L, lo);
  fill_diag(ci.diag_U, up);
  ci.draws = opts.draws;
  ci.seed = opts.seed;
  ci.beta_L = opts.beta_lower();
  ci.beta_U = opts.beta_upper();
  const double rn = rf.sqrt_n();

  if (lo.degenerate) {
    ci.lower = lo.estimate;
  } else {
    ci.diag_L.critical = critical_value(spec, rf, Side::Lower, 1.0 - ci.beta_L, opts);
    ci.diag_L.window = realized_window(sel.poly_L, lo.dd, rf.n, "lower");
    ci.diag_L.target = (1.0 - opts.alpha1) / (1.0 - ci.beta_L);
    const double offset = ci.diag_L.critical * std::sqrt(lo.dd.var_s);
    const SolveResult r = solve_location_hybrid(
        lo.dd.s_obs, ci.diag_L.target, lo.dd.var_s, ci.diag_L.window.v_minus,
        ci.diag_L.window.v_plus, offset, Side::Lower, opts.solver);
    ci.lower = r.mu / rn;
    ci.diag_L.iterations = r.iterations;
    ci.diag_L.at_limit = r.at_limit;
    const double bound = (lo.dd.s_obs - offset) / rn;
    if (ci.lower < bound - 1e-12 * (1.0 + std::abs(bound))) ci.projection_contained = false;
  }
  if (up.degenerate) {
    ci.upper = up.estimate;
  } else {
    ci.diag_U.critical = critical_value(spec, rf, Side::Upper, 1.0 - ci.beta_U, opts);
    ci.diag_U.window = realized_window(sel.poly_U, up.dd, rf.n, "upper");
    ci.diag_U.target = (opts.alpha2 - ci.beta_U) / (1.0 - ci.beta_U);
    const double offset = ci.diag_U.critical * std::sqrt(up.dd.var_s);
    const SolveResult r = solve_location_hybrid(
        up.dd.s_obs, ci.diag_U.target, up.dd.var_s, ci.diag_U.window.v_minus,
        ci.diag_U.window.v_plus, offset, Side::Upper, opts.solver);
    ci.upper = r.mu / rn;
    ci.diag_U.iterations = r.iterations;
    ci.diag_U.at_limit = r.at_limit;
    const double bound = (up.dd.s_obs + offset) / rn;
    if (ci.upper > bound + 1e-12 * (1.0 + std::abs(bound))) ci.projection_contained = false;
  }
  return ci;
}

ConfidenceInterval compute_ci(CiKind kind, const BoundsSpec& spec, const ReducedForm& rf,
                              const SelectionOutcome& sel, const CiOptions& opts) {
  switch (kind) {
    case CiKind::Conventional: return conventional_ci(spec, rf, sel, opts);
    case CiKind::Conditional: return conditional_ci(spec, rf, sel, opts);
    case CiKind::Projection: return projection_ci(spec, rf, sel, opts);
    case CiKind::Hybrid: return hybrid_ci(spec, rf, sel, opts);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown interval kind");
}

}  // namespace boundselect
