#include "boundselect/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include <boost/math/special_functions/erf.hpp>

#include "boundselect/error.hpp"
#include "boundselect/rng.hpp"

namespace boundselect {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;
constexpr double kSqrt2 = 1.41421356237309504880;

// Upper tail Q(x) = 1 - Phi(x).
double upper_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

// log Mills ratio log(Q(x) / phi(x)) for x >= 0.
double log_mills(double x) {
  if (x < 35.0) return std::log(upper_tail(x)) + 0.5 * x * x + kHalfLog2Pi;
  const double r = 1.0 / (x * x);
  const double series =
      1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (-945.0)))));
  return std::log(series / x);
}

// log Q(x) for x >= 0, with log Q(+inf) = -inf.
double log_upper_tail(double x) {
  if (std::isinf(x)) return -kInf;
  return log_mills(x) - 0.5 * x * x - kHalfLog2Pi;
}

// log(Q(y) / Q(x)) for 0 <= x <= y.
double log_tail_ratio(double x, double y) {
  if (std::isinf(y)) return -kInf;
  return -0.5 * (y - x) * (y + x) + log_mills(y) - log_mills(x);
}

std::string window_text(double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

void TruncatedNormal::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::WindowMass, "truncated normal needs sigma2 > 0");
  }
  if (!std::isfinite(mu)) throw Error(ErrorCode::WindowMass, "truncated normal needs finite mu");
  if (!(lower < upper)) {
    throw Error(ErrorCode::WindowMass,
                "truncation window " + window_text(lower, upper) + " is empty");
  }
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -kInf;
    if (p == 1.0) return kInf;
    throw Error(ErrorCode::ConfigInvalid, "probability outside [0,1]");
  }
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double log_norm_diff(double x, double y) {
  if (!(x < y)) return -kInf;
  if (x >= 0.0) {
    return log_upper_tail(x) + std::log(-std::expm1(log_tail_ratio(x, y)));
  }
  if (y <= 0.0) return log_norm_diff(-y, -x);
  return std::log1p(-(upper_tail(-x) + upper_tail(y)));
}

double tn_cdf(double t, const TruncatedNormal& tn) {
  tn.validate();
  if (t <= tn.lower) return 0.0;
  if (t >= tn.upper) return 1.0;
  const double sigma = std::sqrt(tn.sigma2);
  const double za = (tn.lower - tn.mu) / sigma;
  const double zb = (tn.upper - tn.mu) / sigma;
  const double zt = (t - tn.mu) / sigma;
  const double log_den = log_norm_diff(za, zb);
  if (!std::isfinite(log_den)) {
    throw Error(ErrorCode::WindowMass, "truncation window " + window_text(tn.lower, tn.upper) +
                                           " has no mass under N(" + std::to_string(tn.mu) +
                                           ", " + std::to_string(tn.sigma2) + ")");
  }
  // Evaluate from whichever end keeps the numerator away from cancellation.
  if (zt - za <= zb - zt) {
    return std::clamp(std::exp(log_norm_diff(za, zt) - log_den), 0.0, 1.0);
  }
  return std::clamp(1.0 - std::exp(log_norm_diff(zt, zb) - log_den), 0.0, 1.0);
}

namespace {

template <class F>
SolveResult bisect_decreasing(F&& cdf, double target, double lo, double hi, double sigma,
                              const SolverOptions& opts, bool lo_fixed) {
  SolveResult res;
  double width = opts.initial_width * sigma;
  while (!lo_fixed && cdf(lo) < target) {
    width *= 2.0;
    if (width > opts.max_width * sigma) {
      throw Error(ErrorCode::SolverBracket,
                  "bracket expansion failed below mu=" + std::to_string(lo));
    }
    lo = hi - 2.0 * width;
    ++res.iterations;
  }
  width = opts.initial_width * sigma;
  while (cdf(hi) > target) {
    width *= 2.0;
    if (width > opts.max_width * sigma) {
      throw Error(ErrorCode::SolverBracket,
                  "bracket expansion failed above mu=" + std::to_string(hi));
    }
    hi = lo + 2.0 * width;
    ++res.iterations;
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f = cdf(mid);
    ++res.iterations;
    if (std::abs(f - target) <= 0.01 * opts.tolerance) {
      res.mu = mid;
      return res;
    }
    if (f > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double flo = std::abs(cdf(lo) - target);
  const double fhi = std::abs(cdf(hi) - target);
  res.mu = flo <= fhi ? lo : hi;
  return res;
}

void check_target(double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "solver target must lie in (0,1)");
  }
}

}  // namespace

SolveResult solve_location(double t, double target, double sigma2, double lower, double upper,
                           const SolverOptions& opts) {
  check_target(target);
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::WindowMass, "solver needs sigma2 > 0");
  if (!(lower < upper)) {
    throw Error(ErrorCode::WindowMass, "truncation window " + window_text(lower, upper) +
                                           " is empty");
  }
  const double sigma = std::sqrt(sigma2);
  const double snap = opts.edge_snap * sigma;
  if (t <= lower + snap) return {-kInf, 0, true};
  if (t >= upper - snap) return {kInf, 0, true};
  auto cdf = [&](double mu) { return tn_cdf(t, {mu, sigma2, lower, upper}); };
  const double w = opts.initial_width * sigma;
  return bisect_decreasing(cdf, target, t - w, t + w, sigma, opts, false);
}

SolveResult solve_location_hybrid(double t, double target, double sigma2, double v_minus,
                                  double v_plus, double offset, Side side,
                                  const SolverOptions& opts) {
  check_target(target);
  if (!(offset >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "hybrid offset must be >= 0");
  if (std::isinf(offset)) return solve_location(t, target, sigma2, v_minus, v_plus, opts);
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::WindowMass, "solver needs sigma2 > 0");
  if (!(v_minus < v_plus)) {
    throw Error(ErrorCode::WindowMass, "truncation window " + window_text(v_minus, v_plus) +
                                           " is empty");
  }
  const double sigma = std::sqrt(sigma2);
  const double snap = opts.edge_snap * sigma;
  const double w = opts.initial_width * sigma;

  if (side == Side::Lower) {
    // Domain mu >= t - offset; at its left end the window closes at t and
    // the cdf equals one.
    const double floor = t - offset;
    if (t <= v_minus + snap) return {floor, 0, true};
    if (t >= v_plus - snap) return {kInf, 0, true};
    auto cdf = [&](double mu) {
      const double hi = std::min(v_plus, mu + offset);
      if (t >= hi) return 1.0;
      return tn_cdf(t, {mu, sigma2, v_minus, hi});
    };
    return bisect_decreasing(cdf, target, floor, std::max(floor, t) + w, sigma, opts, true);
  }

  const double ceiling = t + offset;
  if (t >= v_plus - snap) return {ceiling, 0, true};
  if (t <= v_minus + snap) return {-kInf, 0, true};
  auto cdf = [&](double mu) {
    const double lo = std::max(v_minus, mu - offset);
    if (t <= lo) return 0.0;
    return tn_cdf(t, {mu, sigma2, lo, v_plus});
  };
  // Mirror image: with mu' = -mu the cdf of -t is decreasing in mu'.
  auto mirrored = [&](double mu_neg) { return 1.0 - cdf(-mu_neg); };
  SolveResult res = bisect_decreasing(mirrored, 1.0 - target, -ceiling,
                                      std::max(-ceiling, -t) + w, sigma, opts, true);
  res.mu = -res.mu;
  return res;
}

Mat psd_sqrt(const Mat& cov) {
  if (cov.rows() != cov.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "covariance must be square");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (cov + cov.transpose()));
  const double trace = cov.trace();
  Vec vals = eig.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -1e-8 * std::max(trace, 0.0)) {
      throw Error(ErrorCode::NotPsd, "covariance has eigenvalue " + std::to_string(vals(i)) +
                                         " below -1e-8*trace");
    }
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

std::shared_ptr<const Mat> standard_normal_block(int k, int draws, std::uint64_t seed) {
  using Key = std::tuple<int, int, std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const Mat>> cache;
  constexpr std::size_t kMaxEntries = 16;

  const Key key{k, draws, seed};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto block = std::make_shared<Mat>(draws, k);
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
  for (int i = 0; i < draws; ++i) {
    for (int j = 0; j < k; ++j) (*block)(i, j) = rng.normal();
  }
  std::lock_guard lock(mu);
  if (cache.size() >= kMaxEntries) cache.erase(cache.begin());
  return cache.emplace(key, std::move(block)).first->second;
}

MaxStatDistribution::MaxStatDistribution(const Mat& cov, int draws, std::uint64_t seed)
    : seed_(seed) {
  if (draws < 1) throw Error(ErrorCode::ConfigInvalid, "draws must be >= 1");
  const Eigen::Index k = cov.rows();
  if (k == 0 || cov.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "covariance must be square and nonempty");
  }
  Vec scale(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (!(cov(i, i) > 0.0)) {
      throw Error(ErrorCode::NotPsd, "covariance diagonal entry " + std::to_string(i) +
                                         " is not positive");
    }
    scale(i) = 1.0 / std::sqrt(cov(i, i));
  }
  const Mat corr = scale.asDiagonal() * cov * scale.asDiagonal();
  const Mat root = psd_sqrt(corr);
  const auto base = standard_normal_block(static_cast<int>(k), draws, seed);
  const Mat zeta = (*base) * root;
  sorted_.resize(draws);
  for (int i = 0; i < draws; ++i) sorted_[i] = zeta.row(i).maxCoeff();
  std::sort(sorted_.begin(), sorted_.end());
}

double MaxStatDistribution::quantile(double level) const {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "quantile level must lie in (0,1)");
  }
  const auto n = static_cast<double>(sorted_.size());
  auto idx = static_cast<std::size_t>(std::ceil(level * n - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted_.size());
  return sorted_[idx - 1];
}

double max_gauss_quantile(const Mat& cov, double level, int draws, std::uint64_t seed) {
  return MaxStatDistribution(cov, draws, seed).quantile(level);
}

}  // namespace boundselect
