#include "boundselect/select.hpp"

#include <algorithm>
#include <cmath>

#include "boundselect/error.hpp"
#include "boundselect/gauss.hpp"
#include "boundselect/rng.hpp"

namespace boundselect {

const char* rule_name(RuleKind kind) {
  switch (kind) {
    case RuleKind::Weighted: return "weighted";
    case RuleKind::Cms: return "cms";
    case RuleKind::Fixed: return "fixed";
    case RuleKind::Undominated: return "undominated";
  }
  return "unknown";
}

namespace {

std::string tag(const char* prefix, int a, int b) {
  return std::string(prefix) + " " + std::to_string(a) + "," + std::to_string(b);
}

void check_dims(const BoundsSpec& spec, const ReducedForm& rf) {
  if (rf.p_hat.size() != spec.dim_p) {
    throw Error(ErrorCode::DimensionMismatch, "p_hat has length " +
                                                  std::to_string(rf.p_hat.size()) +
                                                  ", spec dim_p is " +
                                                  std::to_string(spec.dim_p));
  }
}

}  // namespace

void assert_realized(const SelectionOutcome& sel, const Vec& p_hat) {
  auto check = [&](const Polyhedron& poly, const char* side) {
    if (poly.rows() == 0) return;
    const Vec slack = poly.A * p_hat - poly.c;
    for (int k = 0; k < poly.rows(); ++k) {
      const double scale = 1.0 + poly.c.cwiseAbs()(k) + poly.A.row(k).cwiseAbs().sum();
      if (slack(k) > 1e-9 * scale) {
        throw Error(ErrorCode::EventViolated,
                    std::string(side) + " event row '" + poly.labels[k] +
                        "' violated at p_hat by " + std::to_string(slack(k)));
      }
    }
  };
  check(sel.poly_L, "lower");
  check(sel.poly_U, "upper");
}

SelectionOutcome rule_weighted(const BoundsSpec& spec, const ReducedForm& rf, double w_L,
                               double w_U) {
  if (!(w_L >= 0.0 && w_U >= 0.0) || (w_L == 0.0 && w_U == 0.0)) {
    throw Error(ErrorCode::ConfigInvalid, "weights must be nonnegative and not both zero");
  }
  check_dims(spec, rf);
  const double total = w_L + w_U;
  w_L /= total;
  w_U /= total;

  const BoundEstimate est = estimate_bounds(spec, rf);
  SelectionOutcome out;
  out.rule = RuleKind::Weighted;
  out.poly_L = Polyhedron(spec.dim_p);
  out.poly_U = Polyhedron(spec.dim_p);

  auto score = [&](int d) { return w_L * est.L_hat(d) + w_U * est.U_hat(d); };
  int d_hat = 0;
  for (int d = 1; d < spec.num_options; ++d) {
    if (score(d) > score(d_hat)) d_hat = d;
  }
  out.d_hat = d_hat;
  out.j_L = est.j_L[d_hat];
  out.j_U = est.j_U[d_hat];

  if (w_U == 0.0) {
    const Piece& star = spec.lower[d_hat][out.j_L];
    Polyhedron rows(spec.dim_p);
    for (int d = 0; d < spec.num_options; ++d) {
      for (int j = 0; j < spec.num_lower(); ++j) {
        if (d == d_hat && j == out.j_L) continue;
        const Piece& other = spec.lower[d][j];
        rows.add_row(other.coef - star.coef, star.offset - other.offset, tag("maxL", d, j));
      }
    }
    out.poly_L = rows;
    out.poly_U = rows;
    out.poly_U.append(argmin_rows(spec, d_hat, out.j_U));
    out.gamma_U = {out.j_L};
    return out;
  }

  Polyhedron rows(spec.dim_p);
  if (w_L == 0.0) {
    const Piece& star = spec.upper[d_hat][out.j_U];
    for (int d = 0; d < spec.num_options; ++d) {
      if (d == d_hat) continue;
      const Piece& other = spec.upper[d][est.j_U[d]];
      rows.add_row(other.coef - star.coef, star.offset - other.offset, tag("maxU", d, est.j_U[d]));
    }
    for (int d = 0; d < spec.num_options; ++d) rows.append(argmin_rows(spec, d, est.j_U[d]));
    out.poly_U = rows;
    out.poly_L = rows;
    out.poly_L.append(argmax_rows(spec, d_hat, out.j_L));
    out.gamma_L = est.j_U;
    out.gamma_U = est.j_U;
    return out;
  }

  const Piece& ls = spec.lower[d_hat][out.j_L];
  const Piece& us = spec.upper[d_hat][out.j_U];
  for (int d = 0; d < spec.num_options; ++d) {
    if (d == d_hat) continue;
    const Piece& lo = spec.lower[d][est.j_L[d]];
    const Piece& uo = spec.upper[d][est.j_U[d]];
    rows.add_row(w_L * (lo.coef - ls.coef) + w_U * (uo.coef - us.coef),
                 w_L * (ls.offset - lo.offset) + w_U * (us.offset - uo.offset),
                 tag("maxW", d, d_hat));
  }
  for (int d = 0; d < spec.num_options; ++d) {
    rows.append(argmax_rows(spec, d, est.j_L[d]));
    rows.append(argmin_rows(spec, d, est.j_U[d]));
  }
  out.poly_L = rows;
  out.poly_U = rows;
  out.gamma_L = est.j_L;
  out.gamma_L.insert(out.gamma_L.end(), est.j_U.begin(), est.j_U.end());
  out.gamma_U = out.gamma_L;
  return out;
}

SelectionOutcome fixed_target(const BoundsSpec& spec, const ReducedForm& rf, int d_star) {
  check_dims(spec, rf);
  if (d_star < 0 || d_star >= spec.num_options) {
    throw Error(ErrorCode::ConfigInvalid, "target option " + std::to_string(d_star) +
                                              " out of range");
  }
  const BoundEstimate est = estimate_bounds(spec, rf);
  SelectionOutcome out;
  out.rule = RuleKind::Fixed;
  out.d_hat = d_star;
  out.j_L = est.j_L[d_star];
  out.j_U = est.j_U[d_star];
  out.poly_L = argmax_rows(spec, d_star, out.j_L);
  out.poly_U = argmin_rows(spec, d_star, out.j_U);
  return out;
}

std::vector<SelectionOutcome> rule_undominated(const BoundsSpec& spec, const ReducedForm& rf) {
  check_dims(spec, rf);
  const UndominatedSet set = undominated_set(spec, rf);
  std::vector<SelectionOutcome> outs;
  for (int d : set.members) {
    SelectionOutcome out;
    out.rule = RuleKind::Undominated;
    out.d_hat = d;
    out.members = set.members;
    out.j_L = set.estimate.j_L[d];
    out.j_U = set.estimate.j_U[d];
    out.poly_L = set.membership[d];
    out.poly_L.append(argmax_rows(spec, d, out.j_L));
    out.poly_U = set.membership[d];
    out.poly_U.append(argmin_rows(spec, d, out.j_U));
    outs.push_back(std::move(out));
  }
  return outs;
}

Mat cms_draws(const ReducedForm& rf, int m, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::ConfigInvalid, "cms draws m must be >= 1");
  const Eigen::Index k = rf.p_hat.size();
  const Mat root = psd_sqrt(rf.sigma_hat / static_cast<double>(rf.n));
  Rng rng(seed);
  Mat z(m, k);
  for (int i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) z(i, j) = rng.normal();
  }
  return z * root;
}

SelectionOutcome rule_cms(const BoundsSpec& family, const BoundsSpec& inference,
                          const ReducedForm& rf, const Mat& eps) {
  if (family.num_options != 1) {
    throw Error(ErrorCode::SpecInvalid, "cms family must describe a single parameter");
  }
  if (inference.num_options < 2) {
    throw Error(ErrorCode::SpecInvalid, "cms rule selects between options 0 and 1");
  }
  check_dims(family, rf);
  check_dims(inference, rf);
  if (eps.cols() != family.dim_p || eps.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "cms perturbations must be m x dim_p");
  }
  const int m = static_cast<int>(eps.rows());
  const auto& lo = family.lower[0];
  const auto& up = family.upper[0];

  SelectionOutcome out;
  out.rule = RuleKind::Cms;
  out.eps = eps;
  Polyhedron rows(family.dim_p);
  std::vector<int> k_under(m), k_over(m), sign_l(m), sign_u(m);
  Vec agg_coef = Vec::Zero(family.dim_p);
  double agg_const = 0.0;
  double total = 0.0;

  for (int i = 0; i < m; ++i) {
    const Vec e = eps.row(i).transpose();
    const Vec p = rf.p_hat + e;
    BoundEstimate est = estimate_bounds(family, p);
    const int ku = est.j_U[0];
    const int kl = est.j_L[0];
    k_under[i] = ku;
    k_over[i] = kl;
    const double bU = est.U_hat(0);
    const double bL = est.L_hat(0);
    sign_u[i] = bU >= 0.0 ? 1 : -1;
    sign_l[i] = bL >= 0.0 ? 1 : -1;
    total += std::max(bU, 0.0) + std::min(bL, 0.0);

    for (int k = 0; k < static_cast<int>(up.size()); ++k) {
      if (k == ku) continue;
      rows.add_row(up[ku].coef - up[k].coef,
                   up[k].offset - up[ku].offset + (up[k].coef - up[ku].coef).dot(e),
                   tag("cms argminU", i, k));
    }
    for (int k = 0; k < static_cast<int>(lo.size()); ++k) {
      if (k == kl) continue;
      rows.add_row(lo[k].coef - lo[kl].coef,
                   lo[kl].offset - lo[k].offset + (lo[kl].coef - lo[k].coef).dot(e),
                   tag("cms argmaxL", i, k));
    }
    const double cl = lo[kl].offset + lo[kl].coef.dot(e);
    const double cu = up[ku].offset + up[ku].coef.dot(e);
    if (sign_l[i] < 0) {
      rows.add_row(lo[kl].coef, -cl, tag("cms signL-", i, kl));
      agg_coef += lo[kl].coef;
      agg_const += cl;
    } else {
      rows.add_row(-lo[kl].coef, cl, tag("cms signL+", i, kl));
    }
    if (sign_u[i] < 0) {
      rows.add_row(up[ku].coef, -cu, tag("cms signU-", i, ku));
    } else {
      rows.add_row(-up[ku].coef, cu, tag("cms signU+", i, ku));
      agg_coef += up[ku].coef;
      agg_const += cu;
    }
  }
  out.cms_statistic = total / m;
  out.d_hat = out.cms_statistic >= 0.0 ? 1 : 0;
  if (out.d_hat == 1) {
    rows.add_row(-agg_coef, agg_const, "cms aggregate >= 0");
  } else {
    rows.add_row(agg_coef, -agg_const, "cms aggregate < 0");
  }

  const BoundEstimate est = estimate_bounds(inference, rf);
  out.j_L = est.j_L[out.d_hat];
  out.j_U = est.j_U[out.d_hat];
  out.poly_L = rows;
  out.poly_L.append(argmax_rows(inference, out.d_hat, out.j_L));
  out.poly_U = rows;
  out.poly_U.append(argmin_rows(inference, out.d_hat, out.j_U));

  std::vector<int> gamma = k_under;
  gamma.insert(gamma.end(), k_over.begin(), k_over.end());
  gamma.insert(gamma.end(), sign_l.begin(), sign_l.end());
  gamma.insert(gamma.end(), sign_u.begin(), sign_u.end());
  out.gamma_L = gamma;
  out.gamma_U = gamma;
  return out;
}

SelectionOutcome rule_cms(const BoundsSpec& family, const BoundsSpec& inference,
                          const ReducedForm& rf, int m, std::uint64_t seed) {
  SelectionOutcome out = rule_cms(family, inference, rf, cms_draws(rf, m, seed));
  out.seed = seed;
  return out;
}

}  // namespace boundselect
