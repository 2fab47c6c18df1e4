#include "boundselect/condition.hpp"

#include <algorithm>
#include <cmath>

#include "boundselect/error.hpp"
#include "boundselect/gauss.hpp"

namespace boundselect {

DirectionData direction(const Vec& l, double offset, const ReducedForm& rf) {
  if (l.size() != rf.p_hat.size() || rf.sigma_hat.rows() != l.size()) {
    throw Error(ErrorCode::DimensionMismatch, "direction: piece length " +
                                                  std::to_string(l.size()) +
                                                  " does not match reduced form");
  }
  DirectionData dd;
  const Vec sl = rf.sigma_hat * l;
  dd.var_s = l.dot(sl);
  if (!(dd.var_s > 0.0)) {
    throw Error(ErrorCode::CovarianceInvalid, "piece variance l Sigma l' is not positive");
  }
  const double rn = rf.sqrt_n();
  dd.b = sl / dd.var_s;
  dd.s_obs = rn * (offset + l.dot(rf.p_hat));
  dd.z_stat = rn * rf.p_hat - dd.b * dd.s_obs;
  return dd;
}

ConditioningWindow truncation_bounds(const Polyhedron& poly, const DirectionData& dd, long n) {
  ConditioningWindow w{-kInf, kInf, kInf};
  if (poly.rows() == 0) return w;
  if (poly.dim() != dd.b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "polyhedron dimension does not match direction");
  }
  const double rn = std::sqrt(static_cast<double>(n));
  const Vec a = poly.A * dd.b;
  const Vec r = rn * poly.c - poly.A * dd.z_stat;
  const double tau = 1e-10 * (1.0 + a.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a(k) < -tau) {
      w.v_minus = std::max(w.v_minus, r(k) / a(k));
    } else if (a(k) > tau) {
      w.v_plus = std::min(w.v_plus, r(k) / a(k));
    } else {
      w.v_zero = std::min(w.v_zero, r(k));
    }
  }
  return w;
}

}  // namespace boundselect
