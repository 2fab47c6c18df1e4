#pragma once

#include "boundselect/model.hpp"

namespace boundselect {

// Range of the studied statistic s consistent with {A p <= c} when the
// orthogonal component z_stat is held fixed.
struct ConditioningWindow {
  double v_minus;
  double v_plus;
  // Smallest slack among rows that do not involve s; +inf without such rows.
  double v_zero;

  bool contains(double s, double tol = 0.0) const {
    return v_minus <= s + tol && s <= v_plus + tol && v_zero >= -tol;
  }
};

struct DirectionData {
  Vec b;
  Vec z_stat;
  double s_obs = 0.0;
  double var_s = 0.0;
};

// b = Sigma l' / (l Sigma l'), s_obs = sqrt(n) (lt + l p_hat),
// z_stat = sqrt(n) p_hat - b s_obs.
DirectionData direction(const Vec& l, double offset, const ReducedForm& rf);

// With a = A b and r = sqrt(n) c - A z_stat:
//   v- = max_{a_k < -tau} r_k / a_k,  v+ = min_{a_k > tau} r_k / a_k,
//   v0 = min_{|a_k| <= tau} r_k,      tau = 1e-10 (1 + |a|_inf).
ConditioningWindow truncation_bounds(const Polyhedron& poly, const DirectionData& dd, long n);

}  // namespace boundselect
