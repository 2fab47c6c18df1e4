#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boundselect/model.hpp"

namespace boundselect {

enum class RuleKind { Weighted, Cms, Fixed, Undominated };

const char* rule_name(RuleKind kind);

// Realized selection and the events that certify it for lower-side and
// upper-side inference. Empty gamma vectors mean no auxiliary conditioning.
struct SelectionOutcome {
  RuleKind rule = RuleKind::Fixed;
  int d_hat = 0;
  int j_L = 0;
  int j_U = 0;
  std::vector<int> gamma_L;
  std::vector<int> gamma_U;
  Polyhedron poly_L;
  Polyhedron poly_U;

  // Undominated rule only: the estimated set.
  std::vector<int> members;
  // Quasi-Bayesian rule only: the perturbations (one per row) and their seed.
  Mat eps;
  std::uint64_t seed = 0;
  double cms_statistic = 0.0;
};

// Throws Error(EventViolated) unless p_hat satisfies both polyhedra up to a
// small relative tolerance.
void assert_realized(const SelectionOutcome& sel, const Vec& p_hat);

// d_hat = argmax_d w_L L_hat(d) + w_U U_hat(d), lowest index on ties.
SelectionOutcome rule_weighted(const BoundsSpec& spec, const ReducedForm& rf, double w_L,
                               double w_U);

SelectionOutcome fixed_target(const BoundsSpec& spec, const ReducedForm& rf, int d_star);

// One outcome per member of the estimated undominated set.
std::vector<SelectionOutcome> rule_undominated(const BoundsSpec& spec, const ReducedForm& rf);

// Quasi-Bayesian treatment choice between options 0 and 1:
//   d_hat = 1{ mean_i [max(b_U(p_hat + eps_i), 0) + min(b_L(p_hat + eps_i), 0)] >= 0 }
// where `family` (one option) gives b_L, b_U and `inference` is the spec
// whose bounds at d_hat are the inferential targets.
SelectionOutcome rule_cms(const BoundsSpec& family, const BoundsSpec& inference,
                          const ReducedForm& rf, const Mat& eps);
// Draws eps_i ~ N(0, Sigma_hat / n), i = 1..m.
SelectionOutcome rule_cms(const BoundsSpec& family, const BoundsSpec& inference,
                          const ReducedForm& rf, int m, std::uint64_t seed);
Mat cms_draws(const ReducedForm& rf, int m, std::uint64_t seed);

}  // namespace boundselect
