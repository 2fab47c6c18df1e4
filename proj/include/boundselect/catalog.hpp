#pragma once

#include <string>
#include <vector>

#include "boundselect/model.hpp"

namespace boundselect {

// Binary instrumental-variable coordinates, in this order:
//   p = (p100, p010, p110, p101, p011, p111),  p^{ydz} = P(Y=y, D=d | Z=z).
// The cells p000 and p001 are the within-stratum residuals.
BoundsSpec manski_binary_spec();

// Outcome supported on [y_l, y_u]; coordinates
//   (E[Y|D=0,Z=1]P(D=0|Z=1), E[Y|D=0,Z=0]P(D=0|Z=0),
//    E[Y|D=1,Z=1]P(D=1|Z=1), E[Y|D=1,Z=0]P(D=1|Z=0),
//    P(D=0|Z=1), P(D=0|Z=0)).
BoundsSpec manski_continuous_spec(double y_l, double y_u);

// Sharp bounds on E[Y(1)] - E[Y(0)] under full instrument independence;
// one option, eight lower and eight upper pieces.
BoundsSpec balke_pearl_ate_spec();

// Terminal-outcome welfare E[Y_2(d)] with options (1,1), (1,0), (0,1), (0,0)
// and a binary first-period instrument. Per stratum z the 7 free coordinates
// are P(Y_2=y, D_1=a, D_2=b | Z=z) for cell index 4y + 2a + b = 1..7; cell 0
// is the residual. Coordinate index is 7z + cell - 1.
BoundsSpec dyntreat_spec();
std::vector<std::pair<int, int>> dyntreat_options();

// Bounds on W(treated) - W(control) as a one-option family; pieces with
// identical vectors are merged keeping the binding constant.
BoundsSpec difference_family(const BoundsSpec& spec, int treated, int control);

// Catalog lookup: manski-binary, manski-continuous (support [0,1]),
// balke-pearl, dyntreat.
BoundsSpec catalog_spec(const std::string& name);

struct IvRecord {
  int y = 0;
  int d = 0;
  int z = 0;
};

struct DynRecord {
  int y1 = 0;
  int y2 = 0;
  int d1 = 0;
  int d2 = 0;
  int z = 0;
};

struct EstimatorOptions {
  double smoothing = 0.0;
  long min_stratum = 5;
  double lambda_bar = 1e6;
};

// Stratified multinomial estimator. `cells[i]` in [0, K) and `strata[i]` in
// {0,1}; cell 0 is dropped as the residual. p_hat(z*(K-1) + c - 1) =
// (count + eps) / (n_z + K eps); the covariance of sqrt(n)(p_hat - p) is
// block diagonal with blocks (diag(pi_z) - pi_z pi_z') / q_z, q_z = n_z / n.
ReducedForm estimate_stratified(const std::vector<int>& cells, const std::vector<int>& strata,
                                int K, const EstimatorOptions& opts = {});

ReducedForm estimate_reduced_form(const std::vector<IvRecord>& data,
                                  const EstimatorOptions& opts = {});
ReducedForm estimate_reduced_form_dyn(const std::vector<DynRecord>& data,
                                      const EstimatorOptions& opts = {});

// CSV with a header naming y,d,z (any column order, extra columns ignored).
std::vector<IvRecord> read_iv_csv(const std::string& path);
// CSV with a header naming y1,y2,d1,d2,z.
std::vector<DynRecord> read_dyn_csv(const std::string& path);

}  // namespace boundselect
