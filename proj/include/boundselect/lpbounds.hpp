#pragma once

#include <vector>

#include "boundselect/model.hpp"

namespace boundselect {

// W(d) = A.row(d) q and p = B q for a latent distribution q on the simplex.
struct LatentLp {
  Mat A;  // options x d_q
  Mat B;  // d_p x d_q

  void validate() const;
  int num_options() const { return static_cast<int>(A.rows()); }
  int dim_p() const { return static_cast<int>(B.rows()); }
  int dim_q() const { return static_cast<int>(B.cols()); }
};

struct DualVertexSet {
  // Each vertex is (lambda_1', lambda_0)', length d_p + 1.
  std::vector<Vec> vertices;
  long subsets = 0;
  double max_residual = 0.0;
};

struct LpOptions {
  double enumeration_cap = 2e6;
  double tolerance = 1e-9;
};

// Vertices of {lambda : Bt' lambda >= rhs} with Bt = [B; 1'], found by
// exhaustive enumeration of (d_p + 1)-subsets of active constraints.
DualVertexSet dual_vertices(const LatentLp& lp, const Vec& rhs, const LpOptions& opts = {});

struct LpSpecSummary {
  std::vector<int> lower_vertices;
  std::vector<int> upper_vertices;
};

// L(d) = max over lower vertices of -(lambda_1' p + lambda_0) with rhs -A_d',
// U(d) = min over upper vertices of lambda_1' p + lambda_0 with rhs A_d'.
// Pieces sharing a coefficient vector are merged keeping the binding
// constant.
BoundsSpec lp_to_bounds_spec(const LatentLp& lp, const LpOptions& opts = {},
                             LpSpecSummary* summary = nullptr);
// Options of all systems in order; every system must share d_p.
BoundsSpec lp_to_bounds_spec(const std::vector<LatentLp>& lps, const LpOptions& opts = {},
                             LpSpecSummary* summary = nullptr);

// Sixteen response types (y(0), y(1), d(0), d(1)) with objective
// E[Y(1) - Y(0)], over the binary-IV coordinates of the catalog.
LatentLp balke_pearl_latent();
// Latent system for E[Y(d)] alone: 18 types (Y(d), c_0, c_1) with c_z in
// {takes d, takes 1-d with Y=0, takes 1-d with Y=1}.
LatentLp manski_latent(int option);

}  // namespace boundselect
