#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace boundselect {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// One affine piece `offset + coef . p` of a max-form lower bound or a
// min-form upper bound.
struct Piece {
  double offset = 0.0;
  Vec coef;
};

// Affine max/min families defining the identified interval [L(d), U(d)] of
// each option d = 0..num_options-1:
//   L(d) = max_j lower[d][j](p),  U(d) = min_j upper[d][j](p).
// Piece indices are 0-based throughout the library.
struct BoundsSpec {
  int num_options = 0;
  int dim_p = 0;
  std::vector<std::vector<Piece>> lower;
  std::vector<std::vector<Piece>> upper;

  int num_lower() const { return lower.empty() ? 0 : static_cast<int>(lower[0].size()); }
  int num_upper() const { return upper.empty() ? 0 : static_cast<int>(upper[0].size()); }

  // Throws Error(SpecInvalid) on a ragged family, a wrong vector length, a
  // zero coefficient vector, or two identical coefficient vectors within an
  // option. Zero vectors are admitted when `allow_constant_pieces` is set
  // (LP-derived families may contain them).
  void validate(bool allow_constant_pieces = false) const;

  double lower_value(int d, int j, const Vec& p) const;
  double upper_value(int d, int j, const Vec& p) const;
  double L(int d, const Vec& p) const;
  double U(int d, const Vec& p) const;
};

// Sample size, reduced-form estimate and covariance estimate of
// sqrt(n) (p_hat - p).
struct ReducedForm {
  long n = 0;
  Vec p_hat;
  Mat sigma_hat;

  // Symmetry within 1e-10 (relative) and eigenvalues in
  // [1/lambda_bar, lambda_bar]; throws Error(CovarianceInvalid).
  void validate(double lambda_bar = 1e6) const;
  double sqrt_n() const;
};

// Event {A p <= c}. Zero rows is the whole space.
struct Polyhedron {
  Mat A;
  Vec c;
  std::vector<std::string> labels;

  explicit Polyhedron(int dim = 0) : A(0, dim), c(0) {}

  int rows() const { return static_cast<int>(A.rows()); }
  int dim() const { return static_cast<int>(A.cols()); }
  void add_row(const Vec& a, double rhs, std::string label = {});
  void append(const Polyhedron& other);
  // Largest violation max_k (A p - c)_k, or -inf for an empty row set.
  double max_violation(const Vec& p) const;
  bool contains(const Vec& p, double tol = 0.0) const { return max_violation(p) <= tol; }
};

struct BoundEstimate {
  Vec L_hat;
  Vec U_hat;
  std::vector<int> j_L;
  std::vector<int> j_U;
};

// Plug-in bounds; argmax/argmin ties go to the lowest piece index.
BoundEstimate estimate_bounds(const BoundsSpec& spec, const Vec& p);
BoundEstimate estimate_bounds(const BoundsSpec& spec, const ReducedForm& rf);

// Rows certifying that piece j attains the maximum of lower[d]:
//   (l_{d,k} - l_{d,j}) p <= lt_{d,j} - lt_{d,k},  k != j.
Polyhedron argmax_rows(const BoundsSpec& spec, int d, int j);
// Rows certifying that piece j attains the minimum of upper[d]:
//   (u_{d,j} - u_{d,k}) p <= ut_{d,k} - ut_{d,j},  k != j.
Polyhedron argmin_rows(const BoundsSpec& spec, int d, int j);

struct UndominatedSet {
  std::vector<int> members;
  // membership[d] encodes {U_hat(d) >= max_d' L_hat(d')} for every option d.
  std::vector<Polyhedron> membership;
  BoundEstimate estimate;
};

// D_hat = {d : U_hat(d) >= max_d' L_hat(d')}.
UndominatedSet undominated_set(const BoundsSpec& spec, const ReducedForm& rf);
Polyhedron undominated_rows(const BoundsSpec& spec, int d);

}  // namespace boundselect
