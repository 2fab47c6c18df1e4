#include "boundselect/model.hpp"

#include <cmath>
#include <limits>

#include "boundselect/error.hpp"

namespace boundselect {

namespace {

void check_family(const std::vector<std::vector<Piece>>& family, int num_options, int dim_p,
                  bool allow_constant, const char* side) {
  if (static_cast<int>(family.size()) != num_options) {
    throw Error(ErrorCode::SpecInvalid, std::string(side) + " family has " +
                                            std::to_string(family.size()) + " options, expected " +
                                            std::to_string(num_options));
  }
  const std::size_t pieces = family.front().size();
  if (pieces == 0) {
    throw Error(ErrorCode::SpecInvalid, std::string(side) + " family has no pieces");
  }
  for (int d = 0; d < num_options; ++d) {
    const auto& list = family[d];
    if (list.size() != pieces) {
      throw Error(ErrorCode::SpecInvalid,
                  std::string(side) + " family is not rectangular at option " + std::to_string(d));
    }
    for (std::size_t j = 0; j < list.size(); ++j) {
      if (list[j].coef.size() != dim_p) {
        throw Error(ErrorCode::SpecInvalid, std::string(side) + " piece (" + std::to_string(d) +
                                                "," + std::to_string(j) + ") has length " +
                                                std::to_string(list[j].coef.size()));
      }
      if (!list[j].coef.allFinite() || !std::isfinite(list[j].offset)) {
        throw Error(ErrorCode::SpecInvalid, std::string(side) + " piece (" + std::to_string(d) +
                                                "," + std::to_string(j) + ") is not finite");
      }
      if (!allow_constant && (dim_p == 0 || list[j].coef.cwiseAbs().maxCoeff() == 0.0)) {
        throw Error(ErrorCode::SpecInvalid, std::string(side) + " piece (" + std::to_string(d) +
                                                "," + std::to_string(j) +
                                                ") has a zero coefficient vector");
      }
      for (std::size_t k = 0; k < j; ++k) {
        if (dim_p > 0 && (list[j].coef - list[k].coef).cwiseAbs().maxCoeff() <= 1e-12) {
          throw Error(ErrorCode::SpecInvalid, std::string(side) + " pieces " + std::to_string(k) +
                                                  " and " + std::to_string(j) + " of option " +
                                                  std::to_string(d) +
                                                  " share a coefficient vector");
        }
      }
    }
  }
}

}  // namespace

void BoundsSpec::validate(bool allow_constant_pieces) const {
  if (num_options < 1) throw Error(ErrorCode::SpecInvalid, "num_options must be >= 1");
  if (dim_p < 0) throw Error(ErrorCode::SpecInvalid, "dim_p must be >= 0");
  if (lower.empty() || upper.empty()) {
    throw Error(ErrorCode::SpecInvalid, "lower and upper families must be nonempty");
  }
  check_family(lower, num_options, dim_p, allow_constant_pieces, "lower");
  check_family(upper, num_options, dim_p, allow_constant_pieces, "upper");
}

double BoundsSpec::lower_value(int d, int j, const Vec& p) const {
  const Piece& piece = lower[d][j];
  return piece.offset + piece.coef.dot(p);
}

double BoundsSpec::upper_value(int d, int j, const Vec& p) const {
  const Piece& piece = upper[d][j];
  return piece.offset + piece.coef.dot(p);
}

double BoundsSpec::L(int d, const Vec& p) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < num_lower(); ++j) best = std::max(best, lower_value(d, j, p));
  return best;
}

double BoundsSpec::U(int d, const Vec& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < num_upper(); ++j) best = std::min(best, upper_value(d, j, p));
  return best;
}

void ReducedForm::validate(double lambda_bar) const {
  const Eigen::Index k = p_hat.size();
  if (sigma_hat.rows() != k || sigma_hat.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "sigma_hat is " + std::to_string(sigma_hat.rows()) +
                                                  "x" + std::to_string(sigma_hat.cols()) +
                                                  " but p_hat has length " + std::to_string(k));
  }
  if (n <= 0) throw Error(ErrorCode::CovarianceInvalid, "sample size must be positive");
  if (!p_hat.allFinite() || !sigma_hat.allFinite()) {
    throw Error(ErrorCode::CovarianceInvalid, "reduced form contains non-finite values");
  }
  if (k == 0) return;
  const double scale = std::max(1.0, sigma_hat.cwiseAbs().maxCoeff());
  if ((sigma_hat - sigma_hat.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::CovarianceInvalid, "sigma_hat is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(sigma_hat, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo < 1.0 / lambda_bar || hi > lambda_bar) {
    throw Error(ErrorCode::CovarianceInvalid,
                "sigma_hat eigenvalues [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "] fall outside [1/lambda_bar, lambda_bar] with lambda_bar=" +
                    std::to_string(lambda_bar));
  }
}

double ReducedForm::sqrt_n() const { return std::sqrt(static_cast<double>(n)); }

void Polyhedron::add_row(const Vec& a, double rhs, std::string label) {
  if (A.cols() == 0 && A.rows() == 0) A.resize(0, a.size());
  if (a.size() != A.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "polyhedron row has length " +
                                                  std::to_string(a.size()) + ", expected " +
                                                  std::to_string(A.cols()));
  }
  const Eigen::Index r = A.rows();
  A.conservativeResize(r + 1, Eigen::NoChange);
  A.row(r) = a.transpose();
  c.conservativeResize(r + 1);
  c(r) = rhs;
  labels.push_back(std::move(label));
}

void Polyhedron::append(const Polyhedron& other) {
  for (int k = 0; k < other.rows(); ++k) {
    add_row(other.A.row(k).transpose(), other.c(k),
            k < static_cast<int>(other.labels.size()) ? other.labels[k] : std::string{});
  }
}

double Polyhedron::max_violation(const Vec& p) const {
  if (rows() == 0) return -std::numeric_limits<double>::infinity();
  if (p.size() != A.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "point has length " + std::to_string(p.size()) +
                                                  ", polyhedron dimension " +
                                                  std::to_string(A.cols()));
  }
  return (A * p - c).maxCoeff();
}

BoundEstimate estimate_bounds(const BoundsSpec& spec, const Vec& p) {
  if (p.size() != spec.dim_p) {
    throw Error(ErrorCode::DimensionMismatch, "p_hat has length " + std::to_string(p.size()) +
                                                  ", spec dim_p is " +
                                                  std::to_string(spec.dim_p));
  }
  BoundEstimate est;
  est.L_hat.resize(spec.num_options);
  est.U_hat.resize(spec.num_options);
  est.j_L.assign(spec.num_options, 0);
  est.j_U.assign(spec.num_options, 0);
  for (int d = 0; d < spec.num_options; ++d) {
    double best = spec.lower_value(d, 0, p);
    for (int j = 1; j < spec.num_lower(); ++j) {
      const double v = spec.lower_value(d, j, p);
      if (v > best) {
        best = v;
        est.j_L[d] = j;
      }
    }
    est.L_hat(d) = best;

    best = spec.upper_value(d, 0, p);
    for (int j = 1; j < spec.num_upper(); ++j) {
      const double v = spec.upper_value(d, j, p);
      if (v < best) {
        best = v;
        est.j_U[d] = j;
      }
    }
    est.U_hat(d) = best;
  }
  return est;
}

BoundEstimate estimate_bounds(const BoundsSpec& spec, const ReducedForm& rf) {
  return estimate_bounds(spec, rf.p_hat);
}

Polyhedron argmax_rows(const BoundsSpec& spec, int d, int j) {
  Polyhedron poly(spec.dim_p);
  const Piece& star = spec.lower[d][j];
  for (int k = 0; k < spec.num_lower(); ++k) {
    if (k == j) continue;
    const Piece& other = spec.lower[d][k];
    poly.add_row(other.coef - star.coef, star.offset - other.offset,
                 "argmaxL d=" + std::to_string(d) + " j=" + std::to_string(j) +
                     " k=" + std::to_string(k));
  }
  return poly;
}

Polyhedron argmin_rows(const BoundsSpec& spec, int d, int j) {
  Polyhedron poly(spec.dim_p);
  const Piece& star = spec.upper[d][j];
  for (int k = 0; k < spec.num_upper(); ++k) {
    if (k == j) continue;
    const Piece& other = spec.upper[d][k];
    poly.add_row(star.coef - other.coef, other.offset - star.offset,
                 "argminU d=" + std::to_string(d) + " j=" + std::to_string(j) +
                     " k=" + std::to_string(k));
  }
  return poly;
}

Polyhedron undominated_rows(const BoundsSpec& spec, int d) {
  Polyhedron poly(spec.dim_p);
  for (int dp = 0; dp < spec.num_options; ++dp) {
    for (int j = 0; j < spec.num_upper(); ++j) {
      const Piece& u = spec.upper[d][j];
      for (int jp = 0; jp < spec.num_lower(); ++jp) {
        const Piece& l = spec.lower[dp][jp];
        poly.add_row(l.coef - u.coef, u.offset - l.offset,
                     "undominated d=" + std::to_string(d) + " U" + std::to_string(j) + " >= L(" +
                         std::to_string(dp) + ")" + std::to_string(jp));
      }
    }
  }
  return poly;
}

UndominatedSet undominated_set(const BoundsSpec& spec, const ReducedForm& rf) {
  UndominatedSet out;
  out.estimate = estimate_bounds(spec, rf);
  const double best_lower = out.estimate.L_hat.maxCoeff();
  for (int d = 0; d < spec.num_options; ++d) {
    out.membership.push_back(undominated_rows(spec, d));
    if (out.estimate.U_hat(d) >= best_lower) out.members.push_back(d);
  }
  return out;
}

}  // namespace boundselect
