#include "boundselect/lpbounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "boundselect/error.hpp"

namespace boundselect {

void LatentLp::validate() const {
  if (B.cols() < 1) throw Error(ErrorCode::SpecInvalid, "latent LP needs d_q >= 1");
  if (A.rows() < 1) throw Error(ErrorCode::SpecInvalid, "latent LP needs an objective row");
  if (A.cols() != B.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "objective has " + std::to_string(A.cols()) +
                                                  " columns, B has " +
                                                  std::to_string(B.cols()));
  }
  if (!A.allFinite() || !B.allFinite()) {
    throw Error(ErrorCode::SpecInvalid, "latent LP contains non-finite entries");
  }
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

}  // namespace

DualVertexSet dual_vertices(const LatentLp& lp, const Vec& rhs, const LpOptions& opts) {
  lp.validate();
  const int dq = lp.dim_q();
  const int k = lp.dim_p() + 1;
  if (rhs.size() != dq) {
    throw Error(ErrorCode::DimensionMismatch, "dual right-hand side must have length d_q");
  }
  // Constraint rows: M.row(i) lambda >= rhs(i), M = Bt'.
  Mat M(dq, k);
  M.leftCols(k - 1) = lp.B.transpose();
  M.col(k - 1).setOnes();

  DualVertexSet out;
  if (k > dq) {
    throw Error(ErrorCode::LpDegenerate,
                "dual feasible set has no vertices: d_p + 1 exceeds d_q");
  }
  const double count = binomial(dq, k);
  if (count > opts.enumeration_cap) {
    throw Error(ErrorCode::LpEnumCap,
                "vertex enumeration needs " + std::to_string(count) +
                    " subsets, above the cap; use an external enumerator such as lrs");
  }

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  Mat S(k, k);
  Vec r(k);
  do {
    ++out.subsets;
    for (int a = 0; a < k; ++a) {
      S.row(a) = M.row(idx[a]);
      r(a) = rhs(idx[a]);
    }
    Eigen::FullPivLU<Mat> lu(S);
    lu.setThreshold(1e-10);
    if (lu.rank() < k) continue;
    const Vec lambda = lu.solve(r);
    const Vec slack = M * lambda - rhs;
    if (slack.minCoeff() < -opts.tolerance) continue;
    const double resid = (S * lambda - r).cwiseAbs().maxCoeff();
    bool dup = false;
    for (const auto& v : out.vertices) {
      if ((v - lambda).cwiseAbs().maxCoeff() <= opts.tolerance) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    out.max_residual = std::max(out.max_residual, resid);
    out.vertices.push_back(lambda);
  } while (next_combination(idx, dq));

  if (out.vertices.empty()) {
    throw Error(ErrorCode::LpDegenerate,
                "no dual vertices found; the constraint matrix [B; 1'] is rank deficient or the "
                "dual is infeasible");
  }
  std::sort(out.vertices.begin(), out.vertices.end(), lex_less);
  return out;
}

namespace {

void merge_piece(std::vector<Piece>& out, Piece p, bool keep_max, double tol) {
  for (auto& q : out) {
    if ((q.coef - p.coef).cwiseAbs().maxCoeff() <= tol) {
      q.offset = keep_max ? std::max(q.offset, p.offset) : std::min(q.offset, p.offset);
      return;
    }
  }
  out.push_back(std::move(p));
}

}  // namespace

BoundsSpec lp_to_bounds_spec(const std::vector<LatentLp>& lps, const LpOptions& opts,
                             LpSpecSummary* summary) {
  if (lps.empty()) throw Error(ErrorCode::SpecInvalid, "no latent systems given");
  BoundsSpec spec;
  spec.dim_p = lps.front().dim_p();
  LpSpecSummary local;
  for (const auto& lp : lps) {
    lp.validate();
    if (lp.dim_p() != spec.dim_p) {
      throw Error(ErrorCode::DimensionMismatch, "latent systems disagree on d_p");
    }
    const int dp = lp.dim_p();
    for (int d = 0; d < lp.num_options(); ++d) {
      const Vec obj = lp.A.row(d).transpose();
      const DualVertexSet lo = dual_vertices(lp, -obj, opts);
      const DualVertexSet up = dual_vertices(lp, obj, opts);
      std::vector<Piece> lower, upper;
      for (const auto& v : lo.vertices) {
        merge_piece(lower, {-v(dp), -v.head(dp)}, true, opts.tolerance);
      }
      for (const auto& v : up.vertices) {
        merge_piece(upper, {v(dp), v.head(dp)}, false, opts.tolerance);
      }
      local.lower_vertices.push_back(static_cast<int>(lo.vertices.size()));
      local.upper_vertices.push_back(static_cast<int>(up.vertices.size()));
      spec.lower.push_back(std::move(lower));
      spec.upper.push_back(std::move(upper));
    }
  }
  spec.num_options = static_cast<int>(spec.lower.size());
  for (int d = 1; d < spec.num_options; ++d) {
    if (spec.lower[d].size() != spec.lower[0].size() ||
        spec.upper[d].size() != spec.upper[0].size()) {
      throw Error(ErrorCode::LpDegenerate,
                  "options yield different piece counts; the family is not rectangular");
    }
  }
  spec.validate(true);
  if (summary) *summary = local;
  return spec;
}

BoundsSpec lp_to_bounds_spec(const LatentLp& lp, const LpOptions& opts,
                             LpSpecSummary* summary) {
  return lp_to_bounds_spec(std::vector<LatentLp>{lp}, opts, summary);
}

namespace {

int free_index(int y, int d, int z) { return 3 * z + (y + 2 * d) - 1; }

}  // namespace

LatentLp balke_pearl_latent() {
  LatentLp lp;
  lp.A = Mat::Zero(1, 16);
  lp.B = Mat::Zero(6, 16);
  int t = 0;
  for (int y0 = 0; y0 < 2; ++y0) {
    for (int y1 = 0; y1 < 2; ++y1) {
      for (int d0 = 0; d0 < 2; ++d0) {
        for (int d1 = 0; d1 < 2; ++d1, ++t) {
          lp.A(0, t) = y1 - y0;
          for (int z = 0; z < 2; ++z) {
            const int d = z == 0 ? d0 : d1;
            const int y = d == 1 ? y1 : y0;
            if (y + d > 0) lp.B(free_index(y, d, z), t) = 1.0;
          }
        }
      }
    }
  }
  return lp;
}

LatentLp manski_latent(int option) {
  if (option != 0 && option != 1) throw Error(ErrorCode::ConfigInvalid, "option must be 0 or 1");
  LatentLp lp;
  lp.A = Mat::Zero(1, 18);
  lp.B = Mat::Zero(6, 18);
  int t = 0;
  for (int yd = 0; yd < 2; ++yd) {
    for (int c0 = 0; c0 < 3; ++c0) {
      for (int c1 = 0; c1 < 3; ++c1, ++t) {
        lp.A(0, t) = yd;
        for (int z = 0; z < 2; ++z) {
          const int c = z == 0 ? c0 : c1;
          const int d = c == 0 ? option : 1 - option;
          const int y = c == 0 ? yd : c - 1;
          if (y + d > 0) lp.B(free_index(y, d, z), t) = 1.0;
        }
      }
    }
  }
  return lp;
}

}  // namespace boundselect
