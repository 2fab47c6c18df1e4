#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "boundselect/condition.hpp"
#include "boundselect/gauss.hpp"
#include "boundselect/select.hpp"

namespace boundselect {

enum class CiKind { Conventional, Conditional, Projection, Hybrid };

const char* ci_kind_name(CiKind kind);
CiKind parse_ci_kind(const std::string& name);

struct CiOptions {
  double alpha1 = 0.025;
  double alpha2 = 0.025;
  // Per side, beta = beta_frac * 2 * alpha_side.
  double beta_frac = 0.1;
  int draws = 100000;
  std::uint64_t seed = 20240611;
  SolverOptions solver;

  void validate() const;
  double beta_lower() const { return beta_frac * 2.0 * alpha1; }
  double beta_upper() const { return beta_frac * 2.0 * alpha2; }
};

struct SideDiagnostics {
  double estimate = 0.0;
  double s_obs = 0.0;
  double var_s = 0.0;
  ConditioningWindow window{-kInf, kInf, kInf};
  double critical = 0.0;
  double target = 0.0;
  int iterations = 0;
  bool at_limit = false;
};

struct ConfidenceInterval {
  CiKind kind = CiKind::Conventional;
  double lower = -kInf;
  double upper = kInf;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta_L = 0.0;
  double beta_U = 0.0;
  SideDiagnostics diag_L;
  SideDiagnostics diag_U;
  int draws = 0;
  std::uint64_t seed = 0;
  // Hybrid only: whether the endpoints stay inside the level-beta projection
  // interval.
  bool projection_contained = true;

  bool crossed() const { return lower > upper; }
  bool covers(double lo, double hi) const { return !crossed() && lower <= lo && hi <= upper; }
  double length() const { return upper - lower; }
};

ConfidenceInterval conventional_ci(const BoundsSpec& spec, const ReducedForm& rf,
                                   const SelectionOutcome& sel, const CiOptions& opts = {});
ConfidenceInterval conditional_ci(const BoundsSpec& spec, const ReducedForm& rf,
                                  const SelectionOutcome& sel, const CiOptions& opts = {});
ConfidenceInterval projection_ci(const BoundsSpec& spec, const ReducedForm& rf,
                                 const SelectionOutcome& sel, const CiOptions& opts = {});
ConfidenceInterval hybrid_ci(const BoundsSpec& spec, const ReducedForm& rf,
                             const SelectionOutcome& sel, const CiOptions& opts = {});

ConfidenceInterval compute_ci(CiKind kind, const BoundsSpec& spec, const ReducedForm& rf,
                              const SelectionOutcome& sel, const CiOptions& opts = {});

// Covariance of sqrt(n) times the stacked lower (or upper) pieces, rows
// ordered d * J + j.
Mat stacked_covariance(const BoundsSpec& spec, const Mat& sigma, Side side);

// Max-statistic distribution for a covariance, memoized on content so that
// projection and hybrid intervals share one simulation. Safe for concurrent
// use.
std::shared_ptr<const MaxStatDistribution> max_stat_distribution(const Mat& cov, int draws,
                                                                 std::uint64_t seed);

}  // namespace boundselect
