#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "boundselect/model.hpp"

namespace boundselect {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// N(mu, sigma2) truncated to [lower, upper]; either end may be infinite.
struct TruncatedNormal {
  double mu = 0.0;
  double sigma2 = 1.0;
  double lower = -kInf;
  double upper = kInf;

  void validate() const;
};

double norm_cdf(double x);
double norm_quantile(double p);

// log(Phi(y) - Phi(x)) for x < y, accurate deep in either tail.
double log_norm_diff(double x, double y);

double tn_cdf(double t, const TruncatedNormal& tn);

enum class Side { Lower, Upper };

struct SolveResult {
  double mu = 0.0;
  int iterations = 0;
  // Set when the root sits at a limit (an infinite value, or the edge of the
  // hybrid domain) because t lies on an edge of the window.
  bool at_limit = false;
};

struct SolverOptions {
  double initial_width = 10.0;   // in units of sigma
  double max_width = 1e12;       // in units of sigma
  double tolerance = 1e-8;
  // t within edge_snap * sigma of a window edge is treated as on the edge.
  double edge_snap = 1e-10;
};

// mu such that tn_cdf(t; mu, sigma2, lower, upper) = target. tn_cdf is
// strictly decreasing in mu, so the root is found by bisection on an
// expanding bracket.
SolveResult solve_location(double t, double target, double sigma2, double lower, double upper,
                           const SolverOptions& opts = {});

// Hybrid variant: for Side::Lower the upper edge is min(v_plus, mu + offset);
// for Side::Upper the lower edge is max(v_minus, mu - offset).
SolveResult solve_location_hybrid(double t, double target, double sigma2, double v_minus,
                                  double v_plus, double offset, Side side,
                                  const SolverOptions& opts = {});

// Sorted draws of max_i zeta_i / sqrt(cov_ii), zeta ~ N(0, cov).
class MaxStatDistribution {
 public:
  MaxStatDistribution(const Mat& cov, int draws, std::uint64_t seed);

  // Order statistic ceil(level * draws).
  double quantile(double level) const;
  int draws() const { return static_cast<int>(sorted_.size()); }
  std::uint64_t seed() const { return seed_; }

 private:
  std::vector<double> sorted_;
  std::uint64_t seed_;
};

double max_gauss_quantile(const Mat& cov, double level, int draws, std::uint64_t seed);

// Symmetric square root of a PSD matrix; eigenvalues below -1e-8 * trace
// raise Error(NotPsd), small negative ones are clamped to zero.
Mat psd_sqrt(const Mat& cov);

// draws x k matrix of standard normals for (k, draws, seed). Shared across
// callers so every critical value with the same seed uses common random
// numbers.
std::shared_ptr<const Mat> standard_normal_block(int k, int draws, std::uint64_t seed);

}  // namespace boundselect
