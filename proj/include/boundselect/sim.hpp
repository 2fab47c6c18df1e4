#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boundselect/catalog.hpp"
#include "boundselect/ci.hpp"
#include "boundselect/rng.hpp"

namespace boundselect {

// Binary-IV data generating process: Z ~ Bernoulli(q_z), then (Y, D) given
// Z = z from the stratum's four cells (residual cell p^{00z}).
struct Dgp {
  std::string label;
  Vec p_true;
  double q_z = 0.5;
  long n = 100;

  void validate() const;
};

std::vector<IvRecord> sample(const Dgp& dgp, Rng& rng);

struct RuleConfig {
  RuleKind kind = RuleKind::Weighted;
  double w_L = 1.0;
  double w_U = 0.0;
  int target = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string spec = "manski-binary";
  RuleConfig rule;
  std::vector<CiKind> kinds{CiKind::Conventional, CiKind::Conditional, CiKind::Projection,
                            CiKind::Hybrid};
  double alpha = 0.05;
  long reps = 2000;
  std::uint64_t seed = 1;
  double smoothing = 0.01;
  long min_stratum = 5;
  int draws = 100000;
  double beta_frac = 0.1;
  std::vector<Dgp> dgps;
  // Power experiment: null values tested with the hybrid interval.
  bool power = false;
  std::vector<double> w0_grid;
  bool auto_grid = true;

  void validate() const;
  CiOptions ci_options() const;
};

struct Quantiles {
  static constexpr double kLevels[5] = {0.05, 0.25, 0.50, 0.75, 0.95};
  double values[5] = {0, 0, 0, 0, 0};
};

struct KindStats {
  CiKind kind = CiKind::Conventional;
  long valid = 0;
  long covered = 0;
  long crossed = 0;
  double coverage = 0.0;
  double coverage_se = 0.0;
  // Coverage among replications selecting option d.
  std::vector<long> selected;
  std::vector<long> selected_covered;
  Quantiles length;
  Quantiles ratio;
  long containment_violations = 0;
};

struct PowerPoint {
  double w0 = 0.0;
  long rejections = 0;
  double rate = 0.0;
  double se = 0.0;
};

struct DgpReport {
  Dgp dgp;
  Vec true_L;
  Vec true_U;
  long failures = 0;
  std::string first_failure;
  std::vector<KindStats> kinds;
  std::vector<PowerPoint> power;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string config_hash;
  std::vector<DgpReport> dgps;
  double runtime_seconds = 0.0;
};

int default_threads();

ExperimentReport run_experiment(const ExperimentConfig& cfg, int threads = 0);

// Provenance-headed outputs; byte-identical for identical configurations.
std::string report_csv(const ExperimentReport& rep);
std::string report_json(const ExperimentReport& rep);
// Gnuplot-friendly blocks: length ratios by quantile, or the power curve.
std::string report_dat(const ExperimentReport& rep);

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace boundselect
