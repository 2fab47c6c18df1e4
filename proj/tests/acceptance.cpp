// Prints one PASS/FAIL line per acceptance check; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "boundselect/catalog.hpp"
#include "boundselect/ci.hpp"
#include "boundselect/lpbounds.hpp"
#include "boundselect/select.hpp"
#include "boundselect/sim.hpp"
#include "oracles.hpp"

using namespace boundselect;

namespace {

int failures = 0;

void report(bool ok, const std::string& id, const std::string& detail) {
  std::printf("%s %s %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const KindStats& stats(const DgpReport& d, CiKind kind) {
  for (const auto& k : d.kinds) {
    if (k.kind == kind) return k;
  }
  throw std::runtime_error("kind missing from report");
}

std::string config_path(const std::string& name) {
  return std::string(BOUNDSELECT_CONFIG_DIR) + "/" + name;
}

// Criteria 1, 2 and the containment half of 5 share one run.
void coverage_and_length() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_experiment_config(config_path("table1.json"));
  const ExperimentReport rep = run_experiment(cfg);
  const double elapsed = seconds_since(t0);
  std::printf("# table1: %ld reps x %zu dgps in %.1f s\n", cfg.reps, cfg.dgps.size(), elapsed);

  const double conv_target[3] = {0.95, 0.85, 0.95};
  const double proj_target[3] = {0.99, 0.96, 0.99};
  long violations = 0;
  for (int i = 0; i < 3; ++i) {
    const DgpReport& d = rep.dgps.at(i);
    const std::string tag = "1." + d.dgp.label;
    const double conv = stats(d, CiKind::Conventional).coverage;
    const double cond = stats(d, CiKind::Conditional).coverage;
    const double proj = stats(d, CiKind::Projection).coverage;
    const double hyb = stats(d, CiKind::Hybrid).coverage;
    report(std::abs(conv - conv_target[i]) <= 0.02 + 1e-12, tag + ".conventional",
           fmt("coverage=%.4f target=%.2f+-0.02", conv, conv_target[i]));
    report(std::abs(cond - 0.95) <= 0.015 + 1e-12, tag + ".conditional",
           fmt("coverage=%.4f target=0.95+-0.015", cond));
    report(std::abs(hyb - 0.95) <= 0.015 + 1e-12, tag + ".hybrid",
           fmt("coverage=%.4f target=0.95+-0.015", hyb));
    report(proj >= 0.945 && std::abs(proj - proj_target[i]) <= 0.02 + 1e-12, tag + ".projection",
           fmt("coverage=%.4f target=%.2f+-0.02 and >=0.945", proj, proj_target[i]));
    violations += stats(d, CiKind::Hybrid).containment_violations;
  }
  report(elapsed <= 600.0, "1.runtime", fmt("seconds=%.1f limit=600", elapsed));

  const auto& r1 = stats(rep.dgps[0], CiKind::Hybrid).ratio.values;
  const auto& r3 = stats(rep.dgps[2], CiKind::Hybrid).ratio.values;
  report(r1[2] <= 0.85, "2.calibrated.hybrid_median_ratio", fmt("ratio=%.4f limit=0.85", r1[2]));
  report(r3[2] <= 0.85, "2.informative.hybrid_median_ratio", fmt("ratio=%.4f limit=0.85", r3[2]));
  const auto& r2 = stats(rep.dgps[1], CiKind::Hybrid).ratio.values;
  double worst2 = 0.0;
  for (double v : r2) worst2 = std::max(worst2, v);
  report(worst2 <= 1.12, "2.uniform.hybrid_max_ratio", fmt("max_ratio=%.4f limit=1.12", worst2));
  double blowup = 0.0;
  for (const auto& d : rep.dgps) blowup = std::max(blowup, stats(d, CiKind::Conditional).ratio.values[4]);
  report(blowup > 1.5, "2.conditional_q95_ratio", fmt("max_over_dgps=%.4f threshold=1.5", blowup));

  report(violations == 0, "5.hybrid_projection_containment",
         fmt("violations=%.0f over %.0f replications", static_cast<double>(violations),
             3.0 * static_cast<double>(cfg.reps)));
}

void power() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_experiment_config(config_path("figure1.json"));
  const ExperimentReport rep = run_experiment(cfg);
  std::printf("# figure1: %ld reps in %.1f s\n", cfg.reps, seconds_since(t0));
  const DgpReport& d = rep.dgps.at(0);
  const double L = d.true_L(0), U = d.true_U(0), w = U - L;

  const BoundsSpec direct = lp_to_bounds_spec(balke_pearl_latent());
  const double dL = std::abs(direct.L(0, d.dgp.p_true) - L);
  const double dU = std::abs(direct.U(0, d.dgp.p_true) - U);
  report(std::max(dL, dU) <= 1e-12, "3.identified_interval",
         fmt("L=%.6f U=%.6f max_dev=%.2e", L, U, std::max(dL, dU)));

  double inside = 0.0, outside = 1.0;
  for (const auto& pt : d.power) {
    if (pt.w0 >= L - 1e-12 && pt.w0 <= U + 1e-12) inside = std::max(inside, pt.rate);
    if (std::abs(pt.w0 - (L - 2 * w)) < 1e-12 || std::abs(pt.w0 - (U + 2 * w)) < 1e-12) {
      outside = std::min(outside, pt.rate);
    }
  }
  report(inside <= cfg.alpha + 0.02, "3.power_inside", fmt("max_rejection=%.4f limit=%.2f", inside, cfg.alpha + 0.02));
  report(outside >= 0.9, "3.power_two_widths_out", fmt("min_rejection=%.4f limit=0.90", outside));
}

void oracles() {
  auto t0 = std::chrono::steady_clock::now();
  const auto tr = bst::truncation_oracle(200, 4001);
  double t = seconds_since(t0);
  report(tr.misclassified == 0 && t <= 60.0, "4a.truncation_bruteforce",
         fmt("misclassified=%.0f points=%.0f seconds=%.1f", static_cast<double>(tr.misclassified),
             static_cast<double>(tr.points), t));

  const std::pair<bst::RuleCase, const char*> rules[] = {
      {bst::RuleCase::MaxLower, "weighted_case1"}, {bst::RuleCase::MaxUpper, "weighted_case2"},
      {bst::RuleCase::Mixed, "weighted_case3"},    {bst::RuleCase::Cms1, "cms_m1"},
      {bst::RuleCase::Cms3, "cms_m3"}};
  std::uint64_t seed = 4100;
  for (const auto& [rule, name] : rules) {
    t0 = std::chrono::steady_clock::now();
    const auto st = bst::selection_oracle(rule, 1000, ++seed);
    t = seconds_since(t0);
    report(st.disagreements == 0 && t <= 60.0, std::string("4b.") + name,
           fmt("disagreements=%.0f checks=%.0f seconds=%.1f",
               static_cast<double>(st.disagreements), static_cast<double>(st.checks), t));
  }

  t0 = std::chrono::steady_clock::now();
  const auto lp = bst::lp_oracle(200, 4201);
  t = seconds_since(t0);
  report(lp.manski <= 1e-9 && lp.balke_pearl <= 1e-9 && t <= 60.0, "4c.lp_vs_closed_form",
         fmt("manski_dev=%.2e balke_pearl_dev=%.2e seconds=%.1f", lp.manski, lp.balke_pearl, t));

  t0 = std::chrono::steady_clock::now();
  const auto g = bst::gauss_oracle(1000, 4301);
  t = seconds_since(t0);
  report(g.max_residual <= 1e-8 && t <= 60.0, "4d.solver_roundtrip",
         fmt("max_residual=%.2e configurations=1000 seconds=%.1f", g.max_residual, t));
  report(g.critical_error <= 0.01, "4d.projection_1d_critical",
         fmt("abs_error=%.4f limit=0.01", g.critical_error));
}

void degeneracy() {
  BoundsSpec spec;
  spec.num_options = 1;
  spec.dim_p = 2;
  spec.lower = {{{0.0, Vec::Unit(2, 0)}}};
  spec.upper = {{{0.2, Vec::Unit(2, 1)}}};
  ReducedForm rf;
  rf.n = 400;
  rf.p_hat = Vec(2);
  rf.p_hat << 0.3, 0.5;
  rf.sigma_hat = Mat(2, 2);
  rf.sigma_hat << 0.21, -0.05, -0.05, 0.25;
  const SelectionOutcome sel = fixed_target(spec, rf, 0);
  const CiOptions opts;

  // Monte Carlo standard error of an order statistic at level q, in units of
  // the statistic: sqrt(q (1 - q) / draws) / phi(quantile).
  auto mc_se = [&](double q) {
    const double c = norm_quantile(q);
    return std::sqrt(q * (1 - q) / opts.draws) / (std::exp(-0.5 * c * c) / std::sqrt(2 * M_PI));
  };
  const double sd_L = std::sqrt(0.21 / 400.0), sd_U = std::sqrt(0.25 / 400.0);
  const ConfidenceInterval conv = conventional_ci(spec, rf, sel, opts);
  double worst = 0.0;
  bool ok = true;
  for (CiKind kind : {CiKind::Conditional, CiKind::Projection, CiKind::Hybrid}) {
    const ConfidenceInterval ci = compute_ci(kind, spec, rf, sel, opts);
    const double q = kind == CiKind::Hybrid ? 1.0 - opts.beta_lower() : 1.0 - opts.alpha1;
    const double tol_L = kind == CiKind::Conditional ? 1e-9 : 2.0 * mc_se(q) * sd_L;
    const double tol_U = kind == CiKind::Conditional ? 1e-9 : 2.0 * mc_se(q) * sd_U;
    const double dl = std::abs(ci.lower - conv.lower), du = std::abs(ci.upper - conv.upper);
    worst = std::max({worst, dl / sd_L, du / sd_U});
    ok = ok && dl <= tol_L && du <= tol_U;
  }
  report(ok, "5.no_selection_kinds_agree", fmt("max_dev_in_sd=%.4f", worst));
}

void determinism() {
  ExperimentConfig cfg = load_experiment_config(config_path("table1.json"));
  cfg.reps = 200;
  const auto a = run_experiment(cfg, 1);
  const auto b = run_experiment(cfg, 1);
  const auto c = run_experiment(cfg, 4);
  report(report_csv(a) == report_csv(b) && report_json(a) == report_json(b), "6.repeat_runs",
         "csv and json byte-identical");
  report(report_csv(a) == report_csv(c) && report_json(a) == report_json(c) &&
             report_dat(a) == report_dat(c),
         "6.thread_counts", "1 vs 4 threads byte-identical");
}

}  // namespace

int main() {
  try {
    oracles();
    degeneracy();
    determinism();
    power();
    coverage_and_length();
  } catch (const std::exception& e) {
    std::printf("FAIL aborted %s\n", e.what());
    return 1;
  }
  std::printf("# %d check(s) failed\n", failures);
  return failures ? 1 : 0;
}
