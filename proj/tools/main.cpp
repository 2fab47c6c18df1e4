#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boundselect/catalog.hpp"
#include "boundselect/ci.hpp"
#include "boundselect/error.hpp"
#include "boundselect/io.hpp"
#include "boundselect/lpbounds.hpp"
#include "boundselect/select.hpp"
#include "boundselect/sim.hpp"

using namespace boundselect;
using nlohmann::json;

namespace {

std::string hash_text(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json provenance(const json& config, std::uint64_t seed) {
  return {{"tool", "boundselect"},
          {"version", kToolVersion},
          {"config_hash", hash_text(config.dump())},
          {"seed", seed}};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

struct CiArgs {
  std::string catalog;
  std::string spec_path;
  std::string data_path;
  std::string rf_path;
  std::string rule = "maxlower";
  double w_L = 1.0;
  double w_U = 0.0;
  int target = 0;
  int m = 100;
  std::uint64_t cms_seed = 1;
  double alpha = 0.05;
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  double beta_frac = 0.1;
  int draws = 100000;
  std::uint64_t seed = 20240611;
  double smoothing = 0.0;
  long min_stratum = 5;
  double lambda_bar = 1e6;
  std::vector<std::string> kinds{"conventional", "conditional", "projection", "hybrid"};
  std::string out;
};

json ci_args_json(const CiArgs& a) {
  return {{"catalog", a.catalog},   {"spec", a.spec_path},        {"data", a.data_path},
          {"rf", a.rf_path},        {"rule", a.rule},             {"w_L", a.w_L},
          {"w_U", a.w_U},           {"target", a.target},         {"m", a.m},
          {"cms_seed", a.cms_seed}, {"alpha", a.alpha},           {"alpha1", a.alpha1.value_or(-1)},
          {"alpha2", a.alpha2.value_or(-1)}, {"beta_frac", a.beta_frac}, {"draws", a.draws},
          {"seed", a.seed},         {"smoothing", a.smoothing},   {"min_stratum", a.min_stratum},
          {"lambda_bar", a.lambda_bar}, {"kinds", a.kinds}};
}

int cmd_ci(const CiArgs& a) {
  if (a.catalog.empty() == a.spec_path.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "give exactly one of --catalog or --spec");
  }
  if (a.data_path.empty() == a.rf_path.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "give exactly one of --data or --rf");
  }
  const BoundsSpec spec = a.catalog.empty() ? spec_from_json(load_json(a.spec_path))
                                            : catalog_spec(a.catalog);
  spec.validate(true);

  ReducedForm rf;
  if (!a.rf_path.empty()) {
    rf = reduced_form_from_json(load_json(a.rf_path));
    rf.validate(a.lambda_bar);
  } else {
    EstimatorOptions eo{a.smoothing, a.min_stratum, a.lambda_bar};
    rf = spec.dim_p == 14 ? estimate_reduced_form_dyn(read_dyn_csv(a.data_path), eo)
                          : estimate_reduced_form(read_iv_csv(a.data_path), eo);
  }
  if (rf.p_hat.size() != spec.dim_p) {
    throw Error(ErrorCode::DimensionMismatch, "reduced form has length " +
                                                  std::to_string(rf.p_hat.size()) +
                                                  ", spec dim_p is " +
                                                  std::to_string(spec.dim_p));
  }

  CiOptions opts;
  opts.alpha1 = a.alpha1.value_or(a.alpha / 2.0);
  opts.alpha2 = a.alpha2.value_or(a.alpha / 2.0);
  opts.beta_frac = a.beta_frac;
  opts.draws = a.draws;
  opts.seed = a.seed;
  opts.validate();
  std::vector<CiKind> kinds;
  for (const auto& k : a.kinds) kinds.push_back(parse_ci_kind(k));

  std::vector<SelectionOutcome> selections;
  if (a.rule == "maxlower") {
    selections.push_back(rule_weighted(spec, rf, 1.0, 0.0));
  } else if (a.rule == "maxupper") {
    selections.push_back(rule_weighted(spec, rf, 0.0, 1.0));
  } else if (a.rule == "weighted") {
    selections.push_back(rule_weighted(spec, rf, a.w_L, a.w_U));
  } else if (a.rule == "fixed") {
    selections.push_back(fixed_target(spec, rf, a.target));
  } else if (a.rule == "undominated") {
    selections = rule_undominated(spec, rf);
  } else if (a.rule == "cms") {
    selections.push_back(rule_cms(difference_family(spec, 1, 0), spec, rf, a.m, a.cms_seed));
  } else {
    throw Error(ErrorCode::ConfigInvalid, "unknown rule '" + a.rule + "'");
  }

  const BoundEstimate est = estimate_bounds(spec, rf);
  json report;
  const json cfg = ci_args_json(a);
  report["provenance"] = provenance(cfg, a.seed);
  report["config"] = cfg;
  report["reduced_form"] = reduced_form_to_json(rf);
  report["estimates"] = {
      {"L_hat", std::vector<double>(est.L_hat.data(), est.L_hat.data() + est.L_hat.size())},
      {"U_hat", std::vector<double>(est.U_hat.data(), est.U_hat.data() + est.U_hat.size())},
      {"j_L", est.j_L},
      {"j_U", est.j_U}};
  report["selections"] = json::array();
  for (const auto& sel : selections) {
    assert_realized(sel, rf.p_hat);
    json sj;
    sj["selection"] = selection_to_json(sel);
    sj["intervals"] = json::array();
    for (CiKind k : kinds) sj["intervals"].push_back(interval_to_json(compute_ci(k, spec, rf, sel, opts)));
    report["selections"].push_back(sj);
  }
  emit(a.out, report.dump(2) + "\n");
  return 0;
}

struct SimArgs {
  std::string config;
  std::optional<long> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::string out_prefix;
  int threads = 0;
};

int cmd_simulate(const SimArgs& a) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.reps) cfg.reps = *a.reps;
  if (a.seed) cfg.seed = *a.seed;
  if (a.draws) cfg.draws = *a.draws;
  const ExperimentReport rep = run_experiment(cfg, a.threads > 0 ? a.threads : default_threads());
  const std::string prefix = a.out_prefix.empty() ? cfg.name : a.out_prefix;
  write_text_file(prefix + ".csv", report_csv(rep));
  write_text_file(prefix + ".json", report_json(rep));
  write_text_file(prefix + ".dat", report_dat(rep));
  std::cerr << "simulate: wrote " << prefix << ".{csv,json,dat} in " << rep.runtime_seconds
            << " s\n";
  return 0;
}

struct LpArgs {
  std::string lp;
  std::string out;
  double cap = 2e6;
};

int cmd_lp2spec(const LpArgs& a) {
  const json input = load_json(a.lp);
  const LatentLp lp = latent_lp_from_json(input);
  LpOptions opts;
  opts.enumeration_cap = a.cap;
  LpSpecSummary summary;
  const BoundsSpec spec = lp_to_bounds_spec(lp, opts, &summary);
  json out = spec_to_json(spec);
  out["provenance"] = provenance(input, 0);
  out["vertex_counts"] = {{"lower", summary.lower_vertices}, {"upper", summary.upper_vertices}};
  emit(a.out, out.dump(2) + "\n");
  return 0;
}

struct ValidateArgs {
  std::string spec;
  std::string catalog;
  std::string rf;
  std::string lp;
  std::string config;
  double lambda_bar = 1e6;
};

int cmd_validate(const ValidateArgs& a) {
  json report{{"valid", true}, {"checked", json::array()}};
  if (!a.catalog.empty()) {
    catalog_spec(a.catalog).validate();
    report["checked"].push_back("catalog " + a.catalog);
  }
  if (!a.spec.empty()) {
    spec_from_json(load_json(a.spec)).validate(true);
    report["checked"].push_back("spec " + a.spec);
  }
  if (!a.rf.empty()) {
    reduced_form_from_json(load_json(a.rf)).validate(a.lambda_bar);
    report["checked"].push_back("reduced form " + a.rf);
  }
  if (!a.lp.empty()) {
    latent_lp_from_json(load_json(a.lp));
    report["checked"].push_back("latent lp " + a.lp);
  }
  if (!a.config.empty()) {
    load_experiment_config(a.config).validate();
    report["checked"].push_back("config " + a.config);
  }
  if (report["checked"].empty()) throw Error(ErrorCode::ConfigInvalid, "nothing to validate");
  std::cout << report.dump(2) << "\n";
  return 0;
}

int fail(const char* code, const std::string& message, int status) {
  std::cerr << json{{"error", code}, {"message", message}, {"exit_status", status}}.dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence intervals for selected interval-identified parameters"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CiArgs ci;
  auto* ci_cmd = app.add_subcommand("ci", "Compute intervals from data and a bounds spec");
  ci_cmd->add_option("--catalog", ci.catalog, "Catalog spec name")
      ->check(CLI::IsMember({"manski-binary", "manski-continuous", "balke-pearl", "dyntreat"}));
  ci_cmd->add_option("--spec", ci.spec_path, "Bounds spec JSON");
  ci_cmd->add_option("--data", ci.data_path, "CSV with y,d,z (or y1,y2,d1,d2,z)");
  ci_cmd->add_option("--rf", ci.rf_path, "Reduced form JSON instead of data");
  ci_cmd->add_option("--rule", ci.rule, "maxlower|maxupper|weighted|fixed|undominated|cms");
  ci_cmd->add_option("--w-L", ci.w_L, "Weight on the lower bound");
  ci_cmd->add_option("--w-U", ci.w_U, "Weight on the upper bound");
  ci_cmd->add_option("--target", ci.target, "Option for --rule fixed");
  ci_cmd->add_option("--m", ci.m, "Perturbation draws for --rule cms");
  ci_cmd->add_option("--cms-seed", ci.cms_seed, "Seed for --rule cms");
  ci_cmd->add_option("--alpha", ci.alpha, "Overall level, split evenly across sides");
  ci_cmd->add_option("--alpha1", ci.alpha1, "Lower-side level");
  ci_cmd->add_option("--alpha2", ci.alpha2, "Upper-side level");
  ci_cmd->add_option("--beta-frac", ci.beta_frac, "Hybrid beta as a fraction of alpha");
  ci_cmd->add_option("--draws", ci.draws, "Monte Carlo draws for critical values");
  ci_cmd->add_option("--seed", ci.seed, "Seed for critical values");
  ci_cmd->add_option("--smoothing", ci.smoothing, "Cell-count smoothing");
  ci_cmd->add_option("--min-stratum", ci.min_stratum, "Minimum observations per stratum");
  ci_cmd->add_option("--lambda-bar", ci.lambda_bar, "Eigenvalue bound for the covariance");
  ci_cmd->add_option("--kinds", ci.kinds, "Interval kinds")->delimiter(',');
  ci_cmd->add_option("--out", ci.out, "Output JSON path (default stdout)");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
  sim_cmd->add_option("--config", sim.config, "Experiment config JSON")->required();
  sim_cmd->add_option("--reps", sim.reps, "Override replications");
  sim_cmd->add_option("--seed", sim.seed, "Override master seed");
  sim_cmd->add_option("--draws", sim.draws, "Override critical-value draws");
  sim_cmd->add_option("--out-prefix", sim.out_prefix, "Output path prefix");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (default BOUNDSELECT_THREADS or cores)");

  LpArgs lp;
  auto* lp_cmd = app.add_subcommand("lp2spec", "Convert a latent LP into a bounds spec");
  lp_cmd->add_option("--lp", lp.lp, "Latent LP JSON {A, B}")->required();
  lp_cmd->add_option("--out", lp.out, "Output JSON path (default stdout)");
  lp_cmd->add_option("--cap", lp.cap, "Maximum number of enumerated subsets");

  ValidateArgs va;
  auto* va_cmd = app.add_subcommand("validate", "Validate input files");
  va_cmd->add_option("--spec", va.spec);
  va_cmd->add_option("--catalog", va.catalog);
  va_cmd->add_option("--rf", va.rf);
  va_cmd->add_option("--lp", va.lp);
  va_cmd->add_option("--config", va.config);
  va_cmd->add_option("--lambda-bar", va.lambda_bar);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fail("CONFIG_INVALID", e.what(), 2);
  }

  try {
    if (*ci_cmd) return cmd_ci(ci);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*lp_cmd) return cmd_lp2spec(lp);
    if (*va_cmd) return cmd_validate(va);
  } catch (const Error& e) {
    return fail(e.code_name(), e.what(), is_numerical(e.code()) ? 3 : 2);
  } catch (const std::exception& e) {
    return fail("INTERNAL", e.what(), 3);
  }
  return 0;
}
