#include "boundselect/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "boundselect/error.hpp"

namespace boundselect {

using nlohmann::json;

void Dgp::validate() const {
  if (p_true.size() != 6) {
    throw Error(ErrorCode::ConfigInvalid, "dgp '" + label + "' needs a 6-vector p");
  }
  if (!(q_z >= 0.0 && q_z <= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "dgp '" + label + "' needs q_z in [0,1]");
  }
  if (n < 1) throw Error(ErrorCode::ConfigInvalid, "dgp '" + label + "' needs n >= 1");
  for (int z = 0; z < 2; ++z) {
    const Vec cells = p_true.segment(3 * z, 3);
    if (cells.minCoeff() < 0.0 || cells.sum() > 1.0 + 1e-12) {
      throw Error(ErrorCode::ConfigInvalid, "dgp '" + label + "' stratum z=" +
                                                std::to_string(z) +
                                                " is not a probability vector");
    }
  }
}

std::vector<IvRecord> sample(const Dgp& dgp, Rng& rng) {
  std::vector<IvRecord> data(dgp.n);
  for (auto& r : data) {
    r.z = rng.bernoulli(dgp.q_z) ? 1 : 0;
    const double u = rng.uniform();
    // Cells in order (y,d) = (1,0), (0,1), (1,1); the remainder is (0,0).
    double acc = 0.0;
    int cell = 0;
    for (int c = 1; c <= 3; ++c) {
      acc += dgp.p_true(3 * r.z + c - 1);
      if (u < acc) {
        cell = c;
        break;
      }
    }
    r.y = cell & 1;
    r.d = cell >> 1;
  }
  return data;
}

void ExperimentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::ConfigInvalid, "alpha must lie in (0,1)");
  if (reps < 1) throw Error(ErrorCode::ConfigInvalid, "reps must be >= 1");
  if (dgps.empty()) throw Error(ErrorCode::ConfigInvalid, "config lists no dgps");
  if (kinds.empty() && !power) throw Error(ErrorCode::ConfigInvalid, "config lists no kinds");
  for (const auto& d : dgps) d.validate();
  ci_options().validate();
  const BoundsSpec s = catalog_spec(spec);
  if (s.dim_p != 6) {
    throw Error(ErrorCode::ConfigInvalid, "simulation needs a binary-IV spec (dim_p = 6)");
  }
  if (rule.kind == RuleKind::Fixed && (rule.target < 0 || rule.target >= s.num_options)) {
    throw Error(ErrorCode::ConfigInvalid, "fixed target out of range");
  }
  if (rule.kind != RuleKind::Fixed && rule.kind != RuleKind::Weighted) {
    throw Error(ErrorCode::ConfigInvalid, "simulation supports weighted and fixed rules");
  }
}

CiOptions ExperimentConfig::ci_options() const {
  CiOptions o;
  o.alpha1 = alpha / 2.0;
  o.alpha2 = alpha / 2.0;
  o.beta_frac = beta_frac;
  o.draws = draws;
  o.seed = derive_seed(seed, 0xC217ULL);
  return o;
}

int default_threads() {
  if (const char* env = std::getenv("BOUNDSELECT_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct KindResult {
  double lower = 0.0;
  double upper = 0.0;
  bool covered = false;
  bool contained = true;
};

struct RepResult {
  bool ok = false;
  std::string error;
  int d_hat = 0;
  std::vector<KindResult> kinds;
  std::vector<bool> reject;
};

double quantile7(const std::vector<double>& sorted, double level) {
  if (sorted.empty()) return std::nan("");
  const double h = (sorted.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  if (std::isinf(sorted[lo]) || std::isinf(sorted[hi])) return sorted[hi];
  return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

std::vector<double> power_grid(const ExperimentConfig& cfg, double L, double U) {
  std::vector<double> grid = cfg.w0_grid;
  if (cfg.auto_grid) {
    const double w = U - L;
    for (double v : {L - 2 * w, L - w, L, 0.5 * (L + U), U, U + w, U + 2 * w}) grid.push_back(v);
  }
  return grid;
}

DgpReport run_dgp(const ExperimentConfig& cfg, std::size_t index, int threads) {
  const BoundsSpec spec = catalog_spec(cfg.spec);
  const CiOptions opts = cfg.ci_options();
  DgpReport report;
  report.dgp = cfg.dgps[index];
  const Dgp& dgp = report.dgp;
  const BoundEstimate truth = estimate_bounds(spec, dgp.p_true);
  report.true_L = truth.L_hat;
  report.true_U = truth.U_hat;

  const int target = cfg.rule.kind == RuleKind::Fixed ? cfg.rule.target : 0;
  const std::vector<double> grid =
      cfg.power ? power_grid(cfg, truth.L_hat(target), truth.U_hat(target)) : std::vector<double>{};

  EstimatorOptions est;
  est.smoothing = cfg.smoothing;
  est.min_stratum = cfg.min_stratum;
  const std::uint64_t stream = derive_seed(cfg.seed, index);

  auto replicate = [&](long rep) {
    RepResult out;
    try {
      Rng rng(derive_seed(stream, static_cast<std::uint64_t>(rep)));
      const ReducedForm rf = estimate_reduced_form(sample(dgp, rng), est);
      const SelectionOutcome sel = cfg.rule.kind == RuleKind::Fixed
                                       ? fixed_target(spec, rf, cfg.rule.target)
                                       : rule_weighted(spec, rf, cfg.rule.w_L, cfg.rule.w_U);
      assert_realized(sel, rf.p_hat);
      out.d_hat = sel.d_hat;
      const double lo_true = truth.L_hat(sel.d_hat);
      const double hi_true = truth.U_hat(sel.d_hat);
      for (CiKind kind : cfg.kinds) {
        const ConfidenceInterval ci = compute_ci(kind, spec, rf, sel, opts);
        out.kinds.push_back({ci.lower, ci.upper, ci.covers(lo_true, hi_true),
                             ci.projection_contained});
      }
      if (!grid.empty()) {
        const ConfidenceInterval ci = hybrid_ci(spec, rf, sel, opts);
        for (double w0 : grid) {
          out.reject.push_back(ci.crossed() || w0 < ci.lower || w0 > ci.upper);
        }
      }
      out.ok = true;
    } catch (const Error& e) {
      out.ok = false;
      out.error = std::string(e.code_name()) + ": " + e.what();
    }
    return out;
  };

  std::vector<RepResult> results(cfg.reps);
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long r = next++; r < cfg.reps; r = next++) results[r] = replicate(r);
  };
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(cfg.reps)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& r : results) {
    if (!r.ok) {
      if (report.failures == 0) report.first_failure = r.error;
      ++report.failures;
    }
  }
  if (report.failures * 100 > cfg.reps) {
    throw Error(ErrorCode::ReplicationFailures,
                "dgp '" + dgp.label + "': " + std::to_string(report.failures) + " of " +
                    std::to_string(cfg.reps) + " replications failed; first: " +
                    report.first_failure);
  }

  std::vector<std::vector<double>> lengths(cfg.kinds.size());
  for (std::size_t k = 0; k < cfg.kinds.size(); ++k) {
    KindStats ks;
    ks.kind = cfg.kinds[k];
    ks.selected.assign(spec.num_options, 0);
    ks.selected_covered.assign(spec.num_options, 0);
    for (const auto& r : results) {
      if (!r.ok) continue;
      const KindResult& kr = r.kinds[k];
      ++ks.valid;
      ++ks.selected[r.d_hat];
      if (kr.covered) {
        ++ks.covered;
        ++ks.selected_covered[r.d_hat];
      }
      if (kr.lower > kr.upper) {
        ++ks.crossed;
      } else {
        lengths[k].push_back(kr.upper - kr.lower);
      }
      if (!kr.contained) ++ks.containment_violations;
    }
    ks.coverage = ks.valid ? static_cast<double>(ks.covered) / ks.valid : 0.0;
    ks.coverage_se = ks.valid ? std::sqrt(ks.coverage * (1.0 - ks.coverage) / ks.valid) : 0.0;
    std::sort(lengths[k].begin(), lengths[k].end());
    for (int q = 0; q < 5; ++q) ks.length.values[q] = quantile7(lengths[k], Quantiles::kLevels[q]);
    report.kinds.push_back(ks);
  }
  const auto proj = std::find(cfg.kinds.begin(), cfg.kinds.end(), CiKind::Projection);
  for (auto& ks : report.kinds) {
    for (int q = 0; q < 5; ++q) {
      ks.ratio.values[q] = proj == cfg.kinds.end()
                               ? std::nan("")
                               : ks.length.values[q] /
                                     report.kinds[proj - cfg.kinds.begin()].length.values[q];
    }
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    PowerPoint pt;
    pt.w0 = grid[g];
    long valid = 0;
    for (const auto& r : results) {
      if (!r.ok) continue;
      ++valid;
      if (r.reject[g]) ++pt.rejections;
    }
    pt.rate = valid ? static_cast<double>(pt.rejections) / valid : 0.0;
    pt.se = valid ? std::sqrt(pt.rate * (1.0 - pt.rate) / valid) : 0.0;
    report.power.push_back(pt);
  }
  return report;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["spec"] = c.spec;
  json rule;
  rule["type"] = rule_name(c.rule.kind);
  if (c.rule.kind == RuleKind::Fixed) {
    rule["target"] = c.rule.target;
  } else {
    rule["w_L"] = c.rule.w_L;
    rule["w_U"] = c.rule.w_U;
  }
  j["rule"] = rule;
  j["kinds"] = json::array();
  for (CiKind k : c.kinds) j["kinds"].push_back(ci_kind_name(k));
  j["alpha"] = c.alpha;
  j["reps"] = c.reps;
  j["seed"] = c.seed;
  j["smoothing"] = c.smoothing;
  j["min_stratum"] = c.min_stratum;
  j["draws"] = c.draws;
  j["beta_frac"] = c.beta_frac;
  j["dgps"] = json::array();
  for (const auto& d : c.dgps) {
    j["dgps"].push_back({{"label", d.label},
                         {"p", std::vector<double>(d.p_true.data(), d.p_true.data() + 6)},
                         {"q_z", d.q_z},
                         {"n", d.n}});
  }
  if (c.power) j["power"] = {{"w0_grid", c.w0_grid}, {"auto_grid", c.auto_grid}};
  return j;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json num_json(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (threads <= 0) threads = default_threads();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg;
  rep.config_hash = fnv1a_hex(config_to_json(cfg).dump());
  for (std::size_t i = 0; i < cfg.dgps.size(); ++i) rep.dgps.push_back(run_dgp(cfg, i, threads));
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "# boundselect " << kToolVersion << " config_hash=" << rep.config_hash
     << " seed=" << rep.config.seed << "\n";
  os << "experiment,dgp,kind,metric,level,value,se\n";
  const std::string& name = rep.config.name;
  for (const auto& d : rep.dgps) {
    auto row = [&](const std::string& kind, const std::string& metric, const std::string& level,
                   double value, double se) {
      os << name << ',' << d.dgp.label << ',' << kind << ',' << metric << ',' << level << ','
         << num(value) << ',' << num(se) << '\n';
    };
    for (int k = 0; k < d.true_L.size(); ++k) {
      row("truth", "identified_lower", std::to_string(k), d.true_L(k), 0.0);
      row("truth", "identified_upper", std::to_string(k), d.true_U(k), 0.0);
    }
    row("all", "failures", "", static_cast<double>(d.failures), 0.0);
    for (const auto& ks : d.kinds) {
      const std::string kn = ci_kind_name(ks.kind);
      row(kn, "coverage", "", ks.coverage, ks.coverage_se);
      row(kn, "crossed", "", static_cast<double>(ks.crossed), 0.0);
      for (std::size_t o = 0; o < ks.selected.size(); ++o) {
        const double f = ks.selected[o] ? static_cast<double>(ks.selected_covered[o]) /
                                              ks.selected[o]
                                        : std::nan("");
        const double se = ks.selected[o] ? std::sqrt(f * (1 - f) / ks.selected[o]) : std::nan("");
        row(kn, "conditional_coverage", std::to_string(o), f, se);
      }
      for (int q = 0; q < 5; ++q) {
        row(kn, "length_quantile", num(Quantiles::kLevels[q]), ks.length.values[q], 0.0);
      }
      for (int q = 0; q < 5; ++q) {
        row(kn, "length_ratio", num(Quantiles::kLevels[q]), ks.ratio.values[q], 0.0);
      }
      if (ks.kind == CiKind::Hybrid) {
        row(kn, "containment_violations", "", static_cast<double>(ks.containment_violations), 0.0);
      }
    }
    for (const auto& pt : d.power) row("hybrid", "rejection", num(pt.w0), pt.rate, pt.se);
  }
  return os.str();
}

std::string report_json(const ExperimentReport& rep) {
  json j;
  j["provenance"] = {{"tool", "boundselect"},
                     {"version", kToolVersion},
                     {"config_hash", rep.config_hash},
                     {"seed", rep.config.seed}};
  j["config"] = config_to_json(rep.config);
  j["dgps"] = json::array();
  for (const auto& d : rep.dgps) {
    json dj;
    dj["label"] = d.dgp.label;
    dj["n"] = d.dgp.n;
    dj["identified_lower"] = std::vector<double>(d.true_L.data(), d.true_L.data() + d.true_L.size());
    dj["identified_upper"] = std::vector<double>(d.true_U.data(), d.true_U.data() + d.true_U.size());
    dj["failures"] = d.failures;
    if (d.failures) dj["first_failure"] = d.first_failure;
    dj["kinds"] = json::array();
    for (const auto& ks : d.kinds) {
      json kj;
      kj["kind"] = ci_kind_name(ks.kind);
      kj["replications"] = ks.valid;
      kj["coverage"] = ks.coverage;
      kj["coverage_se"] = ks.coverage_se;
      kj["crossed"] = ks.crossed;
      kj["selected"] = ks.selected;
      kj["selected_covered"] = ks.selected_covered;
      kj["length_quantiles"] = json::array();
      kj["length_ratios"] = json::array();
      for (int q = 0; q < 5; ++q) {
        kj["length_quantiles"].push_back(num_json(ks.length.values[q]));
        kj["length_ratios"].push_back(num_json(ks.ratio.values[q]));
      }
      if (ks.kind == CiKind::Hybrid) kj["containment_violations"] = ks.containment_violations;
      dj["kinds"].push_back(kj);
    }
    if (!d.power.empty()) {
      dj["power"] = json::array();
      for (const auto& pt : d.power) {
        dj["power"].push_back({{"w0", pt.w0}, {"rejection", pt.rate}, {"se", pt.se}});
      }
    }
    j["dgps"].push_back(dj);
  }
  j["quantile_levels"] = std::vector<double>(std::begin(Quantiles::kLevels), std::end(Quantiles::kLevels));
  return j.dump(2) + "\n";
}

std::string report_dat(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "# boundselect " << kToolVersion << " config_hash=" << rep.config_hash
     << " seed=" << rep.config.seed << "\n";
  for (const auto& d : rep.dgps) {
    os << "# dgp " << d.dgp.label << "\n";
    if (!d.power.empty()) {
      os << "# w0 rejection se\n";
      for (const auto& pt : d.power) os << num(pt.w0) << ' ' << num(pt.rate) << ' ' << num(pt.se) << "\n";
    } else {
      os << "# quantile";
      for (const auto& ks : d.kinds) os << ' ' << ci_kind_name(ks.kind);
      os << "\n";
      for (int q = 0; q < 5; ++q) {
        os << num(Quantiles::kLevels[q]);
        for (const auto& ks : d.kinds) os << ' ' << num(ks.ratio.values[q]);
        os << "\n";
      }
    }
    os << "\n\n";
  }
  return os.str();
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::JsonParse, std::string("experiment config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    c.spec = j.value("spec", c.spec);
    if (j.contains("rule")) {
      const json& r = j["rule"];
      const std::string type = r.value("type", std::string("weighted"));
      if (type == "weighted") {
        c.rule.kind = RuleKind::Weighted;
        c.rule.w_L = r.value("w_L", 1.0);
        c.rule.w_U = r.value("w_U", 0.0);
      } else if (type == "maxlower") {
        c.rule = {RuleKind::Weighted, 1.0, 0.0, 0};
      } else if (type == "maxupper") {
        c.rule = {RuleKind::Weighted, 0.0, 1.0, 0};
      } else if (type == "fixed") {
        c.rule.kind = RuleKind::Fixed;
        c.rule.target = r.value("target", 0);
      } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown rule type '" + type + "'");
      }
    }
    if (j.contains("kinds")) {
      c.kinds.clear();
      for (const auto& k : j["kinds"]) c.kinds.push_back(parse_ci_kind(k.get<std::string>()));
    }
    c.alpha = j.value("alpha", c.alpha);
    c.reps = j.value("reps", c.reps);
    c.seed = j.value("seed", c.seed);
    c.smoothing = j.value("smoothing", c.smoothing);
    c.min_stratum = j.value("min_stratum", c.min_stratum);
    c.draws = j.value("draws", c.draws);
    c.beta_frac = j.value("beta_frac", c.beta_frac);
    for (const auto& d : j.at("dgps")) {
      Dgp dgp;
      dgp.label = d.value("label", std::string("dgp") + std::to_string(c.dgps.size() + 1));
      const auto p = d.at("p").get<std::vector<double>>();
      dgp.p_true = Eigen::Map<const Vec>(p.data(), static_cast<Eigen::Index>(p.size()));
      dgp.q_z = d.value("q_z", 0.5);
      dgp.n = d.value("n", 100L);
      c.dgps.push_back(dgp);
    }
    if (j.contains("power")) {
      c.power = true;
      const json& p = j["power"];
      c.w0_grid = p.value("w0_grid", std::vector<double>{});
      c.auto_grid = p.value("auto_grid", true);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("experiment config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace boundselect
