#include "doctest.h"

#include <algorithm>

#include "boundselect/error.hpp"
#include "boundselect/sim.hpp"
#include "support.hpp"

using namespace boundselect;

namespace {

ExperimentConfig small_config() {
  return parse_experiment_config(R"({
    "name": "small", "spec": "manski-binary",
    "rule": {"type": "maxlower"},
    "reps": 60, "seed": 7, "draws": 2000,
    "dgps": [{"label": "cal", "p": [0.08, 0.001, 0.001, 0.073, 0.139, 0.473]},
             {"label": "uni", "p": [0.25, 0.25, 0.25, 0.25, 0.25, 0.25], "n": 80}]
  })");
}

}  // namespace

TEST_CASE("sampler reproduces cell frequencies") {
  Dgp dgp;
  dgp.p_true = bst::kCalibrated;
  dgp.n = 200000;
  Rng rng(71);
  const auto data = sample(dgp, rng);
  REQUIRE(data.size() == 200000u);
  std::array<std::array<double, 4>, 2> counts{};
  std::array<double, 2> nz{};
  for (const auto& r : data) {
    counts[r.z][r.y + 2 * r.d] += 1.0;
    nz[r.z] += 1.0;
  }
  CHECK(nz[1] / 200000.0 == doctest::Approx(0.5).epsilon(0.01));
  for (int z = 0; z < 2; ++z) {
    for (int c = 1; c < 4; ++c) {
      CHECK(std::abs(counts[z][c] / nz[z] - dgp.p_true(3 * z + c - 1)) < 0.005);
    }
  }
}

TEST_CASE("identical configurations give byte-identical reports across thread counts") {
  const ExperimentConfig cfg = small_config();
  const auto one = run_experiment(cfg, 1);
  const auto four = run_experiment(cfg, 4);
  CHECK(report_csv(one) == report_csv(four));
  CHECK(report_json(one) == report_json(four));
  CHECK(report_dat(one) == report_dat(four));
  ExperimentConfig other = cfg;
  other.seed = 8;
  CHECK(report_csv(run_experiment(other, 2)) != report_csv(one));
}

TEST_CASE("reports carry a provenance header and truth values") {
  const auto rep = run_experiment(small_config(), 2);
  const std::string csv = report_csv(rep);
  CHECK(csv.rfind("# boundselect 0.1.0 config_hash=", 0) == 0);
  CHECK(csv.find("seed=7") != std::string::npos);
  CHECK(csv.find("experiment,dgp,kind,metric,level,value,se") != std::string::npos);
  REQUIRE(rep.dgps.size() == 2);
  const auto& cal = rep.dgps[0];
  CHECK(cal.true_L(1) == doctest::Approx(0.473));
  CHECK(cal.kinds.size() == 4);
  for (const auto& k : cal.kinds) {
    CHECK(k.valid == 60);
    CHECK(k.coverage >= 0.0);
    CHECK(k.coverage <= 1.0);
  }
  const std::string json = report_json(rep);
  CHECK(json.find("\"config_hash\"") != std::string::npos);
  CHECK(json.find("runtime") == std::string::npos);
}

TEST_CASE("power grid brackets the identified interval") {
  auto cfg = parse_experiment_config(R"({
    "spec": "balke-pearl", "rule": {"type": "fixed", "target": 0},
    "kinds": ["hybrid"], "reps": 40, "seed": 3, "draws": 2000,
    "dgps": [{"p": [0.08, 0.001, 0.001, 0.073, 0.139, 0.473], "n": 500}],
    "power": {"auto_grid": true, "w0_grid": [0.0]}
  })");
  const auto rep = run_experiment(cfg, 2);
  const auto& pts = rep.dgps.at(0).power;
  CHECK(pts.size() == 8);
  for (const auto& pt : pts) {
    CHECK(pt.rate >= 0.0);
    CHECK(pt.rate <= 1.0);
  }
}

TEST_CASE("config errors") {
  auto expect = [](const std::string& text, ErrorCode code) {
    try {
      auto cfg = parse_experiment_config(text);
      cfg.validate();
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect("{not json", ErrorCode::JsonParse);
  expect(R"({"dgps": [{"p": [0.1]}]})", ErrorCode::ConfigInvalid);
  expect(R"({"rule": {"type": "nope"}, "dgps": []})", ErrorCode::ConfigInvalid);
  expect(R"({"reps": 0, "dgps": [{"p": [0.25,0.25,0.25,0.25,0.25,0.25]}]})",
         ErrorCode::ConfigInvalid);
  try {
    load_experiment_config("missing/config.json");
    FAIL("expected FILE_NOT_FOUND");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FileNotFound);
  }
}

TEST_CASE("degenerate instrument puts every record in stratum one") {
  Dgp dgp;
  dgp.p_true = bst::kCalibrated;
  dgp.q_z = 1.0;
  dgp.n = 500;
  Rng rng(72);
  const auto data = sample(dgp, rng);
  CHECK(std::all_of(data.begin(), data.end(), [](const IvRecord& r) { return r.z == 1; }));
}

TEST_CASE("coverage falls as alpha grows") {
  auto cfg = small_config();
  cfg.reps = 300;
  cfg.dgps.resize(1);
  const auto tight = run_experiment(cfg, 2);
  cfg.alpha = 0.5;
  const auto loose = run_experiment(cfg, 2);
  for (std::size_t k = 0; k < cfg.kinds.size(); ++k) {
    CAPTURE(ci_kind_name(cfg.kinds[k]));
    CHECK(loose.dgps[0].kinds[k].coverage < tight.dgps[0].kinds[k].coverage - 0.1);
  }
}

TEST_CASE("power against distant nulls grows with the sample size") {
  const std::string base = R"({
    "spec": "balke-pearl", "rule": {"type": "fixed", "target": 0},
    "kinds": ["hybrid"], "reps": 100, "seed": 9, "draws": 2000,
    "power": {"auto_grid": false, "w0_grid": [-1.0, 1.0]},
    "dgps": [{"p": [0.08, 0.001, 0.001, 0.073, 0.139, 0.473], "n": )";
  const auto small = run_experiment(parse_experiment_config(base + "100}]}"), 2);
  const auto large = run_experiment(parse_experiment_config(base + "1000}]}"), 2);
  for (int g = 0; g < 2; ++g) {
    CHECK(large.dgps[0].power[g].rate >= small.dgps[0].power[g].rate);
    CHECK(large.dgps[0].power[g].rate >= 0.9);
  }
}
