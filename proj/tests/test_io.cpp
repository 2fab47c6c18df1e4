#include "doctest.h"

#include "boundselect/catalog.hpp"
#include "boundselect/error.hpp"
#include "boundselect/io.hpp"
#include "boundselect/lpbounds.hpp"
#include "support.hpp"

using namespace boundselect;

TEST_CASE("spec JSON round trip") {
  for (const char* name : {"manski-binary", "balke-pearl", "dyntreat"}) {
    const BoundsSpec spec = catalog_spec(name);
    const BoundsSpec back = spec_from_json(parse_json(spec_to_json(spec).dump(), "spec"));
    REQUIRE(back.num_options == spec.num_options);
    for (int d = 0; d < spec.num_options; ++d) {
      for (int j = 0; j < spec.num_lower(); ++j) {
        CHECK(back.lower[d][j].offset == spec.lower[d][j].offset);
        CHECK(back.lower[d][j].coef == spec.lower[d][j].coef);
      }
      for (int j = 0; j < spec.num_upper(); ++j) {
        CHECK(back.upper[d][j].coef == spec.upper[d][j].coef);
      }
    }
  }
}

TEST_CASE("reduced form and latent LP round trips") {
  const ReducedForm rf = bst::iv_reduced_form(bst::kCalibrated, 321);
  const ReducedForm back = reduced_form_from_json(reduced_form_to_json(rf));
  CHECK(back.n == 321);
  CHECK(back.p_hat == rf.p_hat);
  CHECK(back.sigma_hat == rf.sigma_hat);
  const LatentLp lp = balke_pearl_latent();
  const LatentLp lb = latent_lp_from_json(latent_lp_to_json(lp));
  CHECK(lb.A == lp.A);
  CHECK(lb.B == lp.B);
}

TEST_CASE("malformed documents") {
  try {
    parse_json("{\"a\": ", "test");
    FAIL("expected JSON_PARSE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::JsonParse);
    CHECK_FALSE(is_numerical(e.code()));
  }
  CHECK_THROWS_AS(spec_from_json(parse_json(R"({"num_options": 1})", "spec")), Error);
  CHECK(extended(kInf) == "inf");
  CHECK(extended(-kInf) == "-inf");
  CHECK(extended(1.5) == 1.5);
}

TEST_CASE("error codes have stable names and exit classes") {
  CHECK(std::string(error_code_name(ErrorCode::DataSchema)) == "DATA_SCHEMA");
  CHECK(std::string(error_code_name(ErrorCode::StratumMin)) == "STRATUM_MIN");
  CHECK(std::string(error_code_name(ErrorCode::CovarianceInvalid)) == "SIGMA_INVALID");
  CHECK(std::string(error_code_name(ErrorCode::LpEnumCap)) == "LP_ENUM_CAP");
  CHECK_FALSE(is_numerical(ErrorCode::SpecInvalid));
  CHECK(is_numerical(ErrorCode::SolverBracket));
  CHECK(is_numerical(ErrorCode::ReplicationFailures));
}
