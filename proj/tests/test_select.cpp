#include "doctest.h"

#include "boundselect/catalog.hpp"
#include "boundselect/error.hpp"
#include "boundselect/select.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace boundselect;

namespace {

void expect_agreement(bst::RuleCase rule, std::uint64_t seed) {
  const auto st = bst::selection_oracle(rule, 1000, seed);
  CHECK(st.draws == 1000);
  CHECK(st.disagreements == 0);
  CHECK(st.outside > 100);
  CHECK(st.outside < 5000);
}

ReducedForm random_dyn_rf(Rng& rng) {
  ReducedForm rf;
  rf.n = 500;
  rf.p_hat.resize(14);
  for (int z = 0; z < 2; ++z) {
    const auto cells = bst::simplex(rng, 8, 0.02);
    for (int c = 1; c < 8; ++c) rf.p_hat(7 * z + c - 1) = cells[c];
  }
  rf.sigma_hat = bst::stratified_sigma(rf.p_hat, 7);
  return rf;
}

}  // namespace

TEST_CASE("max-lower rule polyhedra agree with recomputation") {
  expect_agreement(bst::RuleCase::MaxLower, 31);
}

TEST_CASE("max-upper rule polyhedra agree with recomputation") {
  expect_agreement(bst::RuleCase::MaxUpper, 32);
}

TEST_CASE("mixed-weight rule polyhedra agree with recomputation") {
  expect_agreement(bst::RuleCase::Mixed, 33);
}

TEST_CASE("quasi-Bayesian rule polyhedra agree with recomputation") {
  expect_agreement(bst::RuleCase::Cms1, 34);
  expect_agreement(bst::RuleCase::Cms3, 35);
}

TEST_CASE("quasi-Bayesian statistic and choice") {
  const BoundsSpec inference = catalog_spec("manski-binary");
  const BoundsSpec family = difference_family(inference, 1, 0);
  const ReducedForm rf = bst::iv_reduced_form(bst::kCalibrated);
  const Mat eps = Mat::Zero(2, 6);
  const SelectionOutcome sel = rule_cms(family, inference, rf, eps);
  const double bl = family.L(0, rf.p_hat);
  const double bu = family.U(0, rf.p_hat);
  CHECK(sel.cms_statistic == doctest::Approx(std::max(bu, 0.0) + std::min(bl, 0.0)));
  CHECK(sel.d_hat == (sel.cms_statistic >= 0.0 ? 1 : 0));
  const auto seeded = rule_cms(family, inference, rf, 5, 77);
  CHECK(seeded.seed == 77u);
  CHECK(seeded.eps.rows() == 5);
  CHECK_THROWS_AS(rule_cms(inference, inference, rf, eps), Error);
}

TEST_CASE("quasi-Bayesian draws have covariance Sigma/n") {
  const ReducedForm rf = bst::iv_reduced_form(bst::kCalibrated + Vec::Constant(6, 0.02), 50);
  const Mat e = cms_draws(rf, 200000, 5);
  const Mat centered = e.rowwise() - e.colwise().mean();
  const Mat cov = centered.transpose() * centered / static_cast<double>(e.rows() - 1);
  const Mat expect = rf.sigma_hat / static_cast<double>(rf.n);
  CHECK((cov - expect).cwiseAbs().maxCoeff() < 0.02 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("weighted rule picks the largest score") {
  const BoundsSpec spec = catalog_spec("manski-binary");
  const ReducedForm rf = bst::iv_reduced_form(bst::kCalibrated);
  const auto est = estimate_bounds(spec, rf);
  const auto sel = rule_weighted(spec, rf, 1.0, 0.0);
  CHECK(sel.d_hat == (est.L_hat(1) > est.L_hat(0) ? 1 : 0));
  const auto sel_u = rule_weighted(spec, rf, 0.0, 2.0);
  CHECK(sel_u.d_hat == (est.U_hat(1) > est.U_hat(0) ? 1 : 0));
  CHECK_THROWS_AS(rule_weighted(spec, rf, 0.0, 0.0), Error);
  CHECK_THROWS_AS(rule_weighted(spec, rf, -1.0, 1.0), Error);
}

TEST_CASE("fixed target and undominated outcomes are realized") {
  Rng rng(33);
  const BoundsSpec spec = catalog_spec("dyntreat");
  for (int rep = 0; rep < 200; ++rep) {
    const ReducedForm rf = random_dyn_rf(rng);
    for (const auto& sel : rule_undominated(spec, rf)) {
      CHECK_NOTHROW(assert_realized(sel, rf.p_hat));
      CHECK(sel.members.size() >= 1);
    }
    const auto fixed = fixed_target(spec, rf, rep % 4);
    CHECK_NOTHROW(assert_realized(fixed, rf.p_hat));
  }
  const ReducedForm rf = random_dyn_rf(rng);
  CHECK_THROWS_AS(fixed_target(spec, rf, 4), Error);
}

TEST_CASE("assert_realized flags a point outside the event") {
  const BoundsSpec spec = catalog_spec("manski-binary");
  const ReducedForm rf = bst::iv_reduced_form(bst::kCalibrated);
  auto sel = rule_weighted(spec, rf, 1.0, 0.0);
  Vec far = rf.p_hat;
  far(0) += 0.8;
  far(3) += 0.8;
  try {
    assert_realized(sel, far);
    FAIL("expected EVENT_VIOLATED");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EventViolated);
  }
}
