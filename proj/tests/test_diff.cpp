#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rcate/diff.hpp"
#include "rcate/synthetic.hpp"
#include "support/enumeration.hpp"

using namespace rcate;

TEST_CASE("difference-scale influence value hand check") {
  // mu1 - mu0 = 0.1; treated residual (1 - 0.2)/0.5 = 1.6.
  CHECK(aipw_gamma(1, 1, 0.5, 0.1, 0.2) == doctest::Approx(1.7).epsilon(1e-12));
  // Control row: 0.1 - (0 - 0.1)/0.5 = 0.3.
  CHECK(aipw_gamma(0, 0, 0.5, 0.1, 0.2) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(aipw_gamma(0.5, 0, 0.5, 0.1, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(aipw_gamma(1, 1, 0.0, 0.1, 0.2), std::invalid_argument);
}

TEST_CASE("difference-scale influence value is conditionally unbiased") {
  for (int atom = 0; atom < 8; ++atom) {
    const OracleRows r = discrete8_oracle_row(atom);
    const double e = r.e[0], mu0 = r.mu0[0], mu1 = r.mu1[0];
    const double mean = testsupport::expect_wy(
        e, mu0, mu1, [&](double w, double y) { return aipw_gamma(w, y, e, mu0, mu1); });
    CHECK(std::abs(mean - (mu1 - mu0)) <= 1e-12);
  }
}

TEST_CASE("ratio conversion hand values and guards") {
  const ClippingConfig clip_cfg;
  CHECK(to_ratio(0.05, 0.01, clip_cfg) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(to_ratio(0.05, 0.2, clip_cfg) == doctest::Approx(1.25).epsilon(1e-12));
  // A large negative difference at a tiny baseline clips at the ratio floor.
  CHECK(to_ratio(-5.0, 0.001, clip_cfg) == doctest::Approx(clip_cfg.eps_tau));
  CHECK(to_ratio(1000.0, 0.001, clip_cfg) == doctest::Approx(1.0 / clip_cfg.eps_tau));
  CHECK_THROWS_AS(to_ratio(0.05, 0.0, clip_cfg), std::invalid_argument);
  CHECK_THROWS_AS(to_ratio(0.05, -0.1, clip_cfg), std::invalid_argument);
}

namespace {

double median_abs(const Vector& v) {
  std::vector<double> copy(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) copy[static_cast<std::size_t>(i)] = std::abs(v[i]);
  const auto mid = copy.begin() + copy.size() / 2;
  std::nth_element(copy.begin(), mid, copy.end());
  return *mid;
}

double median_of(const Vector& v) {
  std::vector<double> copy(v.data(), v.data() + v.size());
  const auto mid = copy.begin() + copy.size() / 2;
  std::nth_element(copy.begin(), mid, copy.end());
  return *mid;
}

}  // namespace

TEST_CASE("x learner finds nothing under a null effect") {
  DGPSpec spec = dgp_preset("null_effect");
  const SyntheticData s = generate(spec, 20000);
  const auto model = fit_x_learner(s.data, LearnerSpec::logistic(), ClippingConfig{});
  CHECK(model->id() == "x");
  const Vector diff = model->score_diff(s.data.features, &*s.data.known_propensity);
  CHECK(median_abs(diff) < 0.02);
  const Vector ratio = model->score_ratio(s.data.features, &*s.data.known_propensity);
  CHECK(median_of(ratio) == doctest::Approx(1.0).epsilon(0.15));
  CHECK(ratio.minCoeff() > 0.0);
}

TEST_CASE("r learner recovers a constant additive effect") {
  DGPSpec spec;
  spec.base_rate = 0.1;
  spec.mu0_heterogeneity = 0.0;
  spec.tau_center = 2.0;  // tau_diff = mu0 = 0.1 everywhere
  spec.tau_amplitude = 0.0;
  spec.seed = 57;
  const SyntheticData s = generate(spec, 20000);
  const FoldPlan folds = make_folds(20000, 5, 58);

  const auto model = fit_r_learner(s.data, folds, LearnerSpec::logistic(), ClippingConfig{});
  const Vector diff = model->score_diff(s.data.features);
  CHECK(median_of(diff) == doctest::Approx(0.1).epsilon(0.3));
  const Vector ratio = model->score_ratio(s.data.features);
  CHECK(median_of(ratio) == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("aipw regression recovers a constant additive effect") {
  DGPSpec spec;
  spec.base_rate = 0.1;
  spec.mu0_heterogeneity = 0.0;
  spec.tau_center = 2.0;
  spec.tau_amplitude = 0.0;
  spec.seed = 59;
  const SyntheticData s = generate(spec, 20000);
  const FoldPlan folds = make_folds(20000, 5, 60);

  const auto model = fit_aipw_learner(s.data, folds, LearnerSpec::logistic(), ClippingConfig{});
  CHECK(model->id() == "aipw");
  const Vector diff = model->score_diff(s.data.features);
  CHECK(median_of(diff) == doctest::Approx(0.1).epsilon(0.25));
}

TEST_CASE("r learner refuses residuals that carry no assignment variation") {
  DGPSpec spec = dgp_preset("constant_tau2");
  const SyntheticData s = generate(spec, 200);

  NuisanceBundle bundle;
  bundle.e_hat = Vector(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    // Propensity glued to the realized assignment: every residual is tiny.
    bundle.e_hat[i] = s.data.treatment[i] == 1.0 ? 0.995 : 0.005;
  }
  bundle.e_source = NuisanceSource::cross_fitted;
  bundle.m_hat = s.oracle.m;
  bundle.m_source = NuisanceSource::cross_fitted;

  CHECK_THROWS_WITH_AS(
      static_cast<void>(fit_r_learner(s.data, bundle, LearnerSpec::logistic(), ClippingConfig{})),
      "r-learner has no usable rows after residual filtering", std::runtime_error);
}

TEST_CASE("bundle overloads insist on the components they use") {
  DGPSpec spec = dgp_preset("constant_tau2");
  const SyntheticData s = generate(spec, 300);

  NuisanceBundle missing_m;
  missing_m.e_hat = s.oracle.e;
  missing_m.e_source = NuisanceSource::known_design;
  CHECK_THROWS_AS(fit_r_learner(s.data, missing_m, LearnerSpec::logistic(), ClippingConfig{}),
                  std::invalid_argument);

  NuisanceBundle missing_mu;
  missing_mu.e_hat = s.oracle.e;
  missing_mu.e_source = NuisanceSource::known_design;
  CHECK_THROWS_AS(fit_aipw_learner(s.data, missing_mu, LearnerSpec::logistic(), ClippingConfig{}),
                  std::invalid_argument);
}

TEST_CASE("x learner needs both arms") {
  Dataset d;
  d.features = Matrix::Random(20, 2);
  d.treatment = Vector::Ones(20);
  d.outcome = Vector::Zero(20);
  d.outcome[0] = 1.0;
  CHECK_THROWS_AS(fit_x_learner(d, LearnerSpec::logistic(), ClippingConfig{}),
                  std::runtime_error);
}

TEST_CASE("the ratio adapter exposes difference learners as positive scorers") {
  DGPSpec spec = dgp_preset("constant_tau2");
  const SyntheticData s = generate(spec, 5000);
  auto x = fit_x_learner(s.data, LearnerSpec::logistic(), ClippingConfig{});
  const auto adapted = as_ratio_model(std::move(x));
  CHECK(adapted->id() == "x");
  const Vector scores = adapted->score(s.data.features, &*s.data.known_propensity);
  REQUIRE(scores.size() == 5000);
  CHECK(scores.minCoeff() > 0.0);
  CHECK(median_of(scores) == doctest::Approx(2.0).epsilon(0.3));
}
