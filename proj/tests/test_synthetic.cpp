#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rcate/synthetic.hpp"

using namespace rcate;

TEST_CASE("oracle rows satisfy the marginal and Bayes identities") {
  DGPSpec spec;
  spec.kind = DgpKind::continuous;
  spec.n_features = 4;
  spec.base_rate = 0.12;
  spec.mu0_heterogeneity = 1.2;
  spec.tau_center = 1.5;
  spec.tau_amplitude = 1.0;
  spec.propensity.kind = PropensityDesign::Kind::logit_linear;
  spec.propensity.coefficients = Vector::Zero(5);
  spec.propensity.coefficients << 0.2, 0.5, -0.3, 0.0, 0.1;
  spec.seed = 123;

  const SyntheticData s = generate(spec, 5000);
  for (Eigen::Index i = 0; i < 5000; ++i) {
    const double e = s.oracle.e[i];
    const double mu0 = s.oracle.mu0[i];
    const double mu1 = s.oracle.mu1[i];
    const double m = s.oracle.m[i];
    const double p = s.oracle.p[i];
    REQUIRE(std::abs(m - (e * mu1 + (1.0 - e) * mu0)) < 1e-12);
    REQUIRE(std::abs(p - e * mu1 / m) < 1e-12);
    REQUIRE(std::abs(s.oracle.tau[i] - mu1 / mu0) < 1e-12);
    REQUIRE(e > 0.0);
    REQUIRE(e < 1.0);
    REQUIRE(mu0 > 0.0);
    REQUIRE(mu1 < 1.0);
  }
  CHECK((*s.data.known_propensity - s.oracle.e).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("a flat effect makes the converter propensity equal the assignment propensity") {
  DGPSpec spec;
  spec.tau_center = 1.0;
  spec.tau_amplitude = 0.0;
  spec.seed = 5;
  const SyntheticData s = generate(spec, 2000);
  CHECK((s.oracle.p - s.oracle.e).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("empirical conversion tracks the oracle marginal rate") {
  const DGPSpec spec = dgp_preset("low_conversion");
  const Index n = 100000;
  const SyntheticData s = generate(spec, n);

  const double mean_m = s.oracle.m.mean();
  const double observed = s.data.outcome.mean();
  double var = 0.0;
  for (Eigen::Index i = 0; i < s.oracle.m.size(); ++i) {
    var += s.oracle.m[i] * (1.0 - s.oracle.m[i]);
  }
  const double se = std::sqrt(var) / static_cast<double>(n);
  CHECK(std::abs(observed - mean_m) <= 3.0 * se);

  // The preset exists to inhabit the ~1% conversion regime.
  CHECK(mean_m > 0.005);
  CHECK(mean_m < 0.02);
}

TEST_CASE("generation is deterministic in the seed") {
  const DGPSpec spec = dgp_preset("constant_tau2");
  const SyntheticData a = generate(spec, 500);
  const SyntheticData b = generate(spec, 500);
  CHECK((a.data.features - b.data.features).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.data.treatment - b.data.treatment).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a.data.outcome - b.data.outcome).lpNorm<Eigen::Infinity>() == 0.0);

  DGPSpec other = spec;
  other.seed += 1;
  const SyntheticData c = generate(other, 500);
  CHECK((a.data.outcome - c.data.outcome).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("discrete8 atoms are encoded in the features and tabulated consistently") {
  const auto& table = discrete8_table();
  const Matrix X = discrete8_features();
  REQUIRE(X.rows() == 8);
  for (int atom = 0; atom < 8; ++atom) {
    const int decoded = static_cast<int>(X(atom, 0)) + 2 * static_cast<int>(X(atom, 1)) +
                        4 * static_cast<int>(X(atom, 2));
    CHECK(decoded == atom);
    const OracleRows row = discrete8_oracle_row(atom);
    CHECK(row.tau[0] == doctest::Approx(table[static_cast<std::size_t>(atom)].mu1 /
                                        table[static_cast<std::size_t>(atom)].mu0)
                            .epsilon(1e-14));
  }

  DGPSpec spec = dgp_preset("discrete8");
  const SyntheticData s = generate(spec, 4000);
  for (Eigen::Index i = 0; i < 50; ++i) {
    const int atom = static_cast<int>(s.data.features(i, 0)) +
                     2 * static_cast<int>(s.data.features(i, 1)) +
                     4 * static_cast<int>(s.data.features(i, 2));
    const auto& a = table[static_cast<std::size_t>(atom)];
    CHECK(s.oracle.e[i] == a.e);
    CHECK(s.oracle.mu0[i] == a.mu0);
    CHECK(s.oracle.mu1[i] == a.mu1);
  }
}

TEST_CASE("corruption modes match their hand values") {
  const ClippingConfig cfg;
  CHECK(corrupt_value(0.5, LogitShift{0.5}, NuisanceComponent::e, cfg) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-0.5))).epsilon(1e-12));
  CHECK(corrupt_value(0.1, Multiplicative{1.2}, NuisanceComponent::mu, cfg) ==
        doctest::Approx(0.12).epsilon(1e-12));
  CHECK(corrupt_value(0.37, LogitShift{0.0}, NuisanceComponent::p, cfg) ==
        doctest::Approx(0.37).epsilon(1e-12));

  // Corruption re-clips into the component's legal range.
  CHECK(corrupt_value(0.9, Multiplicative{5.0}, NuisanceComponent::mu, cfg) == 0.999);

  Vector v(3);
  v << 0.2, 0.5, 0.8;
  const Vector out = corrupt_nuisance(v, Multiplicative{1.1}, NuisanceComponent::m, cfg);
  CHECK(out[0] == doctest::Approx(0.22).epsilon(1e-12));
}

TEST_CASE("infeasible specs are rejected") {
  DGPSpec spec;
  spec.base_rate = 0.4;
  spec.mu0_heterogeneity = 1.0;
  spec.tau_center = 2.0;
  spec.tau_amplitude = 1.0;  // sup mu1 would exceed 1
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  DGPSpec bad_base;
  bad_base.base_rate = 0.0;
  CHECK_THROWS_AS(bad_base.validate(), std::invalid_argument);

  CHECK_THROWS_AS(dgp_preset("no_such_preset"), std::invalid_argument);
  CHECK(!dgp_preset_names().empty());
}
