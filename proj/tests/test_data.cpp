#include <doctest.h>

#include <algorithm>
#include <set>
#include <stdexcept>

#include "rcate/data.hpp"

using namespace rcate;

namespace {

Dataset tiny_dataset(Index n) {
  Dataset d;
  d.features = Matrix::Zero(static_cast<Eigen::Index>(n), 2);
  d.treatment = Vector::Zero(static_cast<Eigen::Index>(n));
  d.outcome = Vector::Zero(static_cast<Eigen::Index>(n));
  for (Index i = 0; i < n; ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    d.features(e, 0) = static_cast<double>(i);
    d.treatment[e] = static_cast<double>(i % 2);
    d.outcome[e] = static_cast<double>(i % 3 == 0);
  }
  return d;
}

}  // namespace

TEST_CASE("dataset validation rejects structural problems") {
  Dataset d = tiny_dataset(6);
  CHECK_NOTHROW(d.validate());

  SUBCASE("non-binary treatment") {
    d.treatment[2] = 0.5;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  SUBCASE("non-binary outcome") {
    d.outcome[0] = 2.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  SUBCASE("non-finite feature") {
    d.features(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  SUBCASE("propensity on the boundary") {
    d.known_propensity = Vector::Zero(6);
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
  SUBCASE("length mismatch") {
    d.outcome = Vector::Zero(5);
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  }
}

TEST_CASE("subset keeps row order and the known propensity") {
  Dataset d = tiny_dataset(8);
  d.known_propensity = Vector::Constant(8, 0.4);
  (*d.known_propensity)[5] = 0.7;

  const Dataset s = subset(d, {5, 0, 2});
  REQUIRE(s.n_rows() == 3);
  CHECK(s.features(0, 0) == 5.0);
  CHECK(s.features(1, 0) == 0.0);
  CHECK(s.features(2, 0) == 2.0);
  CHECK((*s.known_propensity)[0] == 0.7);
  CHECK((*s.known_propensity)[1] == 0.4);
}

TEST_CASE("make_split is a seeded disjoint partition") {
  const SplitPlan plan = make_split(100, 42, 0.7);
  CHECK(plan.train_indices.size() == 70);
  CHECK(plan.test_indices.size() == 30);

  std::set<Index> seen(plan.train_indices.begin(), plan.train_indices.end());
  seen.insert(plan.test_indices.begin(), plan.test_indices.end());
  CHECK(seen.size() == 100);

  const SplitPlan again = make_split(100, 42, 0.7);
  CHECK(plan.train_indices == again.train_indices);

  const SplitPlan other = make_split(100, 43, 0.7);
  CHECK(plan.train_indices != other.train_indices);
}

TEST_CASE("make_split keeps one row on each side at extreme fractions") {
  const SplitPlan lo = make_split(10, 7, 0.001);
  CHECK(lo.train_indices.size() == 1);
  const SplitPlan hi = make_split(10, 7, 0.999);
  CHECK(hi.test_indices.size() == 1);
  CHECK_THROWS_AS(make_split(1, 7, 0.5), std::invalid_argument);
}

TEST_CASE("make_folds balances fold sizes within one row") {
  const FoldPlan plan = make_folds(23, 5, 9);
  REQUIRE(plan.assignment.size() == 23);
  std::vector<int> counts(5, 0);
  for (int f : plan.assignment) {
    REQUIRE(f >= 0);
    REQUIRE(f < 5);
    ++counts[static_cast<std::size_t>(f)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  CHECK(*hi - *lo <= 1);

  const std::vector<Index> fold0 = plan.fold_rows(0);
  const std::vector<Index> rest = plan.complement_rows(0);
  CHECK(fold0.size() + rest.size() == 23);
}

TEST_CASE("clipping bounds and validation") {
  const ClippingConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.clip_e(0.0) == 0.01);
  CHECK(cfg.clip_e(1.0) == 0.99);
  CHECK(cfg.clip_mu(-3.0) == 0.001);
  CHECK(cfg.clip_m(2.0) == 1.0);
  CHECK(cfg.clip_p(0.5) == 0.5);
  CHECK(cfg.clip_tau(250.0) == 100.0);
  CHECK(cfg.clip_tau(1e-5) == 0.01);
  CHECK(cfg.clip_log(-50.0) == -10.0);

  ClippingConfig bad = cfg;
  bad.eps_e = 0.6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  CHECK_THROWS_AS(clip(1.0, 2.0, 0.5), std::invalid_argument);
}
