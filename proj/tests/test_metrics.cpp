#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rcate/metrics.hpp"
#include "rcate/rng.hpp"

using namespace rcate;

namespace {

// Eight rows used across the ranking fixtures. Treated conversions sit in
// rows 0-1, the single control conversion in row 4.
const double kW[8] = {1, 1, 1, 1, 0, 0, 0, 0};
const double kY[8] = {1, 1, 0, 0, 1, 0, 0, 0};

Vector vec(const double* data, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = data[i];
  return v;
}

Vector scores_for_order(const std::vector<int>& order) {
  // Highest score to the first listed row, so the ranking equals `order`.
  Vector s(static_cast<Eigen::Index>(order.size()));
  double value = static_cast<double>(order.size());
  for (int row : order) {
    s[row] = value;
    value -= 1.0;
  }
  return s;
}

}  // namespace

TEST_CASE("ranking that delays every conversion pins the curve at the overall ratio") {
  const Vector w = vec(kW, 8);
  const Vector y = vec(kY, 8);
  // All conversions (rows 0, 1, 4) land in the last three ranks, so the ratio
  // first becomes defined at the full-population prefix.
  const Vector s = scores_for_order({2, 3, 5, 6, 7, 0, 1, 4});
  const QiniCurve curve = qini_ratio_curve(s, w, y);
  CHECK(curve.overall_ratio == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(curve.qini) <= 1e-12);
}

TEST_CASE("ranking conversions first yields the hand-computed area") {
  const Vector w = vec(kW, 8);
  const Vector y = vec(kY, 8);
  const Vector s = scores_for_order({0, 1, 4, 2, 3, 5, 6, 7});
  const QiniCurve curve = qini_ratio_curve(s, w, y);
  // Ratio defined from rank 3 on: 1, 2/3, 1/2, 1, 3/2, 2 at ranks 3..8.
  // Trapezoid area 31/48 over width 5/8 gives mean 31/30; minus overall 2.
  CHECK(curve.qini == doctest::Approx(-29.0 / 30.0).epsilon(1e-12));
}

TEST_CASE("a balanced interleaving has zero qini") {
  const Eigen::Index n = 100;
  Vector w(n), y(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = static_cast<double>(i % 2 == 0);
    y[i] = 1.0;
    s[i] = static_cast<double>(n - i);
  }
  const QiniCurve curve = qini_ratio_curve(s, w, y);
  CHECK(curve.overall_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(curve.qini) <= 1e-12);
}

TEST_CASE("qini is invariant to monotone score transforms and row permutations") {
  SeededRng rng(99);
  const Eigen::Index n = 500;
  Vector w(n), y(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    s[i] = rng.uniform(-2.0, 2.0);
    const double rate = w[i] == 1.0 ? 0.3 : 0.2;
    y[i] = rng.bernoulli(rate) ? 1.0 : 0.0;
  }
  const double base = qini_ratio_curve(s, w, y).qini;
  const Vector transformed = s.array().exp();
  CHECK(qini_ratio_curve(transformed, w, y).qini == base);

  // Same rows presented in reverse order; distinct scores keep the ranking.
  Vector wr = w.reverse(), yr = y.reverse(), sr = s.reverse();
  CHECK(qini_ratio_curve(sr, wr, yr).qini == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("coarse grids stay close to the exact curve") {
  SeededRng rng(1234);
  const Eigen::Index n = 5000;
  Vector w(n), y(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    s[i] = rng.uniform(0.0, 1.0);
    y[i] = rng.bernoulli(0.1 + 0.2 * s[i] * w[i]) ? 1.0 : 0.0;
  }
  const double exact = qini_ratio_curve(s, w, y, 5000).qini;
  const double coarse = qini_ratio_curve(s, w, y, 200).qini;
  CHECK(std::abs(coarse - exact) < 0.02);
}

TEST_CASE("qini requires both arms and a conversion in each") {
  Vector w(4), y(4), s(4);
  w << 1, 1, 0, 0;
  y << 1, 0, 0, 0;  // control arm never converts
  s << 4, 3, 2, 1;
  CHECK_THROWS_AS(qini_ratio_curve(s, w, y), std::invalid_argument);
  y << 0, 0, 1, 0;  // treated arm never converts
  CHECK_THROWS_AS(qini_ratio_curve(s, w, y), std::invalid_argument);
  w << 1, 1, 1, 1;
  y << 1, 0, 1, 0;
  CHECK_THROWS_AS(qini_ratio_curve(s, w, y), std::invalid_argument);
  Vector bad = s;
  bad[0] = std::nan("");
  w << 1, 1, 0, 0;
  y << 1, 0, 1, 0;
  CHECK_THROWS_AS(qini_ratio_curve(bad, w, y), std::invalid_argument);
}

namespace {

// bins of four rows each: two treated, two control, conversions chosen so the
// empirical ratio is exact.
struct CalFixture {
  Vector s, w, y;
};

// Low half: scores 1.0, one conversion per arm pair -> empirical ratio 1.
// High half: scores `high_pred`, treated converts twice, control once ->
// empirical ratio 2.
CalFixture two_bin_fixture(double high_pred) {
  CalFixture f;
  f.s = Vector(8);
  f.w = Vector(8);
  f.y = Vector(8);
  const double w[8] = {1, 1, 0, 0, 1, 1, 0, 0};
  const double y_low[4] = {1, 0, 1, 0};
  const double y_high[4] = {1, 1, 1, 0};
  for (int i = 0; i < 4; ++i) {
    f.s[i] = 1.0;
    f.w[i] = w[i];
    f.y[i] = y_low[i];
    f.s[i + 4] = high_pred;
    f.w[i + 4] = w[i + 4];
    f.y[i + 4] = y_high[i];
  }
  return f;
}

}  // namespace

TEST_CASE("calibration error is exactly one when predictions match the bins") {
  const CalFixture f = two_bin_fixture(2.0);
  const CalibrationReport report = calibration_error(f.s, f.w, f.y, ClippingConfig{}, 2);
  REQUIRE(report.bins.size() == 2);
  CHECK(report.bins[0].count == 4);
  CHECK(report.bins[0].mean_score == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.bins[0].empirical_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.bins[1].empirical_ratio == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(report.cal_error == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one bin off by a factor of two gives the square root of two") {
  // High bin predicts 1.0 but realizes ratio 2: gap log 2 on half the rows.
  CalFixture f = two_bin_fixture(2.0);
  for (int i = 4; i < 8; ++i) f.s[i] = 1.0 + 1e-9;  // keep the sort order stable
  const CalibrationReport report = calibration_error(f.s, f.w, f.y, ClippingConfig{}, 2);
  CHECK(report.cal_error == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("multiplicative gaps are symmetric around one") {
  // Predicting 0.8 against an empirical 1.0 scores the same as predicting
  // 1.25: both are a 1.25x multiplicative miss.
  Vector w(4), y(4);
  w << 1, 1, 0, 0;
  y << 1, 0, 1, 0;
  Vector low = Vector::Constant(4, 0.8);
  Vector high = Vector::Constant(4, 1.25);
  const double err_low = calibration_error(low, w, y, ClippingConfig{}, 1).cal_error;
  const double err_high = calibration_error(high, w, y, ClippingConfig{}, 1).cal_error;
  CHECK(err_low == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(err_high == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("an arm that never converts inside a bin hits the clipping floor") {
  Vector w(4), y(4), s(4);
  w << 1, 1, 0, 0;
  y << 1, 1, 0, 0;  // control arm empty-handed
  s = Vector::Constant(4, 1.0);
  const ClippingConfig clip_cfg;
  const CalibrationReport report = calibration_error(s, w, y, clip_cfg, 1);
  CHECK(report.bins[0].empirical_ratio == doctest::Approx(1.0 / clip_cfg.eps_mu).epsilon(1e-9));
  CHECK(report.cal_error > 1.0);
}

TEST_CASE("calibration rejects bad inputs") {
  Vector w(4), y(4), s(4);
  w << 1, 1, 0, 0;
  y << 1, 0, 1, 0;
  s << 1, 1, 1, 1;
  CHECK_THROWS_AS(calibration_error(s, w, y, ClippingConfig{}, 5), std::invalid_argument);
  s[2] = 0.0;
  CHECK_THROWS_AS(calibration_error(s, w, y, ClippingConfig{}, 2), std::invalid_argument);
  s[2] = -1.0;
  CHECK_THROWS_AS(calibration_error(s, w, y, ClippingConfig{}, 2), std::invalid_argument);
}

TEST_CASE("bin sizes differ by at most one") {
  SeededRng rng(5);
  const Eigen::Index n = 47;
  Vector w(n), y(n), s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = static_cast<double>(i % 2);
    y[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    s[i] = rng.uniform(0.5, 2.0);
  }
  y[0] = 1.0;
  y[1] = 1.0;
  const CalibrationReport report = calibration_error(s, w, y, ClippingConfig{}, 10);
  std::size_t total = 0;
  for (const auto& bin : report.bins) {
    CHECK(bin.count >= 4);
    CHECK(bin.count <= 5);
    total += bin.count;
  }
  CHECK(total == 47);
}

TEST_CASE("improvement factor over the baseline") {
  const QiniRatioResult plain = qini_ratio_to_baseline(0.471, 0.286);
  CHECK(plain.ratio == doctest::Approx(1.647).epsilon(1e-3));
  CHECK_FALSE(plain.qini_negative);

  const QiniRatioResult equal = qini_ratio_to_baseline(0.4, 0.4);
  CHECK(equal.ratio == doctest::Approx(1.0).epsilon(1e-12));

  const QiniRatioResult flipped = qini_ratio_to_baseline(-0.043, 0.087);
  CHECK(flipped.qini_negative);

  const QiniRatioResult negative_base = qini_ratio_to_baseline(0.1, -0.02);
  CHECK(negative_base.qini_negative);

  CHECK_THROWS_AS(qini_ratio_to_baseline(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("paired seed test hand values") {
  const PairedTestResult r = paired_seed_test(std::vector<double>{1.0, 2.0, 3.0});
  CHECK(r.mean_diff == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.std_err == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
  CHECK(r.z == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-9));
  CHECK(r.significant);
  CHECK_FALSE(r.degenerate);
  CHECK(r.seed_count == 3);

  const PairedTestResult weak = paired_seed_test(std::vector<double>{0.1, -0.1});
  CHECK(weak.z == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(weak.significant);

  // Negating every difference negates the statistic.
  const PairedTestResult neg = paired_seed_test(std::vector<double>{-1.0, -2.0, -3.0});
  CHECK(neg.z == doctest::Approx(-r.z).epsilon(1e-12));
  CHECK(neg.significant);
}

TEST_CASE("paired seed test degenerate and error paths") {
  const PairedTestResult flat = paired_seed_test(std::vector<double>{0.5, 0.5, 0.5});
  CHECK(flat.degenerate);
  CHECK(flat.z == 0.0);
  CHECK_FALSE(flat.significant);

  CHECK_THROWS_AS(paired_seed_test(std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(paired_seed_test(std::vector<double>{}), std::invalid_argument);

  const PairedTestResult via_pairs =
      paired_seed_test(std::vector<double>{1.2, 1.4, 1.6}, std::vector<double>{0.2, -0.6, -1.4});
  CHECK(via_pairs.mean_diff == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(via_pairs.z == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-9));
  CHECK_THROWS_AS(paired_seed_test(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}),
                  std::invalid_argument);
}
