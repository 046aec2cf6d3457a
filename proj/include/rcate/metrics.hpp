#pragma once

// Evaluation metrics for ratio-scale uplift scores: a Qini-style ranking
// curve whose per-prefix value is the treated/control conversion ratio, a
// multiplicative calibration error, and the paired across-seed comparison
// used in benchmark summaries.

#include <cstddef>
#include <vector>

#include "rcate/data.hpp"

namespace rcate {

struct QiniCurve {
  // Grid of population fractions, starting at the first prefix where the
  // ratio is defined and always ending at 1. Prefixes where the ratio is
  // momentarily undefined carry the previous value.
  std::vector<double> fractions;
  std::vector<double> ratios;
  double overall_ratio = 0.0;
  // Average curve height over the defined range minus the overall ratio.
  double qini = 0.0;
};

// Ranks rows by score (descending, ties by original index) and evaluates the
// prefix conversion ratio on a grid of at most max_grid evenly spaced ranks.
// Requires at least one conversion in each arm overall.
QiniCurve qini_ratio_curve(const Vector& scores, const Vector& treatment, const Vector& outcome,
                           std::size_t max_grid = 1000);

struct CalibrationBin {
  std::size_t count = 0;
  double mean_score = 0.0;
  double empirical_ratio = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationBin> bins;
  // Geometric-mean multiplicative gap between predicted and empirical ratios;
  // 1.0 means perfectly calibrated.
  double cal_error = 1.0;
};

CalibrationReport calibration_error(const Vector& scores, const Vector& treatment,
                                    const Vector& outcome, const ClippingConfig& clip_cfg,
                                    std::size_t bins = 10);

struct QiniRatioResult {
  double ratio = 0.0;
  // Set when either qini is negative, where the ratio flips sign and stops
  // being a meaningful improvement factor.
  bool qini_negative = false;
};

QiniRatioResult qini_ratio_to_baseline(double qini_learner, double qini_baseline);

struct PairedTestResult {
  double mean_diff = 0.0;
  double std_err = 0.0;
  double z = 0.0;
  bool significant = false;
  // All per-seed differences identical, so the z statistic is undefined.
  bool degenerate = false;
  std::size_t seed_count = 0;
};

PairedTestResult paired_seed_test(const std::vector<double>& diffs);
PairedTestResult paired_seed_test(const std::vector<double>& learner_values,
                                  const std::vector<double>& baseline_values);

}  // namespace rcate
