#include "rcate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rcate {

namespace {

void check_metric_inputs(const Vector& scores, const Vector& treatment, const Vector& outcome) {
  if (scores.size() != treatment.size() || scores.size() != outcome.size()) {
    throw std::invalid_argument("scores, treatment, and outcome lengths differ");
  }
  if (scores.size() == 0) throw std::invalid_argument("empty metric input");
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw std::invalid_argument("scores must be finite");
    if (treatment[i] != 0.0 && treatment[i] != 1.0) {
      throw std::invalid_argument("treatment must be 0 or 1");
    }
    if (outcome[i] != 0.0 && outcome[i] != 1.0) {
      throw std::invalid_argument("outcome must be 0 or 1");
    }
  }
}

std::vector<Eigen::Index> rank_desc(const Vector& scores) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

QiniCurve qini_ratio_curve(const Vector& scores, const Vector& treatment, const Vector& outcome,
                           std::size_t max_grid) {
  check_metric_inputs(scores, treatment, outcome);
  if (max_grid == 0) throw std::invalid_argument("max_grid must be positive");

  const auto n = static_cast<std::size_t>(scores.size());
  double total_conv1 = 0.0;
  double total_conv0 = 0.0;
  double total_n1 = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (treatment[i] == 1.0) {
      total_n1 += 1.0;
      total_conv1 += outcome[i];
    } else {
      total_conv0 += outcome[i];
    }
  }
  const double total_n0 = static_cast<double>(n) - total_n1;
  if (total_n1 == 0.0 || total_n0 == 0.0) {
    throw std::invalid_argument("both arms must be present");
  }
  if (total_conv1 == 0.0 || total_conv0 == 0.0) {
    throw std::invalid_argument("both arms need at least one conversion");
  }

  QiniCurve curve;
  curve.overall_ratio = (total_conv1 / total_n1) / (total_conv0 / total_n0);

  const std::vector<Eigen::Index> order = rank_desc(scores);
  const std::size_t step = (n + max_grid - 1) / max_grid;

  double n1 = 0.0, c1 = 0.0, n0 = 0.0, c0 = 0.0;
  double last_ratio = 0.0;
  bool have_last = false;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    const Eigen::Index row = order[rank - 1];
    if (treatment[row] == 1.0) {
      n1 += 1.0;
      c1 += outcome[row];
    } else {
      n0 += 1.0;
      c0 += outcome[row];
    }
    if (rank % step != 0 && rank != n) continue;

    const double fraction = static_cast<double>(rank) / static_cast<double>(n);
    const bool defined = n1 > 0.0 && n0 > 0.0 && c0 > 0.0;
    if (defined) {
      last_ratio = (c1 / n1) / (c0 / n0);
      have_last = true;
    } else if (!have_last) {
      continue;  // curve has not started yet
    }
    curve.fractions.push_back(fraction);
    curve.ratios.push_back(last_ratio);
  }

  // The full-population prefix is always defined, so the curve is nonempty.
  double mean_height = curve.ratios.back();
  if (curve.fractions.size() > 1) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.fractions.size(); ++i) {
      area += 0.5 * (curve.ratios[i] + curve.ratios[i - 1]) *
              (curve.fractions[i] - curve.fractions[i - 1]);
    }
    mean_height = area / (curve.fractions.back() - curve.fractions.front());
  }
  curve.qini = mean_height - curve.overall_ratio;
  return curve;
}

CalibrationReport calibration_error(const Vector& scores, const Vector& treatment,
                                    const Vector& outcome, const ClippingConfig& clip_cfg,
                                    std::size_t bins) {
  check_metric_inputs(scores, treatment, outcome);
  clip_cfg.validate();
  if (bins == 0) throw std::invalid_argument("bin count must be positive");
  const auto n = static_cast<std::size_t>(scores.size());
  if (n < bins) throw std::invalid_argument("fewer rows than calibration bins");
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!(scores[i] > 0.0)) throw std::invalid_argument("ratio scores must be positive");
  }

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return scores[a] < scores[b];
  });

  CalibrationReport report;
  double weighted_log_gap = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t start = b * n / bins;
    const std::size_t end = (b + 1) * n / bins;
    CalibrationBin bin;
    bin.count = end - start;
    double score_sum = 0.0;
    double n1 = 0.0, c1 = 0.0, n0 = 0.0, c0 = 0.0;
    for (std::size_t r = start; r < end; ++r) {
      const Eigen::Index row = order[r];
      score_sum += scores[row];
      if (treatment[row] == 1.0) {
        n1 += 1.0;
        c1 += outcome[row];
      } else {
        n0 += 1.0;
        c0 += outcome[row];
      }
    }
    bin.mean_score = score_sum / static_cast<double>(bin.count);
    const double mean1 = std::max(n1 > 0.0 ? c1 / n1 : 0.0, clip_cfg.eps_mu);
    const double mean0 = std::max(n0 > 0.0 ? c0 / n0 : 0.0, clip_cfg.eps_mu);
    bin.empirical_ratio = mean1 / mean0;
    weighted_log_gap +=
        static_cast<double>(bin.count) * std::abs(std::log(bin.mean_score) - std::log(bin.empirical_ratio));
    report.bins.push_back(bin);
  }
  report.cal_error = std::exp(weighted_log_gap / static_cast<double>(n));
  return report;
}

QiniRatioResult qini_ratio_to_baseline(double qini_learner, double qini_baseline) {
  if (qini_baseline == 0.0) throw std::invalid_argument("baseline qini is zero");
  QiniRatioResult result;
  result.ratio = qini_learner / qini_baseline;
  result.qini_negative = qini_learner < 0.0 || qini_baseline < 0.0;
  return result;
}

PairedTestResult paired_seed_test(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  if (n < 2) throw std::invalid_argument("paired test needs at least two seeds");

  PairedTestResult result;
  result.seed_count = n;
  double mean = 0.0;
  for (double d : diffs) mean += d;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double d : diffs) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  result.mean_diff = mean;
  if (sd == 0.0) {
    result.degenerate = true;
    return result;
  }
  result.std_err = sd / std::sqrt(static_cast<double>(n));
  result.z = mean / result.std_err;
  result.significant = std::abs(result.z) > 1.96;
  return result;
}

PairedTestResult paired_seed_test(const std::vector<double>& learner_values,
                                  const std::vector<double>& baseline_values) {
  if (learner_values.size() != baseline_values.size()) {
    throw std::invalid_argument("paired test inputs have different lengths");
  }
  std::vector<double> diffs(learner_values.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) diffs[i] = learner_values[i] - baseline_values[i];
  return paired_seed_test(diffs);
}

}  // namespace rcate
