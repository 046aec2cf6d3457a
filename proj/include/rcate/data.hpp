#pragma once

// Core data types shared by every estimator: the binary-outcome dataset,
// train/test splits, cross-fitting fold plans, and the clipping bounds used
// to keep estimated probabilities and pseudo-outcomes numerically safe.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcate {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = std::size_t;

struct Dataset {
  Matrix features;                         // n x d
  Vector treatment;                        // entries in {0, 1}
  Vector outcome;                          // entries in {0, 1}
  std::optional<Vector> known_propensity;  // design assignment probability, in (0, 1)
  std::string name;

  Index n_rows() const { return static_cast<Index>(features.rows()); }
  Index n_features() const { return static_cast<Index>(features.cols()); }

  // Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;
};

// Row subset, preserving the order of `rows`.
Dataset subset(const Dataset& data, const std::vector<Index>& rows);

struct SplitPlan {
  std::uint64_t seed = 0;
  double train_fraction = 0.7;
  std::vector<Index> train_indices;
  std::vector<Index> test_indices;
};

// Seeded disjoint train/test split. Requires n >= 2 and a fraction that
// leaves at least one row on each side.
SplitPlan make_split(Index n, std::uint64_t seed, double train_fraction = 0.7);

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // assignment[row] in [0, k)

  std::vector<Index> fold_rows(int fold) const;
  std::vector<Index> complement_rows(int fold) const;
};

// Seeded k-fold partition; fold sizes differ by at most one row.
FoldPlan make_folds(Index n, int k, std::uint64_t seed);

// Bounds from the numerical-stability appendix. Every estimated nuisance and
// pseudo-outcome passes through one of these before further use.
struct ClippingConfig {
  double eps_e = 0.01;    // e-hat in [eps_e, 1 - eps_e]
  double eps_mu = 0.001;  // mu-hat in [eps_mu, 1 - eps_mu]
  double eps_m = 0.001;   // m-hat in [eps_m, 1]
  double eps_p = 0.01;    // p-hat in [eps_p, 1 - eps_p]
  double eps_tau = 0.01;  // direct-scale pseudo-outcomes in [eps_tau, 1/eps_tau]
  double log_cap = 10.0;  // log-scale pseudo-outcomes in [-log_cap, log_cap]

  void validate() const;

  double clip_e(double v) const;
  double clip_mu(double v) const;
  double clip_m(double v) const;
  double clip_p(double v) const;
  double clip_tau(double v) const;
  double clip_log(double v) const;
};

// Plain interval clip; throws when lo > hi.
double clip(double value, double lo, double hi);

Vector clip_all(const Vector& values, double lo, double hi);

}  // namespace rcate
