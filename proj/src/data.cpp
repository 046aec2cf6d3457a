#include "rcate/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rcate/rng.hpp"

namespace rcate {

namespace {

bool is_binary(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0 && v[i] != 1.0) return false;
  }
  return true;
}

}  // namespace

void Dataset::validate() const {
  const Eigen::Index n = features.rows();
  if (n < 1) throw std::invalid_argument("dataset: needs at least one row");
  if (features.cols() < 1) throw std::invalid_argument("dataset: needs at least one feature");
  if (!features.allFinite()) throw std::invalid_argument("dataset: non-finite feature value");
  if (treatment.size() != n || outcome.size() != n) {
    throw std::invalid_argument("dataset: treatment/outcome length mismatch");
  }
  if (!is_binary(treatment)) throw std::invalid_argument("dataset: treatment must be 0/1");
  if (!is_binary(outcome)) throw std::invalid_argument("dataset: outcome must be 0/1");
  if (known_propensity) {
    if (known_propensity->size() != n) {
      throw std::invalid_argument("dataset: known propensity length mismatch");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double e = (*known_propensity)[i];
      if (!(e > 0.0 && e < 1.0)) {
        throw std::invalid_argument("dataset: known propensity must lie strictly in (0, 1)");
      }
    }
  }
}

Dataset subset(const Dataset& data, const std::vector<Index>& rows) {
  Dataset out;
  out.name = data.name;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.features.resize(m, data.features.cols());
  out.treatment.resize(m);
  out.outcome.resize(m);
  if (data.known_propensity) out.known_propensity.emplace(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Index r = rows[static_cast<Index>(i)];
    if (r >= data.n_rows()) throw std::invalid_argument("subset: row index out of range");
    out.features.row(i) = data.features.row(static_cast<Eigen::Index>(r));
    out.treatment[i] = data.treatment[static_cast<Eigen::Index>(r)];
    out.outcome[i] = data.outcome[static_cast<Eigen::Index>(r)];
    if (data.known_propensity) {
      (*out.known_propensity)[i] = (*data.known_propensity)[static_cast<Eigen::Index>(r)];
    }
  }
  return out;
}

SplitPlan make_split(Index n, std::uint64_t seed, double train_fraction) {
  if (n < 2) throw std::invalid_argument("make_split: need at least two rows");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw std::invalid_argument("make_split: train_fraction must lie in (0, 1)");
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  SeededRng rng(seed);
  shuffle(order, rng);

  auto n_train = static_cast<Index>(std::llround(train_fraction * static_cast<double>(n)));
  n_train = std::clamp<Index>(n_train, 1, n - 1);

  SplitPlan plan;
  plan.seed = seed;
  plan.train_fraction = train_fraction;
  plan.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  plan.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return plan;
}

std::vector<Index> FoldPlan::fold_rows(int fold) const {
  std::vector<Index> rows;
  for (Index i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<Index> FoldPlan::complement_rows(int fold) const {
  std::vector<Index> rows;
  for (Index i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldPlan make_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("make_folds: need k >= 2");
  if (n < static_cast<Index>(k)) throw std::invalid_argument("make_folds: fewer rows than folds");
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  SeededRng rng(seed);
  shuffle(order, rng);

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(n, 0);
  for (Index pos = 0; pos < n; ++pos) {
    plan.assignment[order[pos]] = static_cast<int>(pos % static_cast<Index>(k));
  }
  return plan;
}

void ClippingConfig::validate() const {
  auto check_half = [](double eps, const char* what) {
    if (!(eps > 0.0 && eps < 0.5)) {
      throw std::invalid_argument(std::string("clipping: ") + what + " must lie in (0, 0.5)");
    }
  };
  check_half(eps_e, "eps_e");
  check_half(eps_mu, "eps_mu");
  check_half(eps_p, "eps_p");
  if (!(eps_m > 0.0 && eps_m < 1.0)) {
    throw std::invalid_argument("clipping: eps_m must lie in (0, 1)");
  }
  if (!(eps_tau > 0.0 && eps_tau < 1.0)) {
    throw std::invalid_argument("clipping: eps_tau must lie in (0, 1)");
  }
  if (!(log_cap > 0.0)) throw std::invalid_argument("clipping: log_cap must be positive");
}

double ClippingConfig::clip_e(double v) const { return clip(v, eps_e, 1.0 - eps_e); }
double ClippingConfig::clip_mu(double v) const { return clip(v, eps_mu, 1.0 - eps_mu); }
double ClippingConfig::clip_m(double v) const { return clip(v, eps_m, 1.0); }
double ClippingConfig::clip_p(double v) const { return clip(v, eps_p, 1.0 - eps_p); }
double ClippingConfig::clip_tau(double v) const { return clip(v, eps_tau, 1.0 / eps_tau); }
double ClippingConfig::clip_log(double v) const { return clip(v, -log_cap, log_cap); }

double clip(double value, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clip: lower bound exceeds upper bound");
  return std::min(std::max(value, lo), hi);
}

Vector clip_all(const Vector& values, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("clip: lower bound exceeds upper bound");
  return values.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace rcate
