// Gradient-boosted regression trees with exact split search. Feature orders
// are presorted once per fit and reused by every tree; each level is found in
// a single pass per feature over the sorted order, so fits are deterministic
// functions of the data (ties in both values and gains resolve by index).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "learner_detail.hpp"

namespace rcate::detail {

namespace {

double weighted_mean(const Vector& t, const Vector* w) {
  if (!w) return t.mean();
  return t.dot(*w) / w->sum();
}

double base_score_for(GbtObjective objective, const Vector& t, const Vector* w) {
  const double mean = weighted_mean(t, w);
  switch (objective) {
    case GbtObjective::logloss: {
      const double p = std::clamp(mean, 1e-12, 1.0 - 1e-12);
      return std::log(p / (1.0 - p));
    }
    case GbtObjective::poisson:
      return std::log(std::max(mean, 1e-12));
    case GbtObjective::squared:
      return mean;
  }
  throw std::invalid_argument("gbt: unknown objective");
}

void grad_hess(GbtObjective objective, const Vector& raw, const Vector& t, const Vector* w,
               Vector& g, Vector& h) {
  const Eigen::Index n = raw.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    switch (objective) {
      case GbtObjective::logloss: {
        const double p = sigmoid(raw[i]);
        g[i] = wi * (p - t[i]);
        h[i] = wi * std::max(p * (1.0 - p), 1e-16);
        break;
      }
      case GbtObjective::poisson: {
        const double mu = std::exp(raw[i]);
        g[i] = wi * (mu - t[i]);
        h[i] = wi * mu;
        break;
      }
      case GbtObjective::squared:
        g[i] = wi * (raw[i] - t[i]);
        h[i] = wi;
        break;
    }
  }
}

double mean_loss(GbtObjective objective, const Vector& raw, const Vector& t, const Vector* w) {
  double total = 0.0;
  double wsum = 0.0;
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    wsum += wi;
    switch (objective) {
      case GbtObjective::logloss:
        total += wi * (softplus(raw[i]) - t[i] * raw[i]);
        break;
      case GbtObjective::poisson:
        total += wi * (std::exp(raw[i]) - t[i] * raw[i]);
        break;
      case GbtObjective::squared: {
        const double r = t[i] - raw[i];
        total += wi * 0.5 * r * r;
        break;
      }
    }
  }
  return total / wsum;
}

constexpr double kMinSplitGain = 1e-12;

struct BuildNode {
  double sum_g = 0.0;
  double sum_h = 0.0;
  std::int64_t count = 0;
  // Best split found so far at the current level.
  double best_gain = 0.0;
  int best_feature = -1;
  double best_threshold = 0.0;
  double best_left_g = 0.0;
  double best_left_h = 0.0;
  std::int64_t best_left_count = 0;
};

double leaf_objective(double g, double h, double l2) {
  const double denom = h + l2;
  return denom > 0.0 ? g * g / denom : 0.0;
}

}  // namespace

GbtFitResult fit_gbt(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                     const Vector* weights) {
  const Eigen::Index n = X.rows();
  const int d = static_cast<int>(X.cols());
  const double l2 = spec.l2_penalty;

  // One argsort per feature, shared by all trees.
  std::vector<std::vector<std::int32_t>> order(static_cast<std::size_t>(d));
  for (int f = 0; f < d; ++f) {
    auto& idx = order[static_cast<std::size_t>(f)];
    idx.resize(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    const double* col = X.col(f).data();
    std::sort(idx.begin(), idx.end(), [col](std::int32_t a, std::int32_t b) {
      if (col[a] != col[b]) return col[a] < col[b];
      return a < b;
    });
  }

  GbtFitResult out;
  out.model.objective = spec.objective;
  out.model.base_score = base_score_for(spec.objective, targets, weights);

  Vector raw = Vector::Constant(n, out.model.base_score);
  out.loss.push_back(mean_loss(spec.objective, raw, targets, weights));

  Vector g(n), h(n);
  std::vector<std::int32_t> node_of(static_cast<std::size_t>(n));

  for (int round = 0; round < spec.tree_count; ++round) {
    grad_hess(spec.objective, raw, targets, weights, g, h);

    GbtTree tree;
    tree.nodes.push_back(GbtNode{});
    std::vector<BuildNode> build(1);
    build[0].sum_g = g.sum();
    build[0].sum_h = h.sum();
    build[0].count = n;
    std::fill(node_of.begin(), node_of.end(), 0);

    std::vector<std::int32_t> active{0};
    for (int level = 0; level < spec.tree_depth && !active.empty(); ++level) {
      for (std::int32_t nd : active) {
        build[static_cast<std::size_t>(nd)].best_gain = 0.0;
        build[static_cast<std::size_t>(nd)].best_feature = -1;
      }

      std::vector<std::uint8_t> is_active(build.size(), 0);
      for (std::int32_t nd : active) is_active[static_cast<std::size_t>(nd)] = 1;

      std::vector<double> left_g(build.size()), left_h(build.size()), last_value(build.size());
      std::vector<std::int64_t> left_count(build.size());
      std::vector<std::uint8_t> has_last(build.size());

      for (int f = 0; f < d; ++f) {
        std::fill(left_g.begin(), left_g.end(), 0.0);
        std::fill(left_h.begin(), left_h.end(), 0.0);
        std::fill(left_count.begin(), left_count.end(), 0);
        std::fill(has_last.begin(), has_last.end(), 0);
        const double* col = X.col(f).data();

        for (std::int32_t row : order[static_cast<std::size_t>(f)]) {
          const std::int32_t nd = node_of[static_cast<std::size_t>(row)];
          if (!is_active[static_cast<std::size_t>(nd)]) continue;
          auto& bn = build[static_cast<std::size_t>(nd)];
          const auto ndx = static_cast<std::size_t>(nd);
          const double v = col[row];
          if (has_last[ndx] && v > last_value[ndx] && left_count[ndx] >= spec.min_leaf_count &&
              bn.count - left_count[ndx] >= spec.min_leaf_count) {
            const double gain = leaf_objective(left_g[ndx], left_h[ndx], l2) +
                                leaf_objective(bn.sum_g - left_g[ndx], bn.sum_h - left_h[ndx], l2) -
                                leaf_objective(bn.sum_g, bn.sum_h, l2);
            if (gain > bn.best_gain + kMinSplitGain) {
              bn.best_gain = gain;
              bn.best_feature = f;
              bn.best_threshold = 0.5 * (last_value[ndx] + v);
              bn.best_left_g = left_g[ndx];
              bn.best_left_h = left_h[ndx];
              bn.best_left_count = left_count[ndx];
            }
          }
          left_g[ndx] += g[row];
          left_h[ndx] += h[row];
          left_count[ndx] += 1;
          last_value[ndx] = v;
          has_last[ndx] = 1;
        }
      }

      // Materialize the chosen splits and push children for the next level.
      std::vector<std::int32_t> next_active;
      for (std::int32_t nd : active) {
        auto& bn = build[static_cast<std::size_t>(nd)];
        if (bn.best_feature < 0) continue;
        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        const auto right_id = left_id + 1;
        tree.nodes[static_cast<std::size_t>(nd)].feature = bn.best_feature;
        tree.nodes[static_cast<std::size_t>(nd)].threshold = bn.best_threshold;
        tree.nodes[static_cast<std::size_t>(nd)].left = left_id;
        tree.nodes[static_cast<std::size_t>(nd)].right = right_id;
        tree.nodes.push_back(GbtNode{});
        tree.nodes.push_back(GbtNode{});
        build.resize(tree.nodes.size());
        build[static_cast<std::size_t>(left_id)].sum_g = bn.best_left_g;
        build[static_cast<std::size_t>(left_id)].sum_h = bn.best_left_h;
        build[static_cast<std::size_t>(left_id)].count = bn.best_left_count;
        build[static_cast<std::size_t>(right_id)].sum_g = bn.sum_g - bn.best_left_g;
        build[static_cast<std::size_t>(right_id)].sum_h = bn.sum_h - bn.best_left_h;
        build[static_cast<std::size_t>(right_id)].count = bn.count - bn.best_left_count;
        next_active.push_back(left_id);
        next_active.push_back(right_id);
      }

      if (!next_active.empty()) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const std::int32_t nd = node_of[static_cast<std::size_t>(i)];
          const GbtNode& node = tree.nodes[static_cast<std::size_t>(nd)];
          if (node.feature >= 0) {
            node_of[static_cast<std::size_t>(i)] =
                X(i, node.feature) <= node.threshold ? node.left : node.right;
          }
        }
      }
      active = std::move(next_active);
    }

    // Leaf values carry the learning rate, so stored trees predict by plain
    // summation.
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      if (tree.nodes[id].feature < 0) {
        const double denom = build[id].sum_h + l2;
        tree.nodes[id].value = denom > 0.0 ? -spec.learning_rate * build[id].sum_g / denom : 0.0;
      }
    }

    for (Eigen::Index i = 0; i < n; ++i) {
      raw[i] += tree.nodes[static_cast<std::size_t>(node_of[i])].value;
    }
    out.model.trees.push_back(std::move(tree));
    out.loss.push_back(mean_loss(spec.objective, raw, targets, weights));
  }

  return out;
}

Vector gbt_raw_score(const GbtModel& model, const Matrix& X) {
  Vector raw = Vector::Constant(X.rows(), model.base_score);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double acc = 0.0;
    for (const GbtTree& tree : model.trees) {
      int nd = 0;
      while (tree.nodes[static_cast<std::size_t>(nd)].feature >= 0) {
        const GbtNode& node = tree.nodes[static_cast<std::size_t>(nd)];
        nd = X(i, node.feature) <= node.threshold ? node.left : node.right;
      }
      acc += tree.nodes[static_cast<std::size_t>(nd)].value;
    }
    raw[i] += acc;
  }
  return raw;
}

Vector gbt_mean_from_raw(GbtObjective objective, const Vector& raw) {
  switch (objective) {
    case GbtObjective::logloss: {
      Vector out(raw.size());
      for (Eigen::Index i = 0; i < raw.size(); ++i) out[i] = sigmoid(raw[i]);
      return out;
    }
    case GbtObjective::poisson:
      return raw.array().exp();
    case GbtObjective::squared:
      return raw;
  }
  throw std::invalid_argument("gbt: unknown objective");
}

}  // namespace rcate::detail
