#pragma once

// Base supervised learners the estimators are assembled from: ridge-penalized
// GLMs (logistic, Poisson, linear) fitted by safeguarded IRLS, and exact-split
// gradient-boosted trees on logloss, Poisson, or squared objectives. All fits
// are deterministic functions of their inputs; learners never clip their
// predictions, probability bounds are the caller's job.

#include <nlohmann/json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "rcate/data.hpp"

namespace rcate {

enum class LearnerKind { logistic_glm, poisson_glm, linear_glm, gbt };
enum class GbtObjective { logloss, poisson, squared };

std::string to_string(LearnerKind kind);
std::string to_string(GbtObjective objective);
LearnerKind learner_kind_from_string(const std::string& s);
GbtObjective gbt_objective_from_string(const std::string& s);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::gbt;
  GbtObjective objective = GbtObjective::logloss;  // gbt only

  // GLM settings. max_iterations = 0 keeps the zero coefficient vector, which
  // turns predict-with-offset into a pure offset transform.
  int max_iterations = 100;
  double tolerance = 1e-10;

  // Shared ridge strength: coefficient penalty for GLMs (intercept exempt),
  // leaf denominator regularizer for trees.
  double l2_penalty = 1.0;

  // GBT settings.
  double learning_rate = 0.1;
  int tree_depth = 3;
  int tree_count = 200;
  int min_leaf_count = 20;

  bool supports_offset() const { return kind != LearnerKind::gbt; }
  void validate() const;

  static LearnerSpec logistic(double l2 = 1e-6);
  static LearnerSpec poisson(double l2 = 1e-6);
  static LearnerSpec linear(double l2 = 1e-6);
  static LearnerSpec boosted(GbtObjective objective);
};

struct GlmModel {
  LearnerKind kind = LearnerKind::logistic_glm;
  Vector beta;  // intercept first, then one coefficient per feature
};

struct GbtNode {
  int feature = -1;  // negative marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct GbtTree {
  std::vector<GbtNode> nodes;
};

struct GbtModel {
  GbtObjective objective = GbtObjective::squared;
  double base_score = 0.0;
  std::vector<GbtTree> trees;
};

class FittedModel {
 public:
  FittedModel(LearnerSpec spec, GlmModel glm, std::vector<double> loss, Index n_features);
  FittedModel(LearnerSpec spec, GbtModel gbt, std::vector<double> loss, Index n_features);

  const LearnerSpec& spec() const { return spec_; }
  Index n_features() const { return n_features_; }

  // Mean-scale predictions: probabilities for logistic/logloss, positive
  // rates for poisson, raw values for linear/squared.
  Vector predict(const Matrix& X) const;

  // GLM-only: predictions with a per-row offset added to the linear predictor.
  Vector predict_with_offset(const Matrix& X, const Vector& offset) const;

  // Link-scale score without any offset: the linear predictor for GLMs, the
  // accumulated boosting score for trees.
  Vector raw_score(const Matrix& X) const;

  // Training objective per IRLS iteration / boosting round, first entry is
  // the objective at initialization. Not serialized.
  const std::vector<double>& training_loss() const { return loss_; }

  const GlmModel& glm() const;
  const GbtModel& gbt() const;

  nlohmann::json to_json() const;
  static FittedModel from_json(const nlohmann::json& j);

 private:
  LearnerSpec spec_;
  std::variant<GlmModel, GbtModel> impl_;
  std::vector<double> loss_;
  Index n_features_ = 0;
};

// Fit a model. `weights` (optional) must be nonnegative with a positive sum;
// `offset` is GLM-only. Targets must match the objective: [0, 1] for
// logistic/logloss, nonnegative for poisson.
FittedModel fit(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                const Vector* weights = nullptr, const Vector* offset = nullptr);

// Gradient of the penalized GLM objective at `params` (intercept first).
// Matches the objective minimized by fit() so finite differences can audit it.
Vector glm_gradient(const LearnerSpec& spec, const Vector& params, const Matrix& X,
                    const Vector& targets, const Vector* weights = nullptr,
                    const Vector* offset = nullptr);

// Penalized GLM objective value itself (weighted NLL plus ridge term).
double glm_objective(const LearnerSpec& spec, const Vector& params, const Matrix& X,
                     const Vector& targets, const Vector* weights = nullptr,
                     const Vector* offset = nullptr);

}  // namespace rcate
