#include "rcate/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "learner_detail.hpp"

namespace rcate {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::logistic_glm:
      return "logistic_glm";
    case LearnerKind::poisson_glm:
      return "poisson_glm";
    case LearnerKind::linear_glm:
      return "linear_glm";
    case LearnerKind::gbt:
      return "gbt";
  }
  throw std::invalid_argument("unknown learner kind");
}

std::string to_string(GbtObjective objective) {
  switch (objective) {
    case GbtObjective::logloss:
      return "logloss";
    case GbtObjective::poisson:
      return "poisson";
    case GbtObjective::squared:
      return "squared";
  }
  throw std::invalid_argument("unknown gbt objective");
}

LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "logistic_glm") return LearnerKind::logistic_glm;
  if (s == "poisson_glm") return LearnerKind::poisson_glm;
  if (s == "linear_glm") return LearnerKind::linear_glm;
  if (s == "gbt") return LearnerKind::gbt;
  throw std::invalid_argument("unknown learner kind: " + s);
}

GbtObjective gbt_objective_from_string(const std::string& s) {
  if (s == "logloss") return GbtObjective::logloss;
  if (s == "poisson") return GbtObjective::poisson;
  if (s == "squared") return GbtObjective::squared;
  throw std::invalid_argument("unknown gbt objective: " + s);
}

void LearnerSpec::validate() const {
  if (max_iterations < 0) throw std::invalid_argument("learner spec: max_iterations < 0");
  if (!(tolerance > 0.0)) throw std::invalid_argument("learner spec: tolerance must be positive");
  if (l2_penalty < 0.0) throw std::invalid_argument("learner spec: l2_penalty < 0");
  if (kind == LearnerKind::gbt) {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learner spec: learning_rate <= 0");
    if (tree_depth < 1) throw std::invalid_argument("learner spec: tree_depth < 1");
    if (tree_count < 1) throw std::invalid_argument("learner spec: tree_count < 1");
    if (min_leaf_count < 1) throw std::invalid_argument("learner spec: min_leaf_count < 1");
  }
}

LearnerSpec LearnerSpec::logistic(double l2) {
  LearnerSpec spec;
  spec.kind = LearnerKind::logistic_glm;
  spec.l2_penalty = l2;
  return spec;
}

LearnerSpec LearnerSpec::poisson(double l2) {
  LearnerSpec spec;
  spec.kind = LearnerKind::poisson_glm;
  spec.l2_penalty = l2;
  return spec;
}

LearnerSpec LearnerSpec::linear(double l2) {
  LearnerSpec spec;
  spec.kind = LearnerKind::linear_glm;
  spec.l2_penalty = l2;
  return spec;
}

LearnerSpec LearnerSpec::boosted(GbtObjective objective) {
  LearnerSpec spec;
  spec.kind = LearnerKind::gbt;
  spec.objective = objective;
  return spec;
}

FittedModel::FittedModel(LearnerSpec spec, GlmModel glm, std::vector<double> loss,
                         Index n_features)
    : spec_(spec), impl_(std::move(glm)), loss_(std::move(loss)), n_features_(n_features) {}

FittedModel::FittedModel(LearnerSpec spec, GbtModel gbt, std::vector<double> loss,
                         Index n_features)
    : spec_(spec), impl_(std::move(gbt)), loss_(std::move(loss)), n_features_(n_features) {}

namespace {

void check_width(Index expected, const Matrix& X) {
  if (static_cast<Index>(X.cols()) != expected) {
    throw std::invalid_argument("predict: feature count does not match fitted model");
  }
}

}  // namespace

Vector FittedModel::predict(const Matrix& X) const {
  check_width(n_features_, X);
  if (const auto* glm = std::get_if<GlmModel>(&impl_)) {
    return detail::glm_mean_from_eta(glm->kind, detail::glm_eta(*glm, X, nullptr));
  }
  const auto& gbt = std::get<GbtModel>(impl_);
  return detail::gbt_mean_from_raw(gbt.objective, detail::gbt_raw_score(gbt, X));
}

Vector FittedModel::predict_with_offset(const Matrix& X, const Vector& offset) const {
  check_width(n_features_, X);
  const auto* glm = std::get_if<GlmModel>(&impl_);
  if (!glm) throw std::invalid_argument("predict_with_offset: offsets are GLM-only");
  return detail::glm_mean_from_eta(glm->kind, detail::glm_eta(*glm, X, &offset));
}

Vector FittedModel::raw_score(const Matrix& X) const {
  check_width(n_features_, X);
  if (const auto* glm = std::get_if<GlmModel>(&impl_)) {
    return detail::glm_eta(*glm, X, nullptr);
  }
  return detail::gbt_raw_score(std::get<GbtModel>(impl_), X);
}

const GlmModel& FittedModel::glm() const {
  const auto* glm = std::get_if<GlmModel>(&impl_);
  if (!glm) throw std::invalid_argument("model is not a GLM");
  return *glm;
}

const GbtModel& FittedModel::gbt() const {
  const auto* gbt = std::get_if<GbtModel>(&impl_);
  if (!gbt) throw std::invalid_argument("model is not a GBT");
  return *gbt;
}

namespace {

void validate_fit_inputs(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                         const Vector* weights, const Vector* offset) {
  spec.validate();
  if (X.rows() < 1) throw std::invalid_argument("fit: empty training set");
  if (X.rows() != targets.size()) throw std::invalid_argument("fit: target length mismatch");
  if (!X.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("fit: non-finite training value");
  }
  if (weights) {
    if (weights->size() != X.rows()) throw std::invalid_argument("fit: weight length mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < weights->size(); ++i) {
      if (!((*weights)[i] >= 0.0)) throw std::invalid_argument("fit: negative weight");
      sum += (*weights)[i];
    }
    if (!(sum > 0.0)) throw std::invalid_argument("fit: weights sum to zero");
  }
  if (offset) {
    if (!spec.supports_offset()) throw std::invalid_argument("fit: offsets are GLM-only");
    if (offset->size() != X.rows()) throw std::invalid_argument("fit: offset length mismatch");
    if (!offset->allFinite()) throw std::invalid_argument("fit: non-finite offset");
  }

  const bool needs_unit = spec.kind == LearnerKind::logistic_glm ||
                          (spec.kind == LearnerKind::gbt && spec.objective == GbtObjective::logloss);
  const bool needs_nonneg = spec.kind == LearnerKind::poisson_glm ||
                            (spec.kind == LearnerKind::gbt && spec.objective == GbtObjective::poisson);
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    if (needs_unit && (targets[i] < 0.0 || targets[i] > 1.0)) {
      throw std::invalid_argument("fit: logloss targets must lie in [0, 1]");
    }
    if (needs_nonneg && targets[i] < 0.0) {
      throw std::invalid_argument("fit: poisson targets must be nonnegative");
    }
  }
}

}  // namespace

FittedModel fit(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                const Vector* weights, const Vector* offset) {
  validate_fit_inputs(spec, X, targets, weights, offset);
  if (spec.kind == LearnerKind::gbt) {
    auto result = detail::fit_gbt(spec, X, targets, weights);
    return FittedModel(spec, std::move(result.model), std::move(result.loss),
                       static_cast<Index>(X.cols()));
  }
  auto result = detail::fit_glm(spec, X, targets, weights, offset);
  return FittedModel(spec, std::move(result.model), std::move(result.loss),
                     static_cast<Index>(X.cols()));
}

nlohmann::json FittedModel::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(spec_.kind);
  j["spec"] = {{"objective", to_string(spec_.objective)},
               {"max_iterations", spec_.max_iterations},
               {"tolerance", spec_.tolerance},
               {"l2_penalty", spec_.l2_penalty},
               {"learning_rate", spec_.learning_rate},
               {"tree_depth", spec_.tree_depth},
               {"tree_count", spec_.tree_count},
               {"min_leaf_count", spec_.min_leaf_count}};
  j["n_features"] = n_features_;
  if (const auto* glm = std::get_if<GlmModel>(&impl_)) {
    j["beta"] = std::vector<double>(glm->beta.data(), glm->beta.data() + glm->beta.size());
  } else {
    const auto& gbt = std::get<GbtModel>(impl_);
    j["base_score"] = gbt.base_score;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : gbt.trees) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const auto& node : tree.nodes) {
        nodes.push_back({node.feature, node.threshold, node.left, node.right, node.value});
      }
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  }
  return j;
}

FittedModel FittedModel::from_json(const nlohmann::json& j) {
  LearnerSpec spec;
  spec.kind = learner_kind_from_string(j.at("kind").get<std::string>());
  const auto& s = j.at("spec");
  spec.objective = gbt_objective_from_string(s.at("objective").get<std::string>());
  spec.max_iterations = s.at("max_iterations").get<int>();
  spec.tolerance = s.at("tolerance").get<double>();
  spec.l2_penalty = s.at("l2_penalty").get<double>();
  spec.learning_rate = s.at("learning_rate").get<double>();
  spec.tree_depth = s.at("tree_depth").get<int>();
  spec.tree_count = s.at("tree_count").get<int>();
  spec.min_leaf_count = s.at("min_leaf_count").get<int>();

  if (spec.kind != LearnerKind::gbt) {
    GlmModel glm;
    glm.kind = spec.kind;
    const auto beta = j.at("beta").get<std::vector<double>>();
    glm.beta = Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    return FittedModel(spec, std::move(glm), {}, j.at("n_features").get<Index>());
  }
  GbtModel gbt;
  gbt.objective = spec.objective;
  gbt.base_score = j.at("base_score").get<double>();
  for (const auto& tj : j.at("trees")) {
    GbtTree tree;
    for (const auto& nj : tj) {
      GbtNode node;
      node.feature = nj.at(0).get<int>();
      node.threshold = nj.at(1).get<double>();
      node.left = nj.at(2).get<int>();
      node.right = nj.at(3).get<int>();
      node.value = nj.at(4).get<double>();
      tree.nodes.push_back(node);
    }
    gbt.trees.push_back(std::move(tree));
  }
  return FittedModel(spec, std::move(gbt), {}, j.at("n_features").get<Index>());
}

}  // namespace rcate
