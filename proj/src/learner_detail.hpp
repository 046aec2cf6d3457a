#pragma once

// Internal fitting routines behind the FittedModel facade.

#include <vector>

#include "rcate/learner.hpp"

namespace rcate::detail {

double sigmoid(double x);
double softplus(double x);

struct GlmFitResult {
  GlmModel model;
  std::vector<double> loss;
};

GlmFitResult fit_glm(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                     const Vector* weights, const Vector* offset);

Vector glm_eta(const GlmModel& model, const Matrix& X, const Vector* offset);
Vector glm_mean_from_eta(LearnerKind kind, const Vector& eta);

struct GbtFitResult {
  GbtModel model;
  std::vector<double> loss;
};

GbtFitResult fit_gbt(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                     const Vector* weights);

Vector gbt_raw_score(const GbtModel& model, const Matrix& X);
Vector gbt_mean_from_raw(GbtObjective objective, const Vector& raw);

}  // namespace rcate::detail
