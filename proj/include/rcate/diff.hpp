#pragma once

// Difference-scale CATE baselines (X-Learner, R-Learner, AIPW pseudo-outcome
// regression) plus the conversion that puts their scores on the ratio scale,
// tau_ratio(x) = 1 + tau_diff(x) / mu0(x), so they rank and calibrate in the
// same reports as the native ratio learners.

#include <memory>
#include <string>

#include "rcate/data.hpp"
#include "rcate/learner.hpp"
#include "rcate/nuisance.hpp"
#include "rcate/ratio.hpp"

namespace rcate {

// Raw difference-scale influence value for one row.
double aipw_gamma(double w, double y, double e, double mu0, double mu1);

// Ratio-scale conversion of a difference estimate at baseline mu0 (already
// clipped positive); the result is clipped like any direct-scale score.
double to_ratio(double tau_diff, double mu0_hat, const ClippingConfig& clip_cfg);

// A fitted difference-scale scorer with a companion baseline model so it can
// also score on the ratio scale.
class DiffTauModel {
 public:
  virtual ~DiffTauModel() = default;
  virtual Vector score_diff(const Matrix& X, const Vector* known_e = nullptr) const = 0;
  Vector score_ratio(const Matrix& X, const Vector* known_e = nullptr) const;
  const std::string& id() const { return id_; }

 protected:
  DiffTauModel(std::string id, FittedModel baseline, ClippingConfig clip_cfg)
      : id_(std::move(id)), baseline_(std::move(baseline)), clip_(clip_cfg) {}

  const FittedModel& baseline() const { return baseline_; }
  const ClippingConfig& clip_config() const { return clip_; }

 private:
  std::string id_;
  FittedModel baseline_;  // control-arm outcome model for the conversion
  ClippingConfig clip_;
};

// Two-stage imputed-effect construction: per-arm outcome models, per-arm
// regressions of the imputed effects, blended with the propensity (design
// values when the dataset carries them, otherwise a fitted model).
std::unique_ptr<DiffTauModel> fit_x_learner(const Dataset& train, const LearnerSpec& spec,
                                            const ClippingConfig& clip_cfg);

// Residual-on-residual regression: (Y - m-hat)/(W - e-hat) on X with weights
// (W - e-hat)^2, cross-fitted residuals, rows with |W - e-hat| < eps_e
// excluded.
std::unique_ptr<DiffTauModel> fit_r_learner(const Dataset& train, const FoldPlan& folds,
                                            const LearnerSpec& spec,
                                            const ClippingConfig& clip_cfg);
std::unique_ptr<DiffTauModel> fit_r_learner(const Dataset& train, const NuisanceBundle& bundle,
                                            const LearnerSpec& spec,
                                            const ClippingConfig& clip_cfg);

// Squared-loss regression of the cross-fitted AIPW pseudo-outcome on X.
std::unique_ptr<DiffTauModel> fit_aipw_learner(const Dataset& train, const FoldPlan& folds,
                                               const LearnerSpec& spec,
                                               const ClippingConfig& clip_cfg);
std::unique_ptr<DiffTauModel> fit_aipw_learner(const Dataset& train, const NuisanceBundle& bundle,
                                               const LearnerSpec& spec,
                                               const ClippingConfig& clip_cfg);

// Ratio-scale adapter so difference learners can run wherever a TauModel is
// expected.
std::unique_ptr<TauModel> as_ratio_model(std::unique_ptr<DiffTauModel> model);

}  // namespace rcate
