#pragma once

// Estimators for the multiplicative treatment effect tau(x) = mu1(x)/mu0(x)
// on binary outcomes.
//
// Plug-in family: S (treatment as a feature), T (one outcome model per arm),
// Q (converter propensity p and assignment propensity e combined through the
// odds identity tau = [p/(1-p)] * [(1-e)/e]), Q-Simple (design e instead of a
// fitted one; the only learner that works when just converter rows carry
// treatment labels), and the offset variant (single logistic fit of W on the
// converters with logit(e-hat) offset; exp of the fitted remainder scores).
//
// Doubly robust family: pseudo-outcomes on the direct or log scale from
// either the (mu0, mu1, e) or the (p, m, e) nuisance parameterization,
// cross-fitted and regressed on X in a final stage. The raw *_gamma kernels
// are exposed unclipped so identity and bias checks can enumerate them; the
// *_pseudo wrappers apply the stability clipping used by the fitting
// pipeline.

#include <memory>
#include <string>
#include <vector>

#include "rcate/data.hpp"
#include "rcate/learner.hpp"
#include "rcate/nuisance.hpp"

namespace rcate {

// Odds identity on the ratio scale; requires interior probabilities.
double q_tau(double p_hat, double e_hat);

double logit(double probability);

// Raw pseudo-outcome kernels, no clipping. w and y are 0/1.
double dr_st_gamma(double w, double y, double e, double mu0, double mu1);
double dr_st_gamma_log(double w, double y, double e, double mu0, double mu1);
double dr_q_gamma(double w, double y, double e, double p, double m);
double dr_q_gamma_log(double w, double y, double e, double p, double m);
// Converter-row kernels for the known-design variant.
double dr_q_simple_gamma(double w, double e, double p);
double dr_q_simple_gamma_log(double w, double e, double p);

// Clipped pseudo-outcomes as consumed by the final-stage regression.
double dr_st_pseudo(double w, double y, double e, double mu0, double mu1,
                    const ClippingConfig& clip_cfg);
double dr_st_pseudo_log(double w, double y, double e, double mu0, double mu1,
                        const ClippingConfig& clip_cfg);
double dr_q_pseudo(double w, double y, double e, double p, double m,
                   const ClippingConfig& clip_cfg);
double dr_q_pseudo_log(double w, double y, double e, double p, double m,
                       const ClippingConfig& clip_cfg);
double dr_q_simple_pseudo(double w, double e, double p, const ClippingConfig& clip_cfg);
double dr_q_simple_pseudo_log(double w, double e, double p, const ClippingConfig& clip_cfg);

enum class DrVariant { dr_s, dr_t, dr_q, dr_q_simple };
enum class PseudoScale { direct, log };

std::string to_string(DrVariant variant);
std::string to_string(PseudoScale scale);

struct PseudoOutcomes {
  Vector values;  // clipped; rows outside the mask hold 0 and are ignored
  PseudoScale scale = PseudoScale::direct;
  std::vector<std::uint8_t> mask;  // 1 = row enters the final regression
  std::string learner_id;
};

// Row-wise pseudo-outcomes from an already-fitted bundle. dr_q_simple masks
// non-converters and insists on a design-sourced e; the other variants use
// every row. Throws when the bundle lacks a component the variant needs.
PseudoOutcomes compute_pseudo_outcomes(DrVariant variant, PseudoScale scale, const Dataset& data,
                                       const NuisanceBundle& bundle,
                                       const ClippingConfig& clip_cfg);

// A fitted scorer on the ratio scale. Scores are strictly positive. Models
// built on a design propensity (Q-Simple) need the matching per-row design
// values at scoring time; everything else ignores that argument.
class TauModel {
 public:
  virtual ~TauModel() = default;
  virtual Vector score(const Matrix& X, const Vector* known_e = nullptr) const = 0;
  const std::string& id() const { return id_; }

 protected:
  explicit TauModel(std::string id) : id_(std::move(id)) {}

 private:
  std::string id_;
};

std::unique_ptr<TauModel> fit_s_learner(const Dataset& train, const LearnerSpec& spec,
                                        const ClippingConfig& clip_cfg);
std::unique_ptr<TauModel> fit_t_learner(const Dataset& train, const LearnerSpec& spec,
                                        const ClippingConfig& clip_cfg);
std::unique_ptr<TauModel> fit_q_learner(const Dataset& train, const LearnerSpec& spec,
                                        const ClippingConfig& clip_cfg, bool simple);
std::unique_ptr<TauModel> fit_q_offset_learner(const Dataset& train, const LearnerSpec& glm_spec,
                                               const ClippingConfig& clip_cfg);

// Cross-fits the variant's nuisances with `nuisance_spec`, builds clipped
// pseudo-outcomes, and regresses them on X with `final_spec` (Poisson
// objective on the direct scale, squared on the log scale, where the score is
// exp of the regression output). use_known_e swaps the fitted propensity for
// the design one; dr_q_simple always requires the design propensity.
std::unique_ptr<TauModel> fit_dr_learner(const Dataset& train, const FoldPlan& folds,
                                         const LearnerSpec& nuisance_spec,
                                         const LearnerSpec& final_spec,
                                         const ClippingConfig& clip_cfg, DrVariant variant,
                                         PseudoScale scale, bool use_known_e = false);

// Same final stage on an injected bundle (oracle tests, nuisance reuse).
std::unique_ptr<TauModel> fit_dr_learner_with_bundle(const Dataset& train,
                                                     const NuisanceBundle& bundle,
                                                     const LearnerSpec& final_spec,
                                                     const ClippingConfig& clip_cfg,
                                                     DrVariant variant, PseudoScale scale);

// Final-stage spec matching a scale when the caller does not care: gbt with
// the Poisson objective (direct) or the squared objective (log).
LearnerSpec default_final_spec(PseudoScale scale);

}  // namespace rcate
