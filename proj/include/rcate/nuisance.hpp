#pragma once

// Cross-fitted nuisance estimation. Every component is predicted out of fold:
// the model scoring fold j saw only rows outside fold j. The converter
// propensity p is special twice over: its training rows are the converters of
// each fold complement (same fold plan as everything else, restricted), and
// its predictions still cover every row.

#include <utility>

#include "rcate/data.hpp"
#include "rcate/learner.hpp"

namespace rcate {

enum class NuisanceSource { unused, cross_fitted, known_design };

struct NuisanceBundle {
  Vector e_hat;    // assignment propensity P(W=1 | X)
  Vector mu0_hat;  // control conversion P(Y=1 | W=0, X)
  Vector mu1_hat;  // treated conversion P(Y=1 | W=1, X)
  Vector p_hat;    // converter propensity P(W=1 | Y=1, X)
  Vector m_hat;    // marginal conversion P(Y=1 | X)

  NuisanceSource e_source = NuisanceSource::unused;
  NuisanceSource mu_source = NuisanceSource::unused;
  NuisanceSource p_source = NuisanceSource::unused;
  NuisanceSource m_source = NuisanceSource::unused;
};

struct NuisanceRequest {
  bool e = false;
  bool mu = false;  // per-arm outcome models
  bool p = false;
  bool m = false;
  // Copy the design propensity into e_hat instead of fitting it. Requires the
  // dataset to carry known_propensity.
  bool use_known_e = false;
};

// All requested components are clipped to their stability ranges before they
// are returned. Throws std::runtime_error naming the fold when a fold
// complement lacks the rows a component needs (no converters for p, a missing
// arm for mu).
NuisanceBundle fit_nuisances(const Dataset& data, const FoldPlan& folds, const LearnerSpec& spec,
                             const ClippingConfig& clip_cfg, const NuisanceRequest& request);

// Cross-fitted outcome pair from a single model that takes the treatment as
// an extra feature, predicted with that feature forced to 0 and 1.
std::pair<Vector, Vector> mu_via_s_learner(const Dataset& data, const FoldPlan& folds,
                                           const LearnerSpec& spec,
                                           const ClippingConfig& clip_cfg);

// Features with the treatment appended as the last column (shared by the
// S-style fits here and the plug-in S-Learner).
Matrix features_with_treatment(const Matrix& features, const Vector& treatment);

}  // namespace rcate
