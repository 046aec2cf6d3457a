#include "rcate/ratio.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rcate {

namespace {

void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie strictly in (0, 1)");
  }
}

void check_binary(double v, const char* what) {
  if (v != 0.0 && v != 1.0) {
    throw std::invalid_argument(std::string(what) + " must be 0 or 1");
  }
}

}  // namespace

double q_tau(double p_hat, double e_hat) {
  check_unit_interval(p_hat, "q_tau: p");
  check_unit_interval(e_hat, "q_tau: e");
  return (p_hat / (1.0 - p_hat)) * ((1.0 - e_hat) / e_hat);
}

double logit(double probability) {
  check_unit_interval(probability, "logit: input");
  return std::log(probability / (1.0 - probability));
}

double dr_st_gamma(double w, double y, double e, double mu0, double mu1) {
  const double tau = mu1 / mu0;
  return tau + w * (y - mu1) / (e * mu0) - tau * (1.0 - w) * (y - mu0) / ((1.0 - e) * mu0);
}

double dr_st_gamma_log(double w, double y, double e, double mu0, double mu1) {
  return std::log(mu1) - std::log(mu0) + w * (y - mu1) / (e * mu1) -
         (1.0 - w) * (y - mu0) / ((1.0 - e) * mu0);
}

double dr_q_gamma(double w, double y, double e, double p, double m) {
  const double tau = q_tau(p, e);
  const double one_minus_p = 1.0 - p;
  return tau + (1.0 - e) * y * (w - p) / (e * m * one_minus_p * one_minus_p) -
         p * (w - e) / (one_minus_p * e * e);
}

double dr_q_gamma_log(double w, double y, double e, double p, double m) {
  return logit(p) - logit(e) + y * (w - p) / (m * p * (1.0 - p)) - (w - e) / (e * (1.0 - e));
}

double dr_q_simple_gamma(double w, double e, double p) {
  const double tau = q_tau(p, e);
  const double one_minus_p = 1.0 - p;
  return tau + (1.0 - e) * (w - p) / (e * one_minus_p * one_minus_p);
}

double dr_q_simple_gamma_log(double w, double e, double p) {
  return logit(p) - logit(e) + (w - p) / (p * (1.0 - p));
}

double dr_st_pseudo(double w, double y, double e, double mu0, double mu1,
                    const ClippingConfig& clip_cfg) {
  check_binary(w, "dr_st_pseudo: w");
  check_binary(y, "dr_st_pseudo: y");
  return clip_cfg.clip_tau(dr_st_gamma(w, y, e, mu0, mu1));
}

double dr_st_pseudo_log(double w, double y, double e, double mu0, double mu1,
                        const ClippingConfig& clip_cfg) {
  check_binary(w, "dr_st_pseudo_log: w");
  check_binary(y, "dr_st_pseudo_log: y");
  return clip_cfg.clip_log(dr_st_gamma_log(w, y, e, mu0, mu1));
}

double dr_q_pseudo(double w, double y, double e, double p, double m,
                   const ClippingConfig& clip_cfg) {
  check_binary(w, "dr_q_pseudo: w");
  check_binary(y, "dr_q_pseudo: y");
  return clip_cfg.clip_tau(dr_q_gamma(w, y, e, p, m));
}

double dr_q_pseudo_log(double w, double y, double e, double p, double m,
                       const ClippingConfig& clip_cfg) {
  check_binary(w, "dr_q_pseudo_log: w");
  check_binary(y, "dr_q_pseudo_log: y");
  return clip_cfg.clip_log(dr_q_gamma_log(w, y, e, p, m));
}

double dr_q_simple_pseudo(double w, double e, double p, const ClippingConfig& clip_cfg) {
  check_binary(w, "dr_q_simple_pseudo: w");
  return clip_cfg.clip_tau(dr_q_simple_gamma(w, e, p));
}

double dr_q_simple_pseudo_log(double w, double e, double p, const ClippingConfig& clip_cfg) {
  check_binary(w, "dr_q_simple_pseudo_log: w");
  return clip_cfg.clip_log(dr_q_simple_gamma_log(w, e, p));
}

std::string to_string(DrVariant variant) {
  switch (variant) {
    case DrVariant::dr_s:
      return "dr_s";
    case DrVariant::dr_t:
      return "dr_t";
    case DrVariant::dr_q:
      return "dr_q";
    case DrVariant::dr_q_simple:
      return "dr_q_simple";
  }
  throw std::invalid_argument("unknown DR variant");
}

std::string to_string(PseudoScale scale) {
  return scale == PseudoScale::direct ? "direct" : "log";
}

PseudoOutcomes compute_pseudo_outcomes(DrVariant variant, PseudoScale scale, const Dataset& data,
                                       const NuisanceBundle& bundle,
                                       const ClippingConfig& clip_cfg) {
  data.validate();
  clip_cfg.validate();
  const auto n = static_cast<Eigen::Index>(data.n_rows());

  const bool needs_mu = variant == DrVariant::dr_s || variant == DrVariant::dr_t;
  if (bundle.e_source == NuisanceSource::unused || bundle.e_hat.size() != n) {
    throw std::invalid_argument("pseudo-outcomes: bundle lacks e");
  }
  if (needs_mu &&
      (bundle.mu_source == NuisanceSource::unused || bundle.mu0_hat.size() != n ||
       bundle.mu1_hat.size() != n)) {
    throw std::invalid_argument("pseudo-outcomes: bundle lacks outcome models");
  }
  if (!needs_mu && (bundle.p_source == NuisanceSource::unused || bundle.p_hat.size() != n)) {
    throw std::invalid_argument("pseudo-outcomes: bundle lacks p");
  }
  if (variant == DrVariant::dr_q &&
      (bundle.m_source == NuisanceSource::unused || bundle.m_hat.size() != n)) {
    throw std::invalid_argument("pseudo-outcomes: bundle lacks m");
  }
  if (variant == DrVariant::dr_q_simple && bundle.e_source != NuisanceSource::known_design) {
    throw std::invalid_argument("pseudo-outcomes: dr_q_simple requires the design propensity");
  }

  PseudoOutcomes out;
  out.scale = scale;
  out.learner_id = to_string(variant) + (scale == PseudoScale::log ? "_log" : "");
  out.values = Vector::Zero(n);
  out.mask.assign(static_cast<std::size_t>(n), 1);

  std::size_t active = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = data.treatment[i];
    const double y = data.outcome[i];
    const double e = bundle.e_hat[i];
    double value = 0.0;
    switch (variant) {
      case DrVariant::dr_s:
      case DrVariant::dr_t:
        value = scale == PseudoScale::direct
                    ? dr_st_pseudo(w, y, e, bundle.mu0_hat[i], bundle.mu1_hat[i], clip_cfg)
                    : dr_st_pseudo_log(w, y, e, bundle.mu0_hat[i], bundle.mu1_hat[i], clip_cfg);
        break;
      case DrVariant::dr_q:
        value = scale == PseudoScale::direct
                    ? dr_q_pseudo(w, y, e, bundle.p_hat[i], bundle.m_hat[i], clip_cfg)
                    : dr_q_pseudo_log(w, y, e, bundle.p_hat[i], bundle.m_hat[i], clip_cfg);
        break;
      case DrVariant::dr_q_simple:
        if (y == 0.0) {
          out.mask[static_cast<std::size_t>(i)] = 0;
          continue;
        }
        value = scale == PseudoScale::direct
                    ? dr_q_simple_pseudo(w, e, bundle.p_hat[i], clip_cfg)
                    : dr_q_simple_pseudo_log(w, e, bundle.p_hat[i], clip_cfg);
        break;
    }
    out.values[i] = value;
    ++active;
  }
  if (active == 0) {
    throw std::runtime_error("pseudo-outcomes: no rows left after masking (no converters)");
  }
  return out;
}

LearnerSpec default_final_spec(PseudoScale scale) {
  return LearnerSpec::boosted(scale == PseudoScale::direct ? GbtObjective::poisson
                                                           : GbtObjective::squared);
}

namespace {

Vector clipped_probabilities(const FittedModel& model, const Matrix& X, double eps) {
  return clip_all(model.predict(X), eps, 1.0 - eps);
}

class SLearnerModel final : public TauModel {
 public:
  SLearnerModel(FittedModel model, ClippingConfig clip_cfg)
      : TauModel("s"), model_(std::move(model)), clip_(clip_cfg) {}

  Vector score(const Matrix& X, const Vector*) const override {
    Matrix design(X.rows(), X.cols() + 1);
    design.leftCols(X.cols()) = X;
    design.col(X.cols()).setZero();
    const Vector mu0 = clipped_probabilities(model_, design, clip_.eps_mu);
    design.col(X.cols()).setOnes();
    const Vector mu1 = clipped_probabilities(model_, design, clip_.eps_mu);
    return mu1.cwiseQuotient(mu0);
  }

 private:
  FittedModel model_;
  ClippingConfig clip_;
};

class TLearnerModel final : public TauModel {
 public:
  TLearnerModel(FittedModel arm0, FittedModel arm1, ClippingConfig clip_cfg)
      : TauModel("t"), arm0_(std::move(arm0)), arm1_(std::move(arm1)), clip_(clip_cfg) {}

  Vector score(const Matrix& X, const Vector*) const override {
    const Vector mu0 = clipped_probabilities(arm0_, X, clip_.eps_mu);
    const Vector mu1 = clipped_probabilities(arm1_, X, clip_.eps_mu);
    return mu1.cwiseQuotient(mu0);
  }

 private:
  FittedModel arm0_;
  FittedModel arm1_;
  ClippingConfig clip_;
};

class QLearnerModel final : public TauModel {
 public:
  QLearnerModel(FittedModel p_model, std::optional<FittedModel> e_model, ClippingConfig clip_cfg)
      : TauModel(e_model ? "q" : "q_simple"),
        p_model_(std::move(p_model)),
        e_model_(std::move(e_model)),
        clip_(clip_cfg) {}

  Vector score(const Matrix& X, const Vector* known_e) const override {
    const Vector p = clipped_probabilities(p_model_, X, clip_.eps_p);
    Vector e;
    if (e_model_) {
      e = clipped_probabilities(*e_model_, X, clip_.eps_e);
    } else {
      if (!known_e) {
        throw std::invalid_argument("q_simple: scoring needs the design propensity rows");
      }
      if (known_e->size() != X.rows()) {
        throw std::invalid_argument("q_simple: design propensity length mismatch");
      }
      e = clip_all(*known_e, clip_.eps_e, 1.0 - clip_.eps_e);
    }
    Vector out(X.rows());
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = q_tau(p[i], e[i]);
    return out;
  }

 private:
  FittedModel p_model_;
  std::optional<FittedModel> e_model_;
  ClippingConfig clip_;
};

class QOffsetModel final : public TauModel {
 public:
  explicit QOffsetModel(FittedModel remainder)
      : TauModel("q_offset"), remainder_(std::move(remainder)) {}

  Vector score(const Matrix& X, const Vector*) const override {
    return remainder_.raw_score(X).array().exp();
  }

 private:
  FittedModel remainder_;
};

class DrModel final : public TauModel {
 public:
  DrModel(std::string id, FittedModel final_model, PseudoScale scale)
      : TauModel(std::move(id)), final_(std::move(final_model)), scale_(scale) {}

  Vector score(const Matrix& X, const Vector*) const override {
    const Vector pred = final_.predict(X);
    if (scale_ == PseudoScale::log) return pred.array().exp();
    return pred;
  }

 private:
  FittedModel final_;
  PseudoScale scale_;
};

std::vector<Index> converter_rows(const Dataset& data) {
  std::vector<Index> rows;
  for (Index i = 0; i < data.n_rows(); ++i) {
    if (data.outcome[static_cast<Eigen::Index>(i)] == 1.0) rows.push_back(i);
  }
  return rows;
}

Matrix gather_rows(const Matrix& X, const std::vector<Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = X.row(static_cast<Eigen::Index>(rows[static_cast<Index>(i)]));
  }
  return out;
}

Vector gather_entries(const Vector& v, const std::vector<Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = v[static_cast<Eigen::Index>(rows[static_cast<Index>(i)])];
  }
  return out;
}

void check_final_spec(const LearnerSpec& final_spec, PseudoScale scale) {
  if (scale == PseudoScale::direct) {
    const bool ok = final_spec.kind == LearnerKind::poisson_glm ||
                    (final_spec.kind == LearnerKind::gbt &&
                     final_spec.objective == GbtObjective::poisson);
    if (!ok) {
      throw std::invalid_argument(
          "dr final stage: direct scale needs a Poisson objective (positive scores)");
    }
  } else {
    const bool ok = final_spec.kind == LearnerKind::linear_glm ||
                    (final_spec.kind == LearnerKind::gbt &&
                     final_spec.objective == GbtObjective::squared);
    if (!ok) {
      throw std::invalid_argument("dr final stage: log scale needs a squared objective");
    }
  }
}

}  // namespace

std::unique_ptr<TauModel> fit_s_learner(const Dataset& train, const LearnerSpec& spec,
                                        const ClippingConfig& clip_cfg) {
  train.validate();
  clip_cfg.validate();
  const Matrix design = features_with_treatment(train.features, train.treatment);
  return std::make_unique<SLearnerModel>(fit(spec, design, train.outcome), clip_cfg);
}

std::unique_ptr<TauModel> fit_t_learner(const Dataset& train, const LearnerSpec& spec,
                                        const ClippingConfig& clip_cfg) {
  train.validate();
  clip_cfg.validate();
  std::vector<Index> arm0, arm1;
  for (Index i = 0; i < train.n_rows(); ++i) {
    (train.treatment[static_cast<Eigen::Index>(i)] == 1.0 ? arm1 : arm0).push_back(i);
  }
  if (arm0.empty() || arm1.empty()) {
    throw std::runtime_error("t_learner: training data must contain both arms");
  }
  FittedModel model0 = fit(spec, gather_rows(train.features, arm0),
                           gather_entries(train.outcome, arm0));
  FittedModel model1 = fit(spec, gather_rows(train.features, arm1),
                           gather_entries(train.outcome, arm1));
  return std::make_unique<TLearnerModel>(std::move(model0), std::move(model1), clip_cfg);
}

std::unique_ptr<TauModel> fit_q_learner(const Dataset& train, const LearnerSpec& spec,
                                        const ClippingConfig& clip_cfg, bool simple) {
  train.validate();
  clip_cfg.validate();
  const auto converters = converter_rows(train);
  if (converters.empty()) throw std::runtime_error("q_learner: no converters to fit p on");
  if (simple && !train.known_propensity) {
    throw std::invalid_argument("q_learner: simple variant needs a design propensity");
  }

  FittedModel p_model = fit(spec, gather_rows(train.features, converters),
                            gather_entries(train.treatment, converters));
  std::optional<FittedModel> e_model;
  if (!simple) e_model = fit(spec, train.features, train.treatment);
  return std::make_unique<QLearnerModel>(std::move(p_model), std::move(e_model), clip_cfg);
}

std::unique_ptr<TauModel> fit_q_offset_learner(const Dataset& train, const LearnerSpec& glm_spec,
                                               const ClippingConfig& clip_cfg) {
  train.validate();
  clip_cfg.validate();
  if (glm_spec.kind != LearnerKind::logistic_glm) {
    throw std::invalid_argument("q_offset: the offset fit needs logistic_glm");
  }
  const auto converters = converter_rows(train);
  if (converters.empty()) throw std::runtime_error("q_offset: no converters to fit on");

  const FittedModel e_model = fit(glm_spec, train.features, train.treatment);
  const Matrix conv_X = gather_rows(train.features, converters);
  const Vector conv_w = gather_entries(train.treatment, converters);
  const Vector e_hat = clip_all(e_model.predict(conv_X), clip_cfg.eps_e, 1.0 - clip_cfg.eps_e);
  Vector offset(e_hat.size());
  for (Eigen::Index i = 0; i < offset.size(); ++i) offset[i] = logit(e_hat[i]);

  FittedModel remainder = fit(glm_spec, conv_X, conv_w, nullptr, &offset);
  return std::make_unique<QOffsetModel>(std::move(remainder));
}

std::unique_ptr<TauModel> fit_dr_learner_with_bundle(const Dataset& train,
                                                     const NuisanceBundle& bundle,
                                                     const LearnerSpec& final_spec,
                                                     const ClippingConfig& clip_cfg,
                                                     DrVariant variant, PseudoScale scale) {
  check_final_spec(final_spec, scale);
  const PseudoOutcomes pseudo = compute_pseudo_outcomes(variant, scale, train, bundle, clip_cfg);

  std::vector<Index> rows;
  for (Index i = 0; i < pseudo.mask.size(); ++i) {
    if (pseudo.mask[i]) rows.push_back(i);
  }
  const Matrix X = gather_rows(train.features, rows);
  const Vector gamma = gather_entries(pseudo.values, rows);
  FittedModel final_model = fit(final_spec, X, gamma);
  return std::make_unique<DrModel>(pseudo.learner_id, std::move(final_model), scale);
}

std::unique_ptr<TauModel> fit_dr_learner(const Dataset& train, const FoldPlan& folds,
                                         const LearnerSpec& nuisance_spec,
                                         const LearnerSpec& final_spec,
                                         const ClippingConfig& clip_cfg, DrVariant variant,
                                         PseudoScale scale, bool use_known_e) {
  NuisanceRequest request;
  request.e = true;
  request.use_known_e = use_known_e || variant == DrVariant::dr_q_simple;
  request.mu = variant == DrVariant::dr_t;
  request.p = variant == DrVariant::dr_q || variant == DrVariant::dr_q_simple;
  request.m = variant == DrVariant::dr_q;

  NuisanceBundle bundle = fit_nuisances(train, folds, nuisance_spec, clip_cfg, request);
  if (variant == DrVariant::dr_s) {
    auto [mu0, mu1] = mu_via_s_learner(train, folds, nuisance_spec, clip_cfg);
    bundle.mu0_hat = std::move(mu0);
    bundle.mu1_hat = std::move(mu1);
    bundle.mu_source = NuisanceSource::cross_fitted;
  }
  return fit_dr_learner_with_bundle(train, bundle, final_spec, clip_cfg, variant, scale);
}

}  // namespace rcate
