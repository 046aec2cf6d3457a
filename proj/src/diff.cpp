#include "rcate/diff.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rcate/nuisance.hpp"

namespace rcate {

namespace {

void check_binary(double v, const char* what) {
  if (v != 0.0 && v != 1.0) {
    throw std::invalid_argument(std::string(what) + " must be 0 or 1");
  }
}

void check_probability_spec(const LearnerSpec& spec, const char* what) {
  spec.validate();
  const bool ok = spec.kind == LearnerKind::logistic_glm ||
                  (spec.kind == LearnerKind::gbt && spec.objective == GbtObjective::logloss);
  if (!ok) {
    throw std::invalid_argument(std::string(what) + " requires a logistic GLM or log-loss GBT spec");
  }
}

// Squared-loss counterpart of a base spec for the effect-regression stage.
LearnerSpec squared_stage(const LearnerSpec& spec) {
  LearnerSpec out = spec;
  if (spec.kind == LearnerKind::gbt) {
    out.objective = GbtObjective::squared;
  } else {
    out.kind = LearnerKind::linear_glm;
  }
  return out;
}

std::vector<Index> arm_rows(const Dataset& data, double arm) {
  std::vector<Index> rows;
  for (Index i = 0; i < data.n_rows(); ++i) {
    if (data.treatment[static_cast<Eigen::Index>(i)] == arm) rows.push_back(i);
  }
  return rows;
}

FittedModel fit_control_outcome(const Dataset& train, const LearnerSpec& spec) {
  const std::vector<Index> rows = arm_rows(train, 0.0);
  if (rows.empty()) throw std::runtime_error("training data has no control rows");
  const Dataset sub = subset(train, rows);
  return fit(spec, sub.features, sub.outcome);
}

class XLearnerModel final : public DiffTauModel {
 public:
  XLearnerModel(FittedModel mu0, FittedModel tau0, FittedModel tau1, FittedModel e_model,
                const ClippingConfig& clip_cfg)
      : DiffTauModel("x", std::move(mu0), clip_cfg),
        tau0_(std::move(tau0)),
        tau1_(std::move(tau1)),
        e_model_(std::move(e_model)) {}

  Vector score_diff(const Matrix& X, const Vector* known_e) const override {
    Vector g;
    if (known_e != nullptr) {
      if (known_e->size() != X.rows()) {
        throw std::invalid_argument("known propensity length does not match feature rows");
      }
      g = *known_e;
    } else {
      g = e_model_.predict(X);
    }
    const ClippingConfig& cfg = clip_config();
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = cfg.clip_e(g[i]);
    const Vector t0 = tau0_.predict(X);
    const Vector t1 = tau1_.predict(X);
    return g.cwiseProduct(t0) + (Vector::Ones(g.size()) - g).cwiseProduct(t1);
  }

 private:
  FittedModel tau0_;
  FittedModel tau1_;
  FittedModel e_model_;
};

// R-Learner and AIPW share this shape: one regression model scored as-is.
class RegressionDiffModel final : public DiffTauModel {
 public:
  RegressionDiffModel(std::string id, FittedModel effect, FittedModel baseline,
                      const ClippingConfig& clip_cfg)
      : DiffTauModel(std::move(id), std::move(baseline), clip_cfg), effect_(std::move(effect)) {}

  Vector score_diff(const Matrix& X, const Vector* /*known_e*/) const override {
    return effect_.predict(X);
  }

 private:
  FittedModel effect_;
};

class RatioAdapterModel final : public TauModel {
 public:
  explicit RatioAdapterModel(std::unique_ptr<DiffTauModel> inner)
      : TauModel(inner->id()), inner_(std::move(inner)) {}

  Vector score(const Matrix& X, const Vector* known_e) const override {
    return inner_->score_ratio(X, known_e);
  }

 private:
  std::unique_ptr<DiffTauModel> inner_;
};

}  // namespace

double aipw_gamma(double w, double y, double e, double mu0, double mu1) {
  check_binary(w, "treatment");
  check_binary(y, "outcome");
  if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("propensity must lie strictly in (0, 1)");
  return mu1 - mu0 + w * (y - mu1) / e - (1.0 - w) * (y - mu0) / (1.0 - e);
}

double to_ratio(double tau_diff, double mu0_hat, const ClippingConfig& clip_cfg) {
  if (!(mu0_hat > 0.0)) throw std::invalid_argument("baseline rate must be positive");
  return clip_cfg.clip_tau(1.0 + tau_diff / mu0_hat);
}

Vector DiffTauModel::score_ratio(const Matrix& X, const Vector* known_e) const {
  const Vector diff = score_diff(X, known_e);
  const Vector mu0 = baseline_.predict(X);
  Vector out(diff.size());
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    out[i] = to_ratio(diff[i], clip_.clip_mu(mu0[i]), clip_);
  }
  return out;
}

std::unique_ptr<DiffTauModel> fit_x_learner(const Dataset& train, const LearnerSpec& spec,
                                            const ClippingConfig& clip_cfg) {
  train.validate();
  check_probability_spec(spec, "x-learner outcome stage");
  clip_cfg.validate();

  const std::vector<Index> control = arm_rows(train, 0.0);
  const std::vector<Index> treated = arm_rows(train, 1.0);
  if (control.empty() || treated.empty()) {
    throw std::runtime_error("x-learner needs rows in both arms");
  }
  const Dataset data0 = subset(train, control);
  const Dataset data1 = subset(train, treated);

  FittedModel mu0_model = fit(spec, data0.features, data0.outcome);
  FittedModel mu1_model = fit(spec, data1.features, data1.outcome);

  // Imputed individual effects, one per arm, regressed back on features.
  Vector d1 = data1.outcome - mu0_model.predict(data1.features).unaryExpr([&](double v) {
                return clip_cfg.clip_mu(v);
              });
  Vector d0 = mu1_model.predict(data0.features).unaryExpr([&](double v) {
                return clip_cfg.clip_mu(v);
              }) -
              data0.outcome;

  const LearnerSpec stage2 = squared_stage(spec);
  FittedModel tau1_model = fit(stage2, data1.features, d1);
  FittedModel tau0_model = fit(stage2, data0.features, d0);

  FittedModel e_model = fit(spec, train.features, train.treatment);

  return std::make_unique<XLearnerModel>(std::move(mu0_model), std::move(tau0_model),
                                         std::move(tau1_model), std::move(e_model), clip_cfg);
}

std::unique_ptr<DiffTauModel> fit_r_learner(const Dataset& train, const FoldPlan& folds,
                                            const LearnerSpec& spec,
                                            const ClippingConfig& clip_cfg) {
  NuisanceRequest request;
  request.e = true;
  request.m = true;
  const NuisanceBundle bundle = fit_nuisances(train, folds, spec, clip_cfg, request);
  return fit_r_learner(train, bundle, spec, clip_cfg);
}

std::unique_ptr<DiffTauModel> fit_r_learner(const Dataset& train, const NuisanceBundle& bundle,
                                            const LearnerSpec& spec,
                                            const ClippingConfig& clip_cfg) {
  train.validate();
  check_probability_spec(spec, "r-learner nuisance stage");
  clip_cfg.validate();
  if (bundle.e_source == NuisanceSource::unused || bundle.m_source == NuisanceSource::unused) {
    throw std::invalid_argument("r-learner needs propensity and marginal outcome nuisances");
  }
  if (bundle.e_hat.size() != static_cast<Eigen::Index>(train.n_rows()) ||
      bundle.m_hat.size() != static_cast<Eigen::Index>(train.n_rows())) {
    throw std::invalid_argument("nuisance bundle does not match the training rows");
  }

  std::vector<double> target;
  std::vector<double> weight;
  std::vector<Index> rows;
  for (Index i = 0; i < train.n_rows(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    const double rw = train.treatment[ei] - bundle.e_hat[ei];
    if (std::abs(rw) < clip_cfg.eps_e) continue;
    rows.push_back(i);
    target.push_back((train.outcome[ei] - bundle.m_hat[ei]) / rw);
    weight.push_back(rw * rw);
  }
  if (rows.empty()) {
    throw std::runtime_error("r-learner has no usable rows after residual filtering");
  }

  Matrix X(rows.size(), train.n_features());
  Vector t(rows.size());
  Vector w(rows.size());
  for (Index r = 0; r < rows.size(); ++r) {
    X.row(static_cast<Eigen::Index>(r)) = train.features.row(static_cast<Eigen::Index>(rows[r]));
    t[static_cast<Eigen::Index>(r)] = target[r];
    w[static_cast<Eigen::Index>(r)] = weight[r];
  }
  FittedModel effect = fit(squared_stage(spec), X, t, &w);
  FittedModel baseline = fit_control_outcome(train, spec);
  return std::make_unique<RegressionDiffModel>("r", std::move(effect), std::move(baseline),
                                               clip_cfg);
}

std::unique_ptr<DiffTauModel> fit_aipw_learner(const Dataset& train, const FoldPlan& folds,
                                               const LearnerSpec& spec,
                                               const ClippingConfig& clip_cfg) {
  NuisanceRequest request;
  request.e = true;
  request.mu = true;
  const NuisanceBundle bundle = fit_nuisances(train, folds, spec, clip_cfg, request);
  return fit_aipw_learner(train, bundle, spec, clip_cfg);
}

std::unique_ptr<DiffTauModel> fit_aipw_learner(const Dataset& train, const NuisanceBundle& bundle,
                                               const LearnerSpec& spec,
                                               const ClippingConfig& clip_cfg) {
  train.validate();
  check_probability_spec(spec, "aipw nuisance stage");
  clip_cfg.validate();
  if (bundle.e_source == NuisanceSource::unused || bundle.mu_source == NuisanceSource::unused) {
    throw std::invalid_argument("aipw needs propensity and per-arm outcome nuisances");
  }
  if (bundle.e_hat.size() != static_cast<Eigen::Index>(train.n_rows()) ||
      bundle.mu0_hat.size() != static_cast<Eigen::Index>(train.n_rows())) {
    throw std::invalid_argument("nuisance bundle does not match the training rows");
  }

  Vector phi(train.n_rows());
  for (Index i = 0; i < train.n_rows(); ++i) {
    const auto ei = static_cast<Eigen::Index>(i);
    phi[ei] = aipw_gamma(train.treatment[ei], train.outcome[ei], bundle.e_hat[ei],
                         bundle.mu0_hat[ei], bundle.mu1_hat[ei]);
  }
  FittedModel effect = fit(squared_stage(spec), train.features, phi);
  FittedModel baseline = fit_control_outcome(train, spec);
  return std::make_unique<RegressionDiffModel>("aipw", std::move(effect), std::move(baseline),
                                               clip_cfg);
}

std::unique_ptr<TauModel> as_ratio_model(std::unique_ptr<DiffTauModel> model) {
  if (!model) throw std::invalid_argument("null difference model");
  return std::make_unique<RatioAdapterModel>(std::move(model));
}

}  // namespace rcate
