#include "rcate/nuisance.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace rcate {

namespace {

void check_probability_spec(const LearnerSpec& spec) {
  const bool ok = spec.kind == LearnerKind::logistic_glm ||
                  (spec.kind == LearnerKind::gbt && spec.objective == GbtObjective::logloss);
  if (!ok) {
    throw std::invalid_argument(
        "nuisance: probability components need logistic_glm or gbt with logloss");
  }
}

Matrix rows_of(const Matrix& X, const std::vector<Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = X.row(static_cast<Eigen::Index>(rows[static_cast<Index>(i)]));
  }
  return out;
}

Vector entries_of(const Vector& v, const std::vector<Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = v[static_cast<Eigen::Index>(rows[static_cast<Index>(i)])];
  }
  return out;
}

void scatter(const Vector& values, const std::vector<Index>& rows, Vector& into) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    into[static_cast<Eigen::Index>(rows[static_cast<Index>(i)])] = values[i];
  }
}

std::vector<Index> filter(const std::vector<Index>& rows, const Vector& flag, double wanted) {
  std::vector<Index> out;
  for (Index r : rows) {
    if (flag[static_cast<Eigen::Index>(r)] == wanted) out.push_back(r);
  }
  return out;
}

}  // namespace

Matrix features_with_treatment(const Matrix& features, const Vector& treatment) {
  Matrix out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) = features;
  out.col(features.cols()) = treatment;
  return out;
}

NuisanceBundle fit_nuisances(const Dataset& data, const FoldPlan& folds, const LearnerSpec& spec,
                             const ClippingConfig& clip_cfg, const NuisanceRequest& request) {
  data.validate();
  clip_cfg.validate();
  const Index n = data.n_rows();
  if (folds.assignment.size() != n) {
    throw std::invalid_argument("nuisance: fold plan does not match dataset");
  }
  if (request.e || request.mu || request.p || request.m) check_probability_spec(spec);

  NuisanceBundle bundle;

  if (request.e) {
    if (request.use_known_e) {
      if (!data.known_propensity) {
        throw std::invalid_argument("nuisance: use_known_e requires a design propensity");
      }
      bundle.e_hat = clip_all(*data.known_propensity, clip_cfg.eps_e, 1.0 - clip_cfg.eps_e);
      bundle.e_source = NuisanceSource::known_design;
    } else {
      bundle.e_hat.resize(static_cast<Eigen::Index>(n));
      for (int f = 0; f < folds.k; ++f) {
        const auto train_rows = folds.complement_rows(f);
        const auto test_rows = folds.fold_rows(f);
        const FittedModel model = fit(spec, rows_of(data.features, train_rows),
                                      entries_of(data.treatment, train_rows));
        Vector pred = model.predict(rows_of(data.features, test_rows));
        pred = clip_all(pred, clip_cfg.eps_e, 1.0 - clip_cfg.eps_e);
        scatter(pred, test_rows, bundle.e_hat);
      }
      bundle.e_source = NuisanceSource::cross_fitted;
    }
  }

  if (request.mu) {
    bundle.mu0_hat.resize(static_cast<Eigen::Index>(n));
    bundle.mu1_hat.resize(static_cast<Eigen::Index>(n));
    for (int f = 0; f < folds.k; ++f) {
      const auto train_rows = folds.complement_rows(f);
      const auto test_rows = folds.fold_rows(f);
      const Matrix test_X = rows_of(data.features, test_rows);
      for (double arm : {0.0, 1.0}) {
        const auto arm_rows = filter(train_rows, data.treatment, arm);
        if (arm_rows.empty()) {
          throw std::runtime_error("nuisance: fold " + std::to_string(f) +
                                   " complement has no rows with treatment " +
                                   std::to_string(static_cast<int>(arm)));
        }
        const FittedModel model =
            fit(spec, rows_of(data.features, arm_rows), entries_of(data.outcome, arm_rows));
        Vector pred = clip_all(model.predict(test_X), clip_cfg.eps_mu, 1.0 - clip_cfg.eps_mu);
        scatter(pred, test_rows, arm > 0.5 ? bundle.mu1_hat : bundle.mu0_hat);
      }
    }
    bundle.mu_source = NuisanceSource::cross_fitted;
  }

  if (request.p) {
    bundle.p_hat.resize(static_cast<Eigen::Index>(n));
    for (int f = 0; f < folds.k; ++f) {
      const auto train_rows = folds.complement_rows(f);
      const auto converters = filter(train_rows, data.outcome, 1.0);
      if (converters.empty()) {
        throw std::runtime_error("nuisance: fold " + std::to_string(f) +
                                 " complement has no converters to fit p on");
      }
      const auto test_rows = folds.fold_rows(f);
      const FittedModel model = fit(spec, rows_of(data.features, converters),
                                    entries_of(data.treatment, converters));
      Vector pred = model.predict(rows_of(data.features, test_rows));
      pred = clip_all(pred, clip_cfg.eps_p, 1.0 - clip_cfg.eps_p);
      scatter(pred, test_rows, bundle.p_hat);
    }
    bundle.p_source = NuisanceSource::cross_fitted;
  }

  if (request.m) {
    bundle.m_hat.resize(static_cast<Eigen::Index>(n));
    for (int f = 0; f < folds.k; ++f) {
      const auto train_rows = folds.complement_rows(f);
      const auto test_rows = folds.fold_rows(f);
      const FittedModel model =
          fit(spec, rows_of(data.features, train_rows), entries_of(data.outcome, train_rows));
      Vector pred = clip_all(model.predict(rows_of(data.features, test_rows)), clip_cfg.eps_m, 1.0);
      scatter(pred, test_rows, bundle.m_hat);
    }
    bundle.m_source = NuisanceSource::cross_fitted;
  }

  return bundle;
}

std::pair<Vector, Vector> mu_via_s_learner(const Dataset& data, const FoldPlan& folds,
                                           const LearnerSpec& spec,
                                           const ClippingConfig& clip_cfg) {
  data.validate();
  clip_cfg.validate();
  check_probability_spec(spec);
  const Index n = data.n_rows();
  if (folds.assignment.size() != n) {
    throw std::invalid_argument("nuisance: fold plan does not match dataset");
  }

  const Matrix design = features_with_treatment(data.features, data.treatment);
  Vector mu0(static_cast<Eigen::Index>(n)), mu1(static_cast<Eigen::Index>(n));
  for (int f = 0; f < folds.k; ++f) {
    const auto train_rows = folds.complement_rows(f);
    const auto test_rows = folds.fold_rows(f);
    const FittedModel model =
        fit(spec, rows_of(design, train_rows), entries_of(data.outcome, train_rows));

    Matrix test_design = rows_of(design, test_rows);
    test_design.col(test_design.cols() - 1).setZero();
    Vector pred0 = clip_all(model.predict(test_design), clip_cfg.eps_mu, 1.0 - clip_cfg.eps_mu);
    test_design.col(test_design.cols() - 1).setOnes();
    Vector pred1 = clip_all(model.predict(test_design), clip_cfg.eps_mu, 1.0 - clip_cfg.eps_mu);
    scatter(pred0, test_rows, mu0);
    scatter(pred1, test_rows, mu1);
  }
  return {std::move(mu0), std::move(mu1)};
}

}  // namespace rcate
