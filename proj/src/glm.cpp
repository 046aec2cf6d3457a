// Ridge-penalized GLMs fitted by IRLS (Newton with step halving). When the
// normal system comes back unusable the iteration falls back to a safeguarded
// gradient step, so the objective never increases beyond line-search slack.

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "learner_detail.hpp"

namespace rcate::detail {

double sigmoid(double x) {
  if (x >= 0.0) {
    const double z = std::exp(-x);
    return 1.0 / (1.0 + z);
  }
  const double z = std::exp(x);
  return z / (1.0 + z);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

namespace {

// Per-observation negative log likelihood as a function of the linear
// predictor; constants in the targets are dropped.
double unit_nll(LearnerKind kind, double eta, double t) {
  switch (kind) {
    case LearnerKind::logistic_glm:
      return softplus(eta) - t * eta;
    case LearnerKind::poisson_glm:
      return std::exp(eta) - t * eta;
    case LearnerKind::linear_glm: {
      const double r = t - eta;
      return 0.5 * r * r;
    }
    default:
      throw std::invalid_argument("glm: not a GLM kind");
  }
}

double unit_mean(LearnerKind kind, double eta) {
  switch (kind) {
    case LearnerKind::logistic_glm:
      return sigmoid(eta);
    case LearnerKind::poisson_glm:
      return std::exp(eta);
    default:
      return eta;
  }
}

double unit_curvature(LearnerKind kind, double mean) {
  switch (kind) {
    case LearnerKind::logistic_glm:
      return std::max(mean * (1.0 - mean), 1e-16);
    case LearnerKind::poisson_glm:
      return std::max(mean, 1e-16);
    default:
      return 1.0;
  }
}

struct Problem {
  LearnerKind kind;
  double l2;
  const Matrix& X;
  const Vector& t;
  const Vector* w;
  const Vector* o;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols() + 1; }  // intercept first

  double weight(Eigen::Index i) const { return w ? (*w)[i] : 1.0; }
  double offset(Eigen::Index i) const { return o ? (*o)[i] : 0.0; }

  Vector eta(const Vector& beta) const {
    Vector out = Vector::Constant(n(), beta[0]);
    out.noalias() += X * beta.tail(X.cols());
    if (o) out += *o;
    return out;
  }

  double objective(const Vector& beta) const {
    const Vector e = eta(beta);
    double nll = 0.0;
    for (Eigen::Index i = 0; i < n(); ++i) nll += weight(i) * unit_nll(kind, e[i], t[i]);
    // Intercept stays unpenalized so location shifts cost nothing.
    return nll + 0.5 * l2 * beta.tail(X.cols()).squaredNorm();
  }

  Vector gradient(const Vector& beta) const {
    const Vector e = eta(beta);
    Vector r(n());
    for (Eigen::Index i = 0; i < n(); ++i) {
      r[i] = weight(i) * (unit_mean(kind, e[i]) - t[i]);
    }
    Vector g(dim());
    g[0] = r.sum();
    g.tail(X.cols()).noalias() = X.transpose() * r;
    g.tail(X.cols()) += l2 * beta.tail(X.cols());
    return g;
  }

  Matrix hessian(const Vector& beta) const {
    const Vector e = eta(beta);
    Vector s(n());
    for (Eigen::Index i = 0; i < n(); ++i) {
      s[i] = weight(i) * unit_curvature(kind, unit_mean(kind, e[i]));
    }
    Matrix H(dim(), dim());
    H(0, 0) = s.sum();
    const Vector xs = X.transpose() * s;
    H.block(0, 1, 1, X.cols()) = xs.transpose();
    H.block(1, 0, X.cols(), 1) = xs;
    H.block(1, 1, X.cols(), X.cols()).noalias() = X.transpose() * s.asDiagonal() * X;
    for (Eigen::Index j = 1; j < dim(); ++j) H(j, j) += l2;
    return H;
  }
};

}  // namespace

GlmFitResult fit_glm(const LearnerSpec& spec, const Matrix& X, const Vector& targets,
                     const Vector* weights, const Vector* offset) {
  Problem prob{spec.kind, spec.l2_penalty, X, targets, weights, offset};

  Vector beta = Vector::Zero(prob.dim());
  double obj = prob.objective(beta);
  std::vector<double> loss{obj};

  for (int iter = 0; iter < spec.max_iterations; ++iter) {
    const Vector grad = prob.gradient(beta);
    Vector direction;

    const Matrix H = prob.hessian(beta);
    Eigen::LDLT<Matrix> solver(H);
    if (solver.info() == Eigen::Success) direction = solver.solve(grad);
    const bool newton_ok = direction.size() == prob.dim() && direction.allFinite() &&
                           grad.dot(direction) > 0.0;
    if (!newton_ok) {
      // Ill-conditioned normal system: take a plain gradient step instead.
      const double scale = std::max(1.0, grad.norm());
      direction = grad / scale;
    }

    double step = 1.0;
    Vector candidate;
    double cand_obj = obj;
    bool moved = false;
    while (step > 1e-10) {
      candidate = beta - step * direction;
      cand_obj = prob.objective(candidate);
      if (std::isfinite(cand_obj) && cand_obj <= obj + 1e-12 * (1.0 + std::abs(obj))) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;

    const double shift = (step * direction).cwiseAbs().maxCoeff();
    const double drop = obj - cand_obj;
    beta = candidate;
    obj = cand_obj;
    loss.push_back(obj);
    if (shift < spec.tolerance * (1.0 + beta.cwiseAbs().maxCoeff())) break;
    if (drop < spec.tolerance * (1.0 + std::abs(obj))) break;
  }

  GlmFitResult out;
  out.model.kind = spec.kind;
  out.model.beta = std::move(beta);
  out.loss = std::move(loss);
  return out;
}

Vector glm_eta(const GlmModel& model, const Matrix& X, const Vector* offset) {
  if (X.cols() + 1 != model.beta.size()) {
    throw std::invalid_argument("glm: feature count does not match fitted model");
  }
  Vector eta = Vector::Constant(X.rows(), model.beta[0]);
  eta.noalias() += X * model.beta.tail(X.cols());
  if (offset) {
    if (offset->size() != X.rows()) throw std::invalid_argument("glm: offset length mismatch");
    eta += *offset;
  }
  return eta;
}

Vector glm_mean_from_eta(LearnerKind kind, const Vector& eta) {
  Vector out(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) out[i] = unit_mean(kind, eta[i]);
  return out;
}

}  // namespace rcate::detail

namespace rcate {

double glm_objective(const LearnerSpec& spec, const Vector& params, const Matrix& X,
                     const Vector& targets, const Vector* weights, const Vector* offset) {
  if (spec.kind == LearnerKind::gbt) throw std::invalid_argument("glm_objective: GLM kinds only");
  if (params.size() != X.cols() + 1) {
    throw std::invalid_argument("glm_objective: parameter length must be feature count + 1");
  }
  detail::Problem prob{spec.kind, spec.l2_penalty, X, targets, weights, offset};
  return prob.objective(params);
}

Vector glm_gradient(const LearnerSpec& spec, const Vector& params, const Matrix& X,
                    const Vector& targets, const Vector* weights, const Vector* offset) {
  if (spec.kind == LearnerKind::gbt) throw std::invalid_argument("glm_gradient: GLM kinds only");
  if (params.size() != X.cols() + 1) {
    throw std::invalid_argument("glm_gradient: parameter length must be feature count + 1");
  }
  if (X.rows() != targets.size()) throw std::invalid_argument("glm_gradient: row count mismatch");
  detail::Problem prob{spec.kind, spec.l2_penalty, X, targets, weights, offset};
  return prob.gradient(params);
}

}  // namespace rcate
