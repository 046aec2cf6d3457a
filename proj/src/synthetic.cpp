#include "rcate/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "rcate/rng.hpp"

namespace rcate {

namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

double propensity_at(const PropensityDesign& design, const Eigen::RowVectorXd& x) {
  if (design.kind == PropensityDesign::Kind::constant) return design.constant;
  double eta = design.coefficients[0];
  for (Eigen::Index j = 0; j < x.size(); ++j) eta += design.coefficients[j + 1] * x[j];
  return sigmoid(eta);
}

}  // namespace

void DGPSpec::validate() const {
  if (n_features < 1) throw std::invalid_argument("dgp: needs at least one feature");
  if (kind == DgpKind::discrete8) {
    if (n_features != 3) throw std::invalid_argument("dgp: discrete8 uses exactly 3 features");
    return;
  }
  if (!(base_rate > 0.0 && base_rate < 1.0)) {
    throw std::invalid_argument("dgp: base_rate must lie in (0, 1)");
  }
  if (!(mu0_heterogeneity >= 0.0 && mu0_heterogeneity < 2.0)) {
    throw std::invalid_argument("dgp: mu0_heterogeneity must lie in [0, 2)");
  }
  if (!(tau_center > 0.0)) throw std::invalid_argument("dgp: tau_center must be positive");
  const double mu0_sup = base_rate * (1.0 + 0.5 * mu0_heterogeneity);
  const double tau_sup = tau_center * std::exp(0.5 * std::abs(tau_amplitude));
  if (mu0_sup >= 1.0 || mu0_sup * tau_sup >= 1.0) {
    throw std::invalid_argument("dgp: implied outcome probabilities leave (0, 1)");
  }
  if (propensity.kind == PropensityDesign::Kind::constant) {
    if (!(propensity.constant > 0.0 && propensity.constant < 1.0)) {
      throw std::invalid_argument("dgp: constant propensity must lie in (0, 1)");
    }
  } else {
    if (propensity.coefficients.size() != static_cast<Eigen::Index>(n_features) + 1) {
      throw std::invalid_argument("dgp: propensity coefficients must be intercept + one per feature");
    }
    if (!propensity.coefficients.allFinite()) {
      throw std::invalid_argument("dgp: non-finite propensity coefficient");
    }
  }
}

const std::array<Discrete8Atom, 8>& discrete8_table() {
  // Varied assignment rates, baselines, and effects on both sides of 1, with
  // every implied probability comfortably interior.
  static const std::array<Discrete8Atom, 8> table = {{
      {0.30, 0.05, 0.025},   // tau 0.5
      {0.40, 0.10, 0.080},   // tau 0.8
      {0.50, 0.08, 0.080},   // tau 1.0
      {0.60, 0.12, 0.150},   // tau 1.25
      {0.45, 0.20, 0.300},   // tau 1.5
      {0.55, 0.15, 0.300},   // tau 2.0
      {0.35, 0.25, 0.625},   // tau 2.5
      {0.65, 0.30, 0.900},   // tau 3.0
  }};
  return table;
}

Matrix discrete8_features() {
  Matrix X(8, 3);
  for (int atom = 0; atom < 8; ++atom) {
    X(atom, 0) = static_cast<double>(atom & 1);
    X(atom, 1) = static_cast<double>((atom >> 1) & 1);
    X(atom, 2) = static_cast<double>((atom >> 2) & 1);
  }
  return X;
}

OracleRows discrete8_oracle_row(int atom) {
  if (atom < 0 || atom > 7) throw std::invalid_argument("discrete8: atom out of range");
  const auto& a = discrete8_table()[static_cast<std::size_t>(atom)];
  OracleRows row;
  row.e = Vector::Constant(1, a.e);
  row.mu0 = Vector::Constant(1, a.mu0);
  row.mu1 = Vector::Constant(1, a.mu1);
  row.tau = Vector::Constant(1, a.mu1 / a.mu0);
  const double m = a.e * a.mu1 + (1.0 - a.e) * a.mu0;
  row.m = Vector::Constant(1, m);
  row.p = Vector::Constant(1, a.e * a.mu1 / m);
  return row;
}

SyntheticData generate(const DGPSpec& spec, Index n) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("generate: n must be positive");

  SyntheticData out;
  const auto rows = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(spec.n_features);
  out.data.name = spec.name;
  out.data.features.resize(rows, d);
  out.data.treatment.resize(rows);
  out.data.outcome.resize(rows);
  out.data.known_propensity.emplace(rows);
  out.oracle.e.resize(rows);
  out.oracle.mu0.resize(rows);
  out.oracle.mu1.resize(rows);
  out.oracle.tau.resize(rows);
  out.oracle.p.resize(rows);
  out.oracle.m.resize(rows);

  SeededRng rng(spec.seed);
  const Eigen::Index mu0_feature = d > 1 ? 1 : 0;

  for (Eigen::Index i = 0; i < rows; ++i) {
    double e, mu0, mu1;
    if (spec.kind == DgpKind::discrete8) {
      const int atom = static_cast<int>(rng.below(8));
      out.data.features(i, 0) = static_cast<double>(atom & 1);
      out.data.features(i, 1) = static_cast<double>((atom >> 1) & 1);
      out.data.features(i, 2) = static_cast<double>((atom >> 2) & 1);
      const auto& a = discrete8_table()[static_cast<std::size_t>(atom)];
      e = a.e;
      mu0 = a.mu0;
      mu1 = a.mu1;
    } else {
      for (Eigen::Index j = 0; j < d; ++j) out.data.features(i, j) = rng.uniform01();
      const double tau = spec.tau_center *
                         std::exp(spec.tau_amplitude * (out.data.features(i, 0) - 0.5));
      mu0 = spec.base_rate *
            (1.0 + spec.mu0_heterogeneity * (out.data.features(i, mu0_feature) - 0.5));
      mu1 = tau * mu0;
      e = propensity_at(spec.propensity, out.data.features.row(i));
    }
    const double m = e * mu1 + (1.0 - e) * mu0;
    out.oracle.e[i] = e;
    out.oracle.mu0[i] = mu0;
    out.oracle.mu1[i] = mu1;
    out.oracle.tau[i] = mu1 / mu0;
    out.oracle.m[i] = m;
    out.oracle.p[i] = e * mu1 / m;
    (*out.data.known_propensity)[i] = e;

    const double w = rng.bernoulli(e) ? 1.0 : 0.0;
    const double mu = w > 0.5 ? mu1 : mu0;
    out.data.treatment[i] = w;
    out.data.outcome[i] = rng.bernoulli(mu) ? 1.0 : 0.0;
  }
  return out;
}

double corrupt_value(double value, const Corruption& mode, NuisanceComponent component,
                     const ClippingConfig& clip_cfg) {
  clip_cfg.validate();
  double corrupted;
  if (const auto* shift = std::get_if<LogitShift>(&mode)) {
    const double safe = clip(value, 1e-12, 1.0 - 1e-12);
    corrupted = sigmoid(logit(safe) + shift->delta);
  } else {
    corrupted = value * std::get<Multiplicative>(mode).factor;
  }
  switch (component) {
    case NuisanceComponent::e:
      return clip_cfg.clip_e(corrupted);
    case NuisanceComponent::mu:
      return clip_cfg.clip_mu(corrupted);
    case NuisanceComponent::p:
      return clip_cfg.clip_p(corrupted);
    case NuisanceComponent::m:
      return clip_cfg.clip_m(corrupted);
  }
  throw std::invalid_argument("corrupt_value: unknown component");
}

Vector corrupt_nuisance(const Vector& values, const Corruption& mode, NuisanceComponent component,
                        const ClippingConfig& clip_cfg) {
  Vector out(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out[i] = corrupt_value(values[i], mode, component, clip_cfg);
  }
  return out;
}

DGPSpec dgp_preset(const std::string& name) {
  DGPSpec spec;
  spec.name = name;
  if (name == "low_conversion") {
    // Roughly 1% overall conversion under a balanced assignment, with strong
    // multiplicative effect heterogeneity and two noise features.
    spec.n_features = 5;
    spec.base_rate = 0.0092;
    spec.mu0_heterogeneity = 1.0;
    spec.tau_center = 1.0;
    spec.tau_amplitude = 2.0;
    spec.propensity.constant = 0.5;
    spec.seed = 7;
    return spec;
  }
  if (name == "constant_tau2") {
    spec.n_features = 3;
    spec.base_rate = 0.15;
    spec.mu0_heterogeneity = 1.0;
    spec.tau_center = 2.0;
    spec.tau_amplitude = 0.0;
    spec.propensity.constant = 0.5;
    spec.seed = 11;
    return spec;
  }
  if (name == "null_effect") {
    spec.n_features = 3;
    spec.base_rate = 0.2;
    spec.mu0_heterogeneity = 1.0;
    spec.tau_center = 1.0;
    spec.tau_amplitude = 0.0;
    spec.propensity.constant = 0.5;
    spec.seed = 13;
    return spec;
  }
  if (name == "discrete8") {
    spec.kind = DgpKind::discrete8;
    spec.n_features = 3;
    spec.seed = 17;
    return spec;
  }
  throw std::invalid_argument("unknown DGP preset: " + name);
}

std::vector<std::string> dgp_preset_names() {
  return {"low_conversion", "constant_tau2", "null_effect", "discrete8"};
}

}  // namespace rcate
