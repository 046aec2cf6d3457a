#pragma once

// Synthetic binary-outcome trials with known ground truth. Every generated
// row carries its exact nuisance values (e, mu0, mu1, tau, p, m) so tests can
// enumerate conditional expectations instead of estimating them, and a
// corruption helper perturbs nuisances in controlled ways for robustness
// checks.

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rcate/data.hpp"

namespace rcate {

enum class DgpKind { continuous, discrete8 };

struct PropensityDesign {
  enum class Kind { constant, logit_linear };
  Kind kind = Kind::constant;
  double constant = 0.5;
  Vector coefficients;  // intercept first; used only by logit_linear
};

// Continuous kind: X ~ U(0,1)^d with
//   mu0(x) = base_rate * (1 + mu0_heterogeneity * (x_b - 0.5))
//   tau(x) = tau_center * exp(tau_amplitude * (x_0 - 0.5))
// where x_b is the second feature (the first when d = 1). The discrete8 kind
// ignores these shape fields and draws X uniformly from eight atoms with a
// fixed nuisance table, so conditional expectations are exact four-term sums.
struct DGPSpec {
  DgpKind kind = DgpKind::continuous;
  Index n_features = 3;
  double base_rate = 0.1;
  double mu0_heterogeneity = 1.0;
  double tau_center = 1.0;
  double tau_amplitude = 0.0;
  PropensityDesign propensity;
  std::uint64_t seed = 0;
  std::string name = "synthetic";

  void validate() const;  // throws when the implied mu's leave (0, 1)
};

struct OracleRows {
  Vector e, mu0, mu1, tau, p, m;
};

struct SyntheticData {
  Dataset data;  // known_propensity filled with the design e(x)
  OracleRows oracle;
};

SyntheticData generate(const DGPSpec& spec, Index n);

struct Discrete8Atom {
  double e, mu0, mu1;
};

const std::array<Discrete8Atom, 8>& discrete8_table();

// 3-bit binary encoding of the atom index, one row per atom.
Matrix discrete8_features();

// Exact nuisances for one atom (tau, p, m derived from the table).
OracleRows discrete8_oracle_row(int atom);

struct LogitShift {
  double delta = 0.0;
};
struct Multiplicative {
  double factor = 1.0;
};
using Corruption = std::variant<LogitShift, Multiplicative>;

enum class NuisanceComponent { e, mu, p, m };

// Perturb a nuisance value and re-clip it to its component's legal range.
double corrupt_value(double value, const Corruption& mode, NuisanceComponent component,
                     const ClippingConfig& clip_cfg = {});
Vector corrupt_nuisance(const Vector& values, const Corruption& mode, NuisanceComponent component,
                        const ClippingConfig& clip_cfg = {});

// Named DGP presets usable from the CLI.
DGPSpec dgp_preset(const std::string& name);
std::vector<std::string> dgp_preset_names();

}  // namespace rcate
