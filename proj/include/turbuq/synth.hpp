#pragma once

// Synthetic paired-profile generator: boundary-layer-like k profiles with a
// smooth, monotone low-to-high-fidelity discrepancy law plus optional noise.

#include <cstdint>

#include "turbuq/dataset.hpp"

namespace turbuq::data {

enum class DiscrepancyLaw { PowerLaw, Identity };

// PowerLaw: 1.8 * k^0.9; Identity: k.
double apply_law(DiscrepancyLaw law, double k);

struct SynthConfig {
  int profiles = 12;
  int points = 64;
  DiscrepancyLaw law = DiscrepancyLaw::PowerLaw;
  double noise_sigma = 0.0;  // absolute, in k units
  std::uint64_t seed = 0;

  // InvalidConfig unless profiles >= 3, points >= 9, noise_sigma >= 0.
  void validate() const;
};

// Profiles k_rans(y) = A * (y/delta) * exp(1 - y/delta) on y in (0, 3],
// A in [0.5, 1.5] and delta in [0.5, 1.2] per profile; k_dns = law(k_rans)
// plus Gaussian noise, clamped at 0. Four stations per case, U_inf = 1.
ProfileSet synthesize(const SynthConfig& config);

}  // namespace turbuq::data
