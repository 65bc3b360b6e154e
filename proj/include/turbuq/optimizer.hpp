#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "turbuq/errors.hpp"

namespace turbuq::ml {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Bias-corrected Adam update in place; increments state.t.
inline void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
                      const AdamConfig& cfg = {}) {
  if (params.size() != grad.size() || params.size() != state.m.size() ||
      params.size() != state.v.size())
    throw ShapeMismatch("adam_step: parameter, gradient, and state sizes differ");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

}  // namespace turbuq::ml
