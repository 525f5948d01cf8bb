// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/optimizer.hpp"

#include <cmath>

#include "rats/error.hpp"

namespace rats {

void AdamSpec::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("optimizer: learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("optimizer: beta1 must lie in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("optimizer: beta2 must lie in [0,1)");
  if (!(epsilon > 0.0)) throw ConfigError("optimizer: epsilon must be positive");
}

double global_norm(std::span<const double> g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

double clip_by_global_norm(std::span<double> g, double max_norm) {
  const double norm = global_norm(g);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& v : g) v *= scale;
  }
  return norm;
}

double adam_step(std::span<double> params, std::vector<double> grads, AdamState& state,
                 const AdamSpec& spec) {
  if (grads.size() != params.size()) throw ShapeError("adam_step: gradient size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("adam_step: non-finite gradient at coordinate " + std::to_string(i));
    }
  }
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  const double norm = clip_by_global_norm(grads, spec.clip_norm);
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double c1 = 1.0 - std::pow(spec.beta1, t);
  const double c2 = 1.0 - std::pow(spec.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = spec.beta1 * state.m[i] + (1.0 - spec.beta1) * grads[i];
    state.v[i] = spec.beta2 * state.v[i] + (1.0 - spec.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= spec.learning_rate * mhat / (std::sqrt(vhat) + spec.epsilon);
  }
  return norm;
}

}  // namespace rats
