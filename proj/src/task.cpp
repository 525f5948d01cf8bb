// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/task.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rats/error.hpp"

namespace rats {

void ToyTask::validate() const {
  if (conditions == 0) throw ConfigError("task: conditions must be positive");
  if (dim < 2) throw ConfigError("task: dim must be at least 2");
  if (!(radius > 0.0)) throw ConfigError("task: radius must be positive");
  if (!(preferred_weight >= 0.0 && preferred_weight <= 1.0)) {
    throw ConfigError("task: preferred_weight must lie in [0,1]");
  }
  if (!(component_std >= 0.0)) throw ConfigError("task: component_std must be non-negative");
}

std::vector<double> ToyTask::centers() const {
  std::vector<double> c(conditions * dim, 0.0);
  for (std::size_t k = 0; k < conditions; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(conditions);
    c[k * dim] = radius * std::cos(a);
    c[k * dim + 1] = radius * std::sin(a);
  }
  return c;
}

std::size_t ToyTask::nearest_center(std::span<const double> y) const {
  const auto c = centers();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < conditions; ++k) {
    double d = 0.0;
    for (std::size_t j = 0; j < dim; ++j) d += (y[j] - c[k * dim + j]) * (y[j] - c[k * dim + j]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

std::vector<std::size_t> sample_conditions(const ToyTask& task, std::size_t n, Rng& rng) {
  std::vector<std::size_t> c(n);
  for (auto& v : c) v = static_cast<std::size_t>(rng.below(task.conditions));
  return c;
}

Tensor sample_normal(std::size_t rows, std::size_t cols, Rng& rng) {
  return Tensor::constant({rows, cols}, rng.normals(rows * cols));
}

Batch sample_data(const ToyTask& task, std::size_t n, Rng& rng) {
  const auto centers = task.centers();
  Batch b;
  b.conditions = sample_conditions(task, n, rng);
  std::vector<double> x(n * task.dim);
  for (std::size_t r = 0; r < n; ++r) {
    const double scale = rng.uniform() < task.preferred_weight ? 1.0 : task.muted_scale;
    for (std::size_t j = 0; j < task.dim; ++j) {
      x[r * task.dim + j] = scale * centers[b.conditions[r] * task.dim + j] + task.component_std * rng.normal();
    }
  }
  b.x0 = Tensor::constant({n, task.dim}, std::move(x));
  return b;
}

}  // namespace rats
