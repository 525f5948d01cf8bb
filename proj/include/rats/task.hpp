// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic conditional mixture used for pretraining and evaluation.
//
// Condition c has a mode center mu_c placed uniformly on a circle of radius
// `radius` in the first two coordinates. Its data is a two-component mixture:
// with probability `preferred_weight` a tight Gaussian at mu_c, otherwise a
// tight Gaussian at `muted_scale * mu_c`. The reward peaks at mu_c, so the
// preferred component is the minority the reward asks for.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rats/reward.hpp"
#include "rats/rng.hpp"
#include "rats/tensor.hpp"

namespace rats {

struct ToyTask {
  std::size_t conditions = 4;
  std::size_t dim = 2;
  double radius = 1.0;
  double preferred_weight = 0.4;
  double muted_scale = 0.35;
  double component_std = 0.04;
  std::uint64_t data_seed = 0;

  void validate() const;
  /// [conditions, dim] row-major.
  std::vector<double> centers() const;
  std::size_t nearest_center(std::span<const double> y) const;
};

struct Batch {
  Tensor x0;  // [n, dim]
  std::vector<std::size_t> conditions;
};

Batch sample_data(const ToyTask& task, std::size_t n, Rng& rng);
std::vector<std::size_t> sample_conditions(const ToyTask& task, std::size_t n, Rng& rng);
Tensor sample_normal(std::size_t rows, std::size_t cols, Rng& rng);

}  // namespace rats
