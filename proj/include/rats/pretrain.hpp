// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Flow-matching pretraining of the backbone on the toy task.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rats/params.hpp"
#include "rats/task.hpp"
#include "rats/velocity_field.hpp"

namespace rats {

struct PretrainConfig {
  std::size_t iterations = 3000;
  std::size_t batch = 256;
  double learning_rate = 2e-3;

  void validate() const;
};

struct PretrainResult {
  ParamSet backbone;
  std::vector<double> losses;  // one per iteration
};

/// Initializes the backbone from (seed, "backbone-init") and trains it with
/// Adam (no clipping). Data batches come from (task.data_seed, "data") and
/// the per-sample sigma/noise draws from (seed, "pretrain").
PretrainResult pretrain_backbone(const ModelSpec& spec, const ToyTask& task, const PretrainConfig& cfg,
                                 std::uint64_t seed);

}  // namespace rats
