// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Conditional velocity MLP v(x, sigma, c) split into a frozen backbone and a
// trainable adapter.
//
// Input features are [x, sigma, sin(k*pi*sigma), cos(k*pi*sigma) for
// k = 1..F, one-hot(c)]. Each hidden layer computes
//   h' = tanh([h, 1] W + (h A) B)
// where the adapter pair (A, B) starts with B = 0, so an untrained adapter
// leaves the backbone output untouched. The output layer is linear.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rats/params.hpp"
#include "rats/rng.hpp"
#include "rats/tensor.hpp"

namespace rats {

struct ModelSpec {
  std::size_t dim = 2;
  std::size_t conditions = 4;
  std::vector<std::size_t> hidden = {64, 64};
  /// 0 selects the width of each layer (no low-rank constraint).
  std::size_t adapter_rank = 0;
  std::size_t sigma_frequencies = 3;

  std::size_t input_features() const { return dim + 1 + 2 * sigma_frequencies + conditions; }
  std::size_t rank_for(std::size_t layer) const;
  void validate() const;
};

ParamLayout backbone_layout(const ModelSpec& spec);
ParamLayout adapter_layout(const ModelSpec& spec);

ParamSet init_backbone(const ModelSpec& spec, Rng& rng);
ParamSet init_adapter(const ModelSpec& spec, Rng& rng);

using AdapterState = ParamSet;

/// Parameters bound as tensors for one forward evaluation. An empty adapter
/// list evaluates the backbone alone.
struct BoundModel {
  const ModelSpec* spec = nullptr;
  std::vector<Tensor> backbone;
  std::vector<Tensor> adapter;
};

/// Backbone-only model with each adapter product merged into its layer
/// weights, W + [A B; 0]. Same function, fewer multiplies; for untracked
/// evaluation only (the result carries no history).
BoundModel fold_adapter(const BoundModel& model);

/// Feature block without x: [batch, 1 + 2F + K].
Tensor sigma_condition_features(const ModelSpec& spec, std::span<const double> sigmas,
                                std::span<const std::size_t> conditions);

/// Velocity at a shared sigma for the whole batch.
Tensor eval_velocity(const BoundModel& model, const Tensor& x, double sigma,
                     std::span<const std::size_t> conditions);
/// Velocity with one sigma per row.
Tensor eval_velocity(const BoundModel& model, const Tensor& x, std::span<const double> sigmas,
                     std::span<const std::size_t> conditions);

/// x0 = x - sigma * v.
Tensor x0_predict(const Tensor& x, double sigma, const Tensor& v);

/// Flow-matching regression loss on a batch of clean samples: draws
/// sigma ~ U(0,1) and eps ~ N(0, I) per row from `rng` and returns
/// mean((v(x_sigma) - (eps - x0))^2) with x_sigma = (1-sigma) x0 + sigma eps.
Tensor pretrain_loss(const BoundModel& model, const Tensor& x0,
                     std::span<const std::size_t> conditions, Rng& rng);

/// theta_T <- gamma * theta_T + (1 - gamma) * theta_S.
void ema_update(AdapterState& teacher, const AdapterState& student, double gamma);

AdapterState clone_as_teacher(const AdapterState& student);

}  // namespace rats
