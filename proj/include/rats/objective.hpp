// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shaping divergence, reward gate and the combined training objective.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rats/sampler.hpp"
#include "rats/schedule.hpp"
#include "rats/tensor.hpp"

namespace rats {

struct DivergenceWeights {
  double cosine = 1.0;
  double l2 = 0.05;

  void validate() const;
};

struct DivergenceStats {
  /// Samples whose student or teacher prediction had zero norm; their cosine
  /// term is taken as the full weight.
  std::size_t zero_norm = 0;
};

/// Batch mean over samples of
///   cosine * (1 - <xs, xt> / (|xs| |xt|)) + l2 * |xs - xt|^2.
/// `xt` must not carry history.
Tensor horizon_divergence(const Tensor& xs, const Tensor& xt, const DivergenceWeights& w,
                          DivergenceStats* stats = nullptr);

struct ShapingResult {
  Tensor loss;                      // sum_m w_m L_m
  std::vector<double> per_horizon;  // L_m values
  std::size_t zero_norm = 0;
};

/// Rejects pairs whose student step lies before the student's gradient window.
ShapingResult shaping_loss(const Trajectory& student, const Trajectory& teacher,
                           const std::vector<HorizonPair>& pairs, const HorizonSet& horizons,
                           const DivergenceWeights& w);

struct GateConfig {
  double temperature = 0.02;
  bool enabled = true;
  std::optional<double> override_value;

  void validate() const;
};

/// sigmoid((r_teacher - r_student) / temperature), or the override. A
/// disabled gate without override is fixed at 1.
double reward_gate(double r_teacher, double r_student, const GateConfig& cfg);

struct LossBreakdown {
  double reward_loss = 0.0;
  std::vector<double> per_horizon;
  double shape_loss = 0.0;
  double gate = 0.0;
  double alpha = 0.0;
  double reward_weight = 1.0;
  double total = 0.0;
  double r_teacher = 0.0;
  double r_student = 0.0;
  std::size_t zero_norm = 0;
};

struct TotalLoss {
  Tensor total;
  LossBreakdown breakdown;
};

/// reward_weight * reward + alpha * gate * shape, with the gate a constant.
TotalLoss total_loss(const Tensor& reward_loss, const Tensor& shape_loss, double gate, double alpha,
                     double reward_weight = 1.0);

}  // namespace rats
