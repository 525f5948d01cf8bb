// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy differentiable rewards, the fixed latent decoder, and the reward loss.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rats/tensor.hpp"

namespace rats {

class Decoder {
 public:
  static Decoder identity(std::size_t dim);
  /// y = A x with A stored row-major as [out_dim, in_dim].
  static Decoder linear(std::size_t out_dim, std::size_t in_dim, std::vector<double> a);

  bool is_identity() const { return identity_; }
  std::size_t in_dim() const { return in_dim_; }
  std::size_t out_dim() const { return out_dim_; }

  Tensor decode(const Tensor& x) const;

 private:
  bool identity_ = true;
  std::size_t in_dim_ = 0;
  std::size_t out_dim_ = 0;
  Tensor a_transposed_;  // [in_dim, out_dim]
};

enum class RewardKind { ModeTarget, Composite };

/// mode-target: -beta * ||y - mu_c||^2.
/// composite:   kernel_weight * exp(-||y - mu_c||^2 / (2 h^2))
///              - quadratic_weight * beta * ||y - mu_c||^2.
struct RewardModel {
  RewardKind kind = RewardKind::Composite;
  std::vector<double> centers;  // [conditions, dim] row-major
  std::size_t dim = 2;
  double beta = 1.0;
  double kernel_weight = 1.0;
  double bandwidth = 0.1;
  double quadratic_weight = 0.0;

  std::size_t conditions() const { return dim == 0 ? 0 : centers.size() / dim; }
  std::span<const double> center(std::size_t c) const;
  void validate() const;
};

/// Per-sample rewards, [batch, 1].
Tensor reward_per_sample(const RewardModel& rm, const Tensor& y,
                         std::span<const std::size_t> conditions);
/// Batch-mean reward (rank 0).
Tensor reward(const RewardModel& rm, const Tensor& y, std::span<const std::size_t> conditions);
/// Plain-number reward of one point.
double reward_value(const RewardModel& rm, std::span<const double> y, std::size_t condition);

enum class RewardLossMode { Negate, TargetGap };

struct RewardLossSpec {
  RewardLossMode mode = RewardLossMode::Negate;
  double target = 0.0;
};

/// Batch mean of l(r_i, r*) over the given rewards (any shape):
/// negate gives -r, target-gap gives (r* - r)^2.
Tensor reward_loss(const RewardLossSpec& spec, const Tensor& rewards);

std::string to_string(RewardKind kind);
std::string to_string(RewardLossMode mode);

}  // namespace rats
