// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/reward.hpp"

#include <cmath>

#include "rats/error.hpp"

namespace rats {

Decoder Decoder::identity(std::size_t dim) {
  Decoder d;
  d.identity_ = true;
  d.in_dim_ = d.out_dim_ = dim;
  return d;
}

Decoder Decoder::linear(std::size_t out_dim, std::size_t in_dim, std::vector<double> a) {
  if (a.size() != out_dim * in_dim) {
    throw ShapeError("decoder: matrix has " + std::to_string(a.size()) + " entries, expected " +
                     std::to_string(out_dim * in_dim));
  }
  Decoder d;
  d.identity_ = false;
  d.in_dim_ = in_dim;
  d.out_dim_ = out_dim;
  std::vector<double> at(in_dim * out_dim);
  for (std::size_t r = 0; r < out_dim; ++r)
    for (std::size_t c = 0; c < in_dim; ++c) at[c * out_dim + r] = a[r * in_dim + c];
  d.a_transposed_ = Tensor::constant({in_dim, out_dim}, std::move(at));
  return d;
}

Tensor Decoder::decode(const Tensor& x) const {
  if (x.rank() != 2 || x.cols() != in_dim_) {
    throw ShapeError("decode: input " + to_string(x.shape()) + " does not have " +
                     std::to_string(in_dim_) + " columns");
  }
  if (identity_) return x;
  return matmul(x, a_transposed_);
}

std::span<const double> RewardModel::center(std::size_t c) const {
  return std::span<const double>(centers).subspan(c * dim, dim);
}

void RewardModel::validate() const {
  if (dim == 0 || centers.empty() || centers.size() % dim != 0) {
    throw ConfigError("reward: centers must be a non-empty [conditions, dim] array");
  }
  if (!(beta >= 0.0)) throw ConfigError("reward: beta must be non-negative");
  if (kind == RewardKind::Composite && !(bandwidth > 0.0)) {
    throw ConfigError("reward: composite bandwidth must be positive");
  }
}

namespace {

Tensor squared_distance(const RewardModel& rm, const Tensor& y, std::span<const std::size_t> conditions) {
  if (y.rank() != 2 || y.cols() != rm.dim || y.rows() != conditions.size()) {
    throw ShapeError("reward: y has shape " + to_string(y.shape()) + " for " +
                     std::to_string(conditions.size()) + " conditions of dim " + std::to_string(rm.dim));
  }
  std::vector<double> mu(y.numel());
  for (std::size_t r = 0; r < conditions.size(); ++r) {
    if (conditions[r] >= rm.conditions()) {
      throw ShapeError("reward: condition id " + std::to_string(conditions[r]) + " out of range");
    }
    auto c = rm.center(conditions[r]);
    std::copy(c.begin(), c.end(), mu.begin() + static_cast<std::ptrdiff_t>(r * rm.dim));
  }
  return row_sum(square(y - Tensor::constant(y.shape(), std::move(mu))));
}

}  // namespace

Tensor reward_per_sample(const RewardModel& rm, const Tensor& y,
                         std::span<const std::size_t> conditions) {
  const Tensor d2 = squared_distance(rm, y, conditions);
  if (rm.kind == RewardKind::ModeTarget) return -rm.beta * d2;
  Tensor r = rm.kernel_weight * exp(d2 * (-1.0 / (2.0 * rm.bandwidth * rm.bandwidth)));
  if (rm.quadratic_weight != 0.0) r = r - (rm.quadratic_weight * rm.beta) * d2;
  return r;
}

Tensor reward(const RewardModel& rm, const Tensor& y, std::span<const std::size_t> conditions) {
  return mean(reward_per_sample(rm, y, conditions));
}

double reward_value(const RewardModel& rm, std::span<const double> y, std::size_t condition) {
  const auto mu = rm.center(condition);
  double d2 = 0.0;
  for (std::size_t j = 0; j < rm.dim; ++j) d2 += (y[j] - mu[j]) * (y[j] - mu[j]);
  if (rm.kind == RewardKind::ModeTarget) return -rm.beta * d2;
  return rm.kernel_weight * std::exp(-d2 / (2.0 * rm.bandwidth * rm.bandwidth)) -
         rm.quadratic_weight * rm.beta * d2;
}

Tensor reward_loss(const RewardLossSpec& spec, const Tensor& rewards) {
  if (spec.mode == RewardLossMode::Negate) return -mean(rewards);
  return mean(square(spec.target - rewards));
}

std::string to_string(RewardKind kind) {
  return kind == RewardKind::ModeTarget ? "mode-target" : "composite";
}

std::string to_string(RewardLossMode mode) {
  return mode == RewardLossMode::Negate ? "negate" : "target-gap";
}

}  // namespace rats
