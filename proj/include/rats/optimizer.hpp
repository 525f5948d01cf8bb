// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rats {

struct AdamSpec {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Global-norm clip applied before the moment update; <= 0 disables it.
  double clip_norm = 1.0;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t t = 0;

  bool operator==(const AdamState&) const = default;
};

double global_norm(std::span<const double> g);

/// Scales `g` in place so its norm is at most `max_norm`; returns the norm
/// before clipping.
double clip_by_global_norm(std::span<double> g, double max_norm);

/// One bias-corrected Adam update of `params`. Throws on non-finite
/// gradients without touching params or state. Returns the pre-clip norm.
double adam_step(std::span<double> params, std::vector<double> grads, AdamState& state,
                 const AdamSpec& spec);

}  // namespace rats
