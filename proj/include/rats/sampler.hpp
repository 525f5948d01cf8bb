// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Stochastic re-interpolation sampler with a gradient-tracking window.
//
// Step i predicts x0 at sigma[i-1] and re-noises to sigma[i] with fresh
// Gaussian noise. Steps before the window start run on detached parameters;
// the latent entering the window start is cut with stop_gradient.

#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "rats/rng.hpp"
#include "rats/schedule.hpp"
#include "rats/tensor.hpp"
#include "rats/velocity_field.hpp"

namespace rats {

struct StepRecord {
  std::size_t step = 0;  // 1-based
  double sigma = 0.0;    // prediction sigma, sigma[step-1]
  Tensor x0;
};

struct Trajectory {
  NoiseSchedule schedule;
  std::vector<StepRecord> records;
  Tensor final;
  std::size_t window_start = 0;
  /// Detached latent fed into step `window_start` (undefined when the window
  /// is empty, i.e. window_start == steps + 1).
  Tensor window_input;
  /// noise[i-1] is the draw used to move from step i to sigma[i]; empty for
  /// the final step, whose target sigma is 0.
  std::vector<std::vector<double>> noise;

  const StepRecord& record(std::size_t step) const { return records.at(step - 1); }
};

/// (1 - sigma_next) * x0 + sigma_next * eps; returns x0 itself at sigma_next = 0.
Tensor sampling_step(const Tensor& x0, double sigma_next, const Tensor& eps);

/// Runs all N steps. `window_start` is in [1, N+1]; N+1 leaves every record
/// detached.
Trajectory rollout(const BoundModel& model, const NoiseSchedule& schedule, const Tensor& x1,
                   std::span<const std::size_t> conditions, Rng& noise, std::size_t window_start);

/// Replays `reference` from its window input with the same noise draws,
/// re-evaluating steps window_start..N under `model`. Earlier records are
/// copied from the reference.
Trajectory resume_rollout(const BoundModel& model, const Trajectory& reference,
                          std::span<const std::size_t> conditions);

/// Model with every tensor detached.
BoundModel detached(const BoundModel& model);

/// One CSV row per step: iteration,role,step,sigma,mean,norm where `mean` is
/// the mean coordinate of the x0-prediction and `norm` its mean row norm.
void write_trajectory_rows(std::ostream& out, std::size_t iteration, const std::string& role,
                           const Trajectory& traj);
inline constexpr const char* kTrajectoryCsvHeader = "iteration,role,step,sigma,mean,norm";

}  // namespace rats
