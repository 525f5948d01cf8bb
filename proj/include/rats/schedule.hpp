// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Time-shifted sigma schedules and sigma-proximity horizon matching.
//
// Step i (1-based) of an N-step sampler makes its x0-prediction at
// sigma[i-1] and then moves to sigma[i]. Horizon matching works on those
// prediction sigmas.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace rats {

/// phi_s(t) = s*t / (1 + (s-1)*t).
double time_shift(double t, double shift);

struct NoiseSchedule {
  std::size_t steps = 0;
  double shift = 1.0;
  std::vector<double> sigmas;  // steps + 1 entries, sigmas[0] = 1, sigmas[steps] = 0

  /// Sigma at which the i-th prediction (1-based) is made.
  double prediction_sigma(std::size_t i) const { return sigmas.at(i - 1); }
};

NoiseSchedule build_schedule(std::size_t steps, double shift);

struct HorizonSet {
  std::vector<double> targets;  // strictly decreasing, each in (0,1)
  std::vector<double> weights;  // positive, non-decreasing, normalized to sum 1

  std::size_t size() const { return targets.size(); }
};

/// Validates and normalizes. Weights are only required to be non-decreasing
/// so the uniform scheme is representable.
HorizonSet make_horizons(std::vector<double> targets, std::vector<double> weights);

HorizonSet default_horizons();
HorizonSet uniform_horizons();
HorizonSet single_horizon();

/// 1-based step whose prediction sigma is nearest to `target`; ties go to the
/// smaller index.
std::size_t match_horizon(const NoiseSchedule& schedule, double target);

struct HorizonPair {
  std::size_t student = 0;
  std::size_t teacher = 0;
};

std::vector<HorizonPair> match_horizon_pair(const NoiseSchedule& student,
                                            const NoiseSchedule& teacher,
                                            const HorizonSet& horizons);

/// Earliest matched student step; the gradient window must start there.
std::size_t grad_window_for(const HorizonSet& horizons, const NoiseSchedule& schedule);

}  // namespace rats
