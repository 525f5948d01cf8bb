// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/schedule.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rats/error.hpp"

namespace rats {

double time_shift(double t, double shift) { return shift * t / (1.0 + (shift - 1.0) * t); }

NoiseSchedule build_schedule(std::size_t steps, double shift) {
  if (steps == 0) throw ConfigError("build_schedule: steps must be >= 1");
  if (!(shift > 0.0) || !std::isfinite(shift)) {
    throw ConfigError("build_schedule: shift must be positive, got " + std::to_string(shift));
  }
  NoiseSchedule s;
  s.steps = steps;
  s.shift = shift;
  s.sigmas.resize(steps + 1);
  const double n = static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) {
    s.sigmas[i] = time_shift(1.0 - static_cast<double>(i) / n, shift);
  }
  s.sigmas.front() = 1.0;
  s.sigmas.back() = 0.0;
  return s;
}

HorizonSet make_horizons(std::vector<double> targets, std::vector<double> weights) {
  if (targets.empty()) throw ConfigError("horizons: at least one target is required");
  if (targets.size() != weights.size()) {
    throw ConfigError("horizons: " + std::to_string(targets.size()) + " targets but " +
                      std::to_string(weights.size()) + " weights");
  }
  for (std::size_t m = 0; m < targets.size(); ++m) {
    if (!(targets[m] > 0.0 && targets[m] < 1.0)) {
      throw ConfigError("horizons: target " + std::to_string(targets[m]) + " not in (0,1)");
    }
    if (!(weights[m] > 0.0) || !std::isfinite(weights[m])) {
      throw ConfigError("horizons: weight " + std::to_string(weights[m]) + " must be positive");
    }
    if (m > 0 && !(targets[m] < targets[m - 1])) {
      throw ConfigError("horizons: targets must be strictly decreasing");
    }
    if (m > 0 && weights[m] < weights[m - 1]) {
      throw ConfigError("horizons: weights must not decrease as noise decreases");
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= total;
  return HorizonSet{std::move(targets), std::move(weights)};
}

HorizonSet default_horizons() { return make_horizons({0.75, 0.40, 0.15}, {0.2, 0.3, 0.5}); }
HorizonSet uniform_horizons() { return make_horizons({0.75, 0.40, 0.15}, {1.0, 1.0, 1.0}); }
HorizonSet single_horizon() { return make_horizons({0.15}, {1.0}); }

std::size_t match_horizon(const NoiseSchedule& schedule, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw ConfigError("match_horizon: target " + std::to_string(target) + " not in (0,1)");
  }
  std::size_t best = 1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i <= schedule.steps; ++i) {
    const double dist = std::abs(schedule.prediction_sigma(i) - target);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

std::vector<HorizonPair> match_horizon_pair(const NoiseSchedule& student,
                                            const NoiseSchedule& teacher,
                                            const HorizonSet& horizons) {
  std::vector<HorizonPair> pairs;
  pairs.reserve(horizons.size());
  for (double t : horizons.targets) {
    pairs.push_back({match_horizon(student, t), match_horizon(teacher, t)});
  }
  return pairs;
}

std::size_t grad_window_for(const HorizonSet& horizons, const NoiseSchedule& schedule) {
  std::size_t start = schedule.steps;
  for (double t : horizons.targets) start = std::min(start, match_horizon(schedule, t));
  return start;
}

}  // namespace rats
