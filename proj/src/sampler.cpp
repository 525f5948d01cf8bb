// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include "rats/error.hpp"

namespace rats {

Tensor sampling_step(const Tensor& x0, double sigma_next, const Tensor& eps) {
  if (x0.shape() != eps.shape()) {
    throw ShapeError("sampling_step: x0 " + to_string(x0.shape()) + " vs eps " + to_string(eps.shape()));
  }
  if (!(sigma_next >= 0.0 && sigma_next <= 1.0)) {
    throw ConfigError("sampling_step: sigma_next outside [0,1]");
  }
  if (sigma_next == 0.0) return x0;
  if (sigma_next == 1.0) return eps;
  return (1.0 - sigma_next) * x0 + sigma_next * eps;
}

BoundModel detached(const BoundModel& model) {
  BoundModel out{model.spec, {}, {}};
  for (const Tensor& t : model.backbone) out.backbone.push_back(stop_gradient(t));
  for (const Tensor& t : model.adapter) out.adapter.push_back(stop_gradient(t));
  return out;
}

namespace {

bool any_tracked(const BoundModel& model) {
  for (const Tensor& t : model.backbone)
    if (t.requires_grad()) return true;
  for (const Tensor& t : model.adapter)
    if (t.requires_grad()) return true;
  return false;
}

void check_finite(const Tensor& t, std::size_t step) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) {
      throw NumericError("rollout: non-finite x0-prediction at step " + std::to_string(step));
    }
  }
}

using NoiseFn = std::function<std::vector<double>(std::size_t step, std::size_t count)>;

// Runs steps first..N from latent `x`, appending to `traj`.
void run_steps(const BoundModel& model, Trajectory& traj, Tensor x, std::size_t first,
               std::span<const std::size_t> conditions, const NoiseFn& draw) {
  const NoiseSchedule& s = traj.schedule;
  const std::size_t n = s.steps;
  BoundModel frozen;
  const bool need_frozen = traj.window_start > first && any_tracked(model);
  if (need_frozen) frozen = detached(model);

  for (std::size_t i = first; i <= n; ++i) {
    if (i == traj.window_start) {
      x = stop_gradient(x);
      traj.window_input = x;
    }
    const BoundModel& m = (i < traj.window_start && need_frozen) ? frozen : model;
    const double sigma = s.sigmas[i - 1];
    const Tensor v = eval_velocity(m, x, sigma, conditions);
    Tensor x0 = x0_predict(x, sigma, v);
    check_finite(x0, i);
    traj.records.push_back({i, sigma, x0});
    const double next = s.sigmas[i];
    if (next > 0.0) {
      std::vector<double> eps = draw(i, x.numel());
      if (traj.noise.size() < i) traj.noise.resize(i);
      traj.noise[i - 1] = eps;
      x = sampling_step(x0, next, Tensor::constant(x.shape(), std::move(eps)));
    } else {
      x = x0;
    }
  }
  traj.final = traj.records.back().x0;
  traj.noise.resize(n);
}

}  // namespace

Trajectory rollout(const BoundModel& model, const NoiseSchedule& schedule, const Tensor& x1,
                   std::span<const std::size_t> conditions, Rng& noise, std::size_t window_start) {
  if (window_start < 1 || window_start > schedule.steps + 1) {
    throw ConfigError("rollout: window start " + std::to_string(window_start) + " outside [1, " +
                      std::to_string(schedule.steps + 1) + "]");
  }
  Trajectory traj;
  traj.schedule = schedule;
  traj.window_start = window_start;
  traj.records.reserve(schedule.steps);
  run_steps(model, traj, x1, 1, conditions,
            [&noise](std::size_t, std::size_t count) { return noise.normals(count); });
  return traj;
}

Trajectory resume_rollout(const BoundModel& model, const Trajectory& reference,
                          std::span<const std::size_t> conditions) {
  Trajectory traj;
  traj.schedule = reference.schedule;
  traj.window_start = reference.window_start;
  const std::size_t start = reference.window_start;
  if (start > reference.schedule.steps) return reference;
  traj.records.assign(reference.records.begin(),
                      reference.records.begin() + static_cast<std::ptrdiff_t>(start - 1));
  traj.noise.assign(reference.noise.begin(),
                    reference.noise.begin() + static_cast<std::ptrdiff_t>(start - 1));
  run_steps(model, traj, reference.window_input, start, conditions,
            [&reference](std::size_t step, std::size_t) { return reference.noise.at(step - 1); });
  return traj;
}

void write_trajectory_rows(std::ostream& out, std::size_t iteration, const std::string& role,
                           const Trajectory& traj) {
  char buf[256];
  for (const StepRecord& r : traj.records) {
    const std::size_t rows = r.x0.rows(), cols = r.x0.cols();
    auto v = r.x0.values();
    double total = 0.0, norms = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      double sq = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        total += v[i * cols + j];
        sq += v[i * cols + j] * v[i * cols + j];
      }
      norms += std::sqrt(sq);
    }
    std::snprintf(buf, sizeof buf, "%zu,%s,%zu,%.17g,%.17g,%.17g\n", iteration, role.c_str(), r.step,
                  r.sigma, total / static_cast<double>(v.size()), norms / static_cast<double>(rows));
    out << buf;
  }
}

}  // namespace rats
