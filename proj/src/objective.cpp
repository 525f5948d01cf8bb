// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "rats/error.hpp"

namespace rats {

void DivergenceWeights::validate() const {
  if (!(cosine >= 0.0) || !(l2 >= 0.0)) throw ConfigError("divergence weights must be non-negative");
  if (cosine == 0.0 && l2 == 0.0) throw ConfigError("divergence weights cannot both be zero");
}

Tensor horizon_divergence(const Tensor& xs, const Tensor& xt, const DivergenceWeights& w,
                          DivergenceStats* stats) {
  if (xs.shape() != xt.shape() || xs.rank() != 2) {
    throw ShapeError("horizon_divergence: shapes " + to_string(xs.shape()) + " and " +
                     to_string(xt.shape()) + " must be equal rank-2");
  }
  if (xt.requires_grad()) throw std::invalid_argument("horizon_divergence: teacher side must be detached");
  const std::size_t n = xs.rows(), d = xs.cols();
  auto sv = xs.values();
  auto tv = xt.values();

  std::vector<std::size_t> valid;
  for (std::size_t r = 0; r < n; ++r) {
    double ns = 0.0, nt = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      ns += sv[r * d + j] * sv[r * d + j];
      nt += tv[r * d + j] * tv[r * d + j];
    }
    if (ns > 0.0 && nt > 0.0) valid.push_back(r);
  }
  const std::size_t degenerate = n - valid.size();
  if (stats) stats->zero_norm += degenerate;

  Tensor acc = Tensor::scalar(w.cosine * static_cast<double>(degenerate));
  if (w.cosine != 0.0 && !valid.empty()) {
    const Tensor s = valid.size() == n ? xs : select_rows(xs, valid);
    const Tensor t = valid.size() == n ? xt : select_rows(xt, valid);
    const Tensor cos = row_sum(s * t) / (sqrt(row_sum(square(s))) * sqrt(row_sum(square(t))));
    acc = acc + w.cosine * sum(1.0 - cos);
  }
  if (w.l2 != 0.0) acc = acc + w.l2 * frobenius_sq(xs - xt);
  return acc * (1.0 / static_cast<double>(n));
}

ShapingResult shaping_loss(const Trajectory& student, const Trajectory& teacher,
                           const std::vector<HorizonPair>& pairs, const HorizonSet& horizons,
                           const DivergenceWeights& w) {
  if (pairs.size() != horizons.size()) {
    throw std::invalid_argument("shaping_loss: " + std::to_string(pairs.size()) + " pairs for " +
                                std::to_string(horizons.size()) + " horizons");
  }
  ShapingResult out;
  out.loss = Tensor::scalar(0.0);
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    const auto [ps, pt] = pairs[m];
    if (ps < student.window_start) {
      throw std::invalid_argument("shaping_loss: horizon " + std::to_string(m) + " matches student step " +
                                  std::to_string(ps) + " before the gradient window start " +
                                  std::to_string(student.window_start));
    }
    DivergenceStats stats;
    const Tensor lm = horizon_divergence(student.record(ps).x0, teacher.record(pt).x0, w, &stats);
    out.per_horizon.push_back(lm.item());
    out.zero_norm += stats.zero_norm;
    out.loss = out.loss + horizons.weights[m] * lm;
  }
  return out;
}

void GateConfig::validate() const {
  if (enabled && !override_value && !(temperature > 0.0)) {
    throw ConfigError("gate temperature must be positive");
  }
}

double reward_gate(double r_teacher, double r_student, const GateConfig& cfg) {
  if (cfg.override_value) return *cfg.override_value;
  if (!cfg.enabled) return 1.0;
  const double z = (r_teacher - r_student) / cfg.temperature;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

TotalLoss total_loss(const Tensor& reward_loss, const Tensor& shape_loss, double gate, double alpha,
                     double reward_weight) {
  auto check = [](double v, const char* what) {
    if (!std::isfinite(v)) throw NumericError(std::string("total_loss: non-finite ") + what);
  };
  check(reward_loss.item(), "reward loss");
  check(shape_loss.item(), "shaping loss");
  check(gate, "gate");
  check(alpha, "alpha");
  if (alpha < 0.0) throw ConfigError("total_loss: alpha must be non-negative");

  TotalLoss out;
  out.total = reward_weight * reward_loss + (alpha * gate) * shape_loss;
  auto& b = out.breakdown;
  b.reward_loss = reward_loss.item();
  b.shape_loss = shape_loss.item();
  b.gate = gate;
  b.alpha = alpha;
  b.reward_weight = reward_weight;
  b.total = out.total.item();
  return out;
}

}  // namespace rats
