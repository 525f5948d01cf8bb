// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/velocity_field.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rats/error.hpp"

namespace rats {

std::size_t ModelSpec::rank_for(std::size_t layer) const {
  return adapter_rank == 0 ? hidden.at(layer) : adapter_rank;
}

void ModelSpec::validate() const {
  if (dim == 0) throw ConfigError("model: dim must be positive");
  if (conditions == 0) throw ConfigError("model: condition count must be positive");
  if (hidden.empty()) throw ConfigError("model: at least one hidden layer is required");
  for (std::size_t w : hidden) {
    if (w == 0) throw ConfigError("model: hidden widths must be positive");
  }
}

namespace {

std::string layer_name(const char* prefix, std::size_t l, const char* suffix) {
  return std::string(prefix) + std::to_string(l) + suffix;
}

std::size_t fan_in(const ModelSpec& spec, std::size_t l) {
  return l == 0 ? spec.input_features() : spec.hidden[l - 1];
}

void fill_normal(std::span<double> dst, Rng& rng, double scale) {
  for (double& v : dst) v = scale * rng.normal();
}

}  // namespace

ParamLayout backbone_layout(const ModelSpec& spec) {
  spec.validate();
  ParamLayout layout;
  for (std::size_t l = 0; l < spec.hidden.size(); ++l) {
    layout.add(layer_name("hidden", l, ".W"), {fan_in(spec, l) + 1, spec.hidden[l]});
  }
  layout.add("out.W", {spec.hidden.back() + 1, spec.dim});
  return layout;
}

ParamLayout adapter_layout(const ModelSpec& spec) {
  spec.validate();
  ParamLayout layout;
  for (std::size_t l = 0; l < spec.hidden.size(); ++l) {
    layout.add(layer_name("adapter", l, ".A"), {fan_in(spec, l), spec.rank_for(l)});
    layout.add(layer_name("adapter", l, ".B"), {spec.rank_for(l), spec.hidden[l]});
  }
  return layout;
}

// Weights ~ N(0, 1/fan_in), the output layer scaled by 0.1; biases (the last
// row of each W) start at zero.
ParamSet init_backbone(const ModelSpec& spec, Rng& rng) {
  ParamSet p(backbone_layout(spec));
  const std::size_t layers = spec.hidden.size();
  for (std::size_t l = 0; l <= layers; ++l) {
    const bool out = l == layers;
    const std::size_t in = out ? spec.hidden.back() : fan_in(spec, l);
    const std::size_t width = out ? spec.dim : spec.hidden[l];
    auto w = p.view(out ? "out.W" : layer_name("hidden", l, ".W"));
    const double scale = (out ? 0.1 : 1.0) / std::sqrt(static_cast<double>(in));
    fill_normal(w.subspan(0, in * width), rng, scale);
  }
  return p;
}

ParamSet init_adapter(const ModelSpec& spec, Rng& rng) {
  ParamSet p(adapter_layout(spec));
  for (std::size_t l = 0; l < spec.hidden.size(); ++l) {
    fill_normal(p.view(layer_name("adapter", l, ".A")), rng,
                1.0 / std::sqrt(static_cast<double>(fan_in(spec, l))));
  }
  return p;
}

Tensor sigma_condition_features(const ModelSpec& spec, std::span<const double> sigmas,
                                std::span<const std::size_t> conditions) {
  if (sigmas.size() != conditions.size()) {
    throw ShapeError("features: " + std::to_string(sigmas.size()) + " sigmas for " +
                     std::to_string(conditions.size()) + " conditions");
  }
  const std::size_t n = sigmas.size();
  const std::size_t f = spec.sigma_frequencies;
  const std::size_t width = 1 + 2 * f + spec.conditions;
  std::vector<double> v(n * width, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double s = sigmas[r];
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("features: sigma " + std::to_string(s) + " outside [0,1]");
    if (conditions[r] >= spec.conditions) {
      throw ShapeError("features: condition id " + std::to_string(conditions[r]) + " >= " +
                       std::to_string(spec.conditions));
    }
    double* row = v.data() + r * width;
    row[0] = s;
    for (std::size_t k = 1; k <= f; ++k) {
      const double a = static_cast<double>(k) * std::numbers::pi * s;
      row[2 * k - 1] = std::sin(a);
      row[2 * k] = std::cos(a);
    }
    row[1 + 2 * f + conditions[r]] = 1.0;
  }
  return Tensor::constant({n, width}, std::move(v));
}

Tensor eval_velocity(const BoundModel& model, const Tensor& x, double sigma,
                     std::span<const std::size_t> conditions) {
  std::vector<double> sigmas(conditions.size(), sigma);
  return eval_velocity(model, x, sigmas, conditions);
}

Tensor eval_velocity(const BoundModel& model, const Tensor& x, std::span<const double> sigmas,
                     std::span<const std::size_t> conditions) {
  const ModelSpec& spec = *model.spec;
  const std::size_t layers = spec.hidden.size();
  if (model.backbone.size() != layers + 1) throw ShapeError("eval_velocity: backbone tensor count mismatch");
  if (!model.adapter.empty() && model.adapter.size() != 2 * layers) {
    throw ShapeError("eval_velocity: adapter tensor count mismatch");
  }
  if (x.rank() != 2 || x.cols() != spec.dim || x.rows() != conditions.size()) {
    throw ShapeError("eval_velocity: x has shape " + to_string(x.shape()) + ", expected [" +
                     std::to_string(conditions.size()) + "," + std::to_string(spec.dim) + "]");
  }
  const Tensor ones = Tensor::full({x.rows(), 1}, 1.0);
  Tensor h = concat({x, sigma_condition_features(spec, sigmas, conditions)}, 1);
  for (std::size_t l = 0; l < layers; ++l) {
    Tensor pre = matmul(concat({h, ones}, 1), model.backbone[l]);
    if (!model.adapter.empty()) {
      pre = pre + matmul(matmul(h, model.adapter[2 * l]), model.adapter[2 * l + 1]);
    }
    h = tanh(pre);
  }
  return matmul(concat({h, ones}, 1), model.backbone[layers]);
}

BoundModel fold_adapter(const BoundModel& model) {
  BoundModel out{model.spec, {}, {}};
  const std::size_t layers = model.spec->hidden.size();
  for (std::size_t l = 0; l < model.backbone.size(); ++l) {
    const Tensor w = stop_gradient(model.backbone[l]);
    if (l == layers || model.adapter.empty()) {
      out.backbone.push_back(w);
      continue;
    }
    const Tensor ab = matmul(stop_gradient(model.adapter[2 * l]), stop_gradient(model.adapter[2 * l + 1]));
    out.backbone.push_back(w + concat({ab, Tensor::zeros({1, ab.cols()})}, 0));
  }
  return out;
}

Tensor x0_predict(const Tensor& x, double sigma, const Tensor& v) { return x - sigma * v; }

Tensor pretrain_loss(const BoundModel& model, const Tensor& x0,
                     std::span<const std::size_t> conditions, Rng& rng) {
  const std::size_t n = x0.rows();
  const std::size_t d = x0.cols();
  if (n == 0) throw ShapeError("pretrain_loss: empty batch");
  std::vector<double> sigmas(n);
  std::vector<double> xt(n * d), target(n * d);
  auto xv = x0.values();
  for (std::size_t r = 0; r < n; ++r) {
    sigmas[r] = rng.uniform_open();
    for (std::size_t j = 0; j < d; ++j) {
      const double eps = rng.normal();
      const double a = xv[r * d + j];
      xt[r * d + j] = (1.0 - sigmas[r]) * a + sigmas[r] * eps;
      target[r * d + j] = eps - a;
    }
  }
  const Tensor v = eval_velocity(model, Tensor::constant({n, d}, std::move(xt)), sigmas, conditions);
  return mean(square(v - Tensor::constant({n, d}, std::move(target))));
}

void ema_update(AdapterState& teacher, const AdapterState& student, double gamma) {
  if (!(teacher.layout() == student.layout())) throw ShapeError("ema_update: adapter layouts differ");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("ema_update: gamma must lie in [0,1]");
  auto t = teacher.values();
  auto s = student.values();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = gamma * t[i] + (1.0 - gamma) * s[i];
}

AdapterState clone_as_teacher(const AdapterState& student) { return student; }

}  // namespace rats
