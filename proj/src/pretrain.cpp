// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/pretrain.hpp"

#include <cmath>

#include "rats/error.hpp"
#include "rats/optimizer.hpp"

namespace rats {

void PretrainConfig::validate() const {
  if (batch < 1) throw ConfigError("pretrain batch must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("pretrain learning_rate must be positive");
}

PretrainResult pretrain_backbone(const ModelSpec& spec, const ToyTask& task, const PretrainConfig& cfg,
                                 std::uint64_t seed) {
  cfg.validate();
  task.validate();
  if (task.dim != spec.dim || task.conditions != spec.conditions) {
    throw ConfigError("task and model dimensions disagree");
  }
  Rng init(seed, "backbone-init");
  PretrainResult out{init_backbone(spec, init), {}};
  out.losses.reserve(cfg.iterations);

  AdamSpec adam;
  adam.learning_rate = cfg.learning_rate;
  adam.clip_norm = 0.0;
  AdamState state;
  const Rng data(task.data_seed, "data");
  const Rng noise(seed, "pretrain");
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    Rng data_rng = data.derive("batch", it);
    Rng noise_rng = noise.derive("fm", it);
    const Batch batch = sample_data(task, cfg.batch, data_rng);
    const std::vector<Tensor> leaves = out.backbone.bind(true);
    const BoundModel model{&spec, leaves, {}};
    const Tensor loss = pretrain_loss(model, batch.x0, batch.conditions, noise_rng);
    if (!std::isfinite(loss.item())) {
      throw NumericError("pretraining loss became non-finite at iteration " + std::to_string(it));
    }
    out.losses.push_back(loss.item());
    adam_step(out.backbone.values(), out.backbone.gather_grads(leaves, backward(loss)), state, adam);
  }
  return out;
}

}  // namespace rats
