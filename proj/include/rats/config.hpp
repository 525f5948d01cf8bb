// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration files (JSON).
//
// Parsing is strict: unknown keys are rejected and the physics fields
// (rats.student_steps, teacher_steps, shift, alpha, gamma, gate_temperature
// and horizons) have no defaults. Syntax errors report line:column; schema
// errors report the dotted field path.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rats/pretrain.hpp"
#include "rats/task.hpp"
#include "rats/trainer.hpp"
#include "rats/velocity_field.hpp"

namespace rats {

struct DecoderSpec {
  bool identity = true;
  std::vector<std::vector<double>> matrix;  // [out_dim][in_dim] when linear

  Decoder build(std::size_t in_dim) const;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "runs/default";
  ToyTask task;
  ModelSpec model;
  PretrainConfig pretrain;
  /// Reward centers are derived from the task (decoded when the decoder is
  /// linear); train.seed mirrors `seed`.
  TrainConfig train;
  DecoderSpec decoder;
  std::size_t eval_samples = 1024;
  std::uint64_t eval_seed = 555;
  std::vector<std::size_t> eval_steps = {3, 5, 8, 50};

  /// Refreshes derived fields (train.seed, reward centers, decoder) and
  /// validates cross-field consistency.
  void finalize();
};

RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

/// 16 hex digits of FNV-1a over the canonical JSON, excluding output_dir.
std::string config_hash(const RunConfig& cfg);

/// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset);

}  // namespace rats
