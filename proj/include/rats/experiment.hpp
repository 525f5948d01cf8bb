// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// File-producing entry points behind the command-line verbs.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rats/config.hpp"
#include "rats/trainer.hpp"

namespace rats {

Provenance provenance_of(const RunConfig& cfg);

/// Trains the backbone; writes backbone.ckpt and pretrain_loss.csv.
PretrainResult run_pretrain(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Loads a checkpoint and checks it against the configured model.
ParamSet load_backbone(const RunConfig& cfg, const std::filesystem::path& path);
AdapterState load_adapter(const RunConfig& cfg, const std::filesystem::path& path);

/// Full training run; writes config.json plus the train_run artifacts.
RunResult run_rats(const RunConfig& cfg, const ParamSet& backbone, const std::filesystem::path& out_dir);

struct HorizonScheme {
  std::string name;
  HorizonSet set;
};

/// "non-uniform", "uniform" or "single-horizon".
HorizonScheme horizon_scheme(const std::string& name);

struct AblationGrid {
  std::vector<Ablation> modes;
  std::vector<double> alphas;
  std::vector<std::string> horizons;
  std::vector<std::uint64_t> seeds;
};

/// Parses "modes=a,b;alphas=x,y;horizons=u,v;seeds=1,2". Omitted keys fall
/// back to the configured value; a grid naming no key at all is rejected.
AblationGrid parse_grid(const std::string& text, const RunConfig& base);

struct AblationCell {
  Ablation mode = Ablation::Full;
  double alpha = 0.0;
  std::string horizons;
  std::vector<std::uint64_t> seeds;
  /// Final smoothed student / teacher rewards, one per seed.
  std::vector<double> final_student;
  std::vector<double> final_teacher;
  /// First iteration where smoothed R_S >= smoothed R_T (-1 if never) and
  /// the gate logged at that iteration.
  std::vector<long> crossing;
  std::vector<double> gate_at_crossing;
  double mean_student = 0.0;
};

using BackboneFor = std::function<ParamSet(std::uint64_t seed)>;

/// Runs every (mode, alpha, horizons) cell for every seed, sharing seeds
/// across cells. Writes one metrics directory per cell and seed plus
/// ablation.csv with one row per cell and one column per seed.
std::vector<AblationCell> run_ablate(const RunConfig& base, const AblationGrid& grid,
                                     const BackboneFor& backbone_for, const std::filesystem::path& out_dir);

void write_ablation_csv(std::ostream& out, const Provenance& prov, const std::vector<AblationCell>& cells);

/// Evaluates at each step count; writes eval_summary.json and one samples
/// CSV per step count when `out_dir` is non-empty.
nlohmann::json run_eval(const RunConfig& cfg, const ParamSet& backbone, const AdapterState* adapter,
                        const std::vector<std::size_t>& steps, const std::filesystem::path& out_dir);

}  // namespace rats
