// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// rats: pretrain | rats | ablate | eval
//
// Exit codes: 0 success, 2 usage/config/IO error, 3 numeric failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rats/config.hpp"
#include "rats/error.hpp"
#include "rats/experiment.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Run config (JSON)")->required();
  cmd->add_option("--seed", c.seed, "Override the config seed");
  cmd->add_option("--out", c.out, "Output directory (default: the config's output_dir)");
}

rats::RunConfig load(const Common& c) {
  rats::RunConfig cfg = rats::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.finalize();
  return cfg;
}

std::vector<std::size_t> parse_steps(const std::string& text) {
  std::vector<std::size_t> steps;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != tok.size()) throw rats::ConfigError("--steps: '" + tok + "' is not an integer");
    if (v < 1) throw rats::ConfigError("--steps: step counts must be >= 1 (got " + tok + ")");
    steps.push_back(static_cast<std::size_t>(v));
  }
  if (steps.empty()) throw rats::ConfigError("--steps: no step counts given");
  return steps;
}

void print_final(const rats::RunResult& r) {
  if (r.records.empty()) return;
  const auto& last = r.records.back();
  std::cout << "iterations " << r.records.size() << "  R_S(smooth) " << last.smooth_student << "  R_T(smooth) "
            << last.smooth_teacher << "  gate " << last.loss.gate << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-aware trajectory shaping on a toy flow-matching task"};
  app.require_subcommand(1);

  Common pre_c, rats_c, abl_c, eval_c;
  std::string rats_backbone, abl_backbone, abl_grid, eval_backbone, eval_adapter, eval_steps;

  auto* pre = app.add_subcommand("pretrain", "Train the backbone; writes backbone.ckpt and pretrain_loss.csv");
  add_common(pre, pre_c);

  auto* rats_cmd = app.add_subcommand("rats", "Train the student adapter against a pretrained backbone");
  add_common(rats_cmd, rats_c);
  rats_cmd->add_option("--backbone", rats_backbone, "Backbone checkpoint (default: <out>/backbone.ckpt)");

  auto* abl = app.add_subcommand("ablate", "Run an ablation grid; writes ablation.csv");
  add_common(abl, abl_c);
  abl->add_option("--grid", abl_grid, "e.g. modes=full,no-gate;alphas=0.5,2;horizons=uniform;seeds=1,2")
      ->required();
  abl->add_option("--backbone", abl_backbone, "Shared backbone checkpoint (default: pretrain per seed)");

  auto* ev = app.add_subcommand("eval", "Evaluate a backbone, optionally with an adapter");
  add_common(ev, eval_c);
  ev->add_option("--backbone", eval_backbone, "Backbone checkpoint")->required();
  ev->add_option("--adapter", eval_adapter, "Adapter checkpoint");
  ev->add_option("--steps", eval_steps, "Comma-separated step counts (default: config eval.steps)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*pre) {
      const rats::RunConfig cfg = load(pre_c);
      const auto res = rats::run_pretrain(cfg, cfg.output_dir);
      std::cout << "pretrain loss " << res.losses.front() << " -> " << res.losses.back() << "\n"
                << "wrote " << (fs::path(cfg.output_dir) / "backbone.ckpt").string() << "\n";
    } else if (*rats_cmd) {
      const rats::RunConfig cfg = load(rats_c);
      const fs::path bb = rats_backbone.empty() ? fs::path(cfg.output_dir) / "backbone.ckpt" : fs::path(rats_backbone);
      const rats::ParamSet backbone = rats::load_backbone(cfg, bb);
      print_final(rats::run_rats(cfg, backbone, cfg.output_dir));
      std::cout << "wrote " << (fs::path(cfg.output_dir) / "metrics.csv").string() << "\n";
    } else if (*abl) {
      const rats::RunConfig cfg = load(abl_c);
      const rats::AblationGrid grid = rats::parse_grid(abl_grid, cfg);
      std::optional<rats::ParamSet> shared;
      if (!abl_backbone.empty()) shared = rats::load_backbone(cfg, abl_backbone);
      const auto backbone_for = [&](std::uint64_t seed) {
        if (shared) return *shared;
        rats::RunConfig c = cfg;
        c.seed = seed;
        c.finalize();
        return rats::run_pretrain(c, fs::path(cfg.output_dir) / ("backbone_seed" + std::to_string(seed))).backbone;
      };
      const auto cells = rats::run_ablate(cfg, grid, backbone_for, cfg.output_dir);
      rats::write_ablation_csv(std::cout, rats::provenance_of(cfg), cells);
    } else if (*ev) {
      const rats::RunConfig cfg = load(eval_c);
      const rats::ParamSet backbone = rats::load_backbone(cfg, eval_backbone);
      std::optional<rats::AdapterState> adapter;
      if (!eval_adapter.empty()) adapter = rats::load_adapter(cfg, eval_adapter);
      const auto steps = eval_steps.empty() ? cfg.eval_steps : parse_steps(eval_steps);
      const auto summary = rats::run_eval(cfg, backbone, adapter ? &*adapter : nullptr, steps, cfg.output_dir);
      std::cout << summary.dump(2) << "\n";
    }
  } catch (const rats::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const rats::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const rats::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
