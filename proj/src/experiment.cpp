// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rats/error.hpp"

namespace rats {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

Provenance provenance_of(const RunConfig& cfg) { return {config_hash(cfg), cfg.seed}; }

PretrainResult run_pretrain(const RunConfig& cfg, const fs::path& out_dir) {
  PretrainResult res = pretrain_backbone(cfg.model, cfg.task, cfg.pretrain, cfg.seed);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    const Provenance prov = provenance_of(cfg);
    save_checkpoint(out_dir / "backbone.ckpt", backbone_header(cfg.model, prov), res.backbone);
    auto out = open_out(out_dir / "pretrain_loss.csv");
    out << "# config_hash=" << prov.config_hash << " seed=" << prov.seed << "\n";
    out << "iteration,loss\n";
    for (std::size_t i = 0; i < res.losses.size(); ++i) out << i << "," << fmt(res.losses[i]) << "\n";
    if (!out) throw IoError("failed writing " + (out_dir / "pretrain_loss.csv").string());
  }
  return res;
}

namespace {

ParamSet load_checked(const RunConfig& cfg, const fs::path& path, const std::string& kind,
                      const ParamLayout& expected) {
  Checkpoint ck = load_checkpoint(path);
  const CheckpointHeader& h = ck.header;
  if (h.kind != kind) throw ConfigError(path.string() + " holds a " + h.kind + " checkpoint, expected " + kind);
  if (h.dim != cfg.model.dim || h.conditions != cfg.model.conditions || h.hidden != cfg.model.hidden ||
      h.adapter_rank != cfg.model.adapter_rank || !(ck.params.layout() == expected)) {
    throw ConfigError(path.string() + " was written for a different model (dim " + std::to_string(h.dim) +
                      ", conditions " + std::to_string(h.conditions) + ") than the config (dim " +
                      std::to_string(cfg.model.dim) + ", conditions " + std::to_string(cfg.model.conditions) + ")");
  }
  return std::move(ck.params);
}

}  // namespace

ParamSet load_backbone(const RunConfig& cfg, const fs::path& path) {
  return load_checked(cfg, path, "backbone", backbone_layout(cfg.model));
}

AdapterState load_adapter(const RunConfig& cfg, const fs::path& path) {
  return load_checked(cfg, path, "adapter", adapter_layout(cfg.model));
}

RunResult run_rats(const RunConfig& cfg, const ParamSet& backbone, const fs::path& out_dir) {
  const Provenance prov = provenance_of(cfg);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto out = open_out(out_dir / "config.json");
    json j = to_json(cfg);
    j["config_hash"] = prov.config_hash;
    out << j.dump(2) << "\n";
  }
  return train_run(make_train_state(cfg.model, backbone, cfg.train), cfg.train, prov, out_dir);
}

HorizonScheme horizon_scheme(const std::string& name) {
  if (name == "non-uniform") return {name, default_horizons()};
  if (name == "uniform") return {name, uniform_horizons()};
  if (name == "single-horizon") return {name, single_horizon()};
  throw ConfigError("unknown horizon scheme '" + name + "' (expected non-uniform, uniform or single-horizon)");
}

AblationGrid parse_grid(const std::string& text, const RunConfig& base) {
  AblationGrid g;
  bool any = false;
  for (const std::string& part : split(text, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ConfigError("grid entry '" + part + "' is not key=values");
    const std::string key = part.substr(0, eq);
    const auto values = split(part.substr(eq + 1), ',');
    if (values.empty()) throw ConfigError("grid key '" + key + "' has no values");
    any = true;
    try {
      if (key == "modes") {
        for (const auto& v : values) g.modes.push_back(parse_ablation(v));
      } else if (key == "alphas") {
        for (const auto& v : values) {
          std::size_t used = 0;
          const double a = std::stod(v, &used);
          if (used != v.size() || !(a >= 0.0)) throw ConfigError("bad alpha '" + v + "'");
          g.alphas.push_back(a);
        }
      } else if (key == "horizons") {
        for (const auto& v : values) g.horizons.push_back(horizon_scheme(v).name);
      } else if (key == "seeds") {
        for (const auto& v : values) {
          std::size_t used = 0;
          const unsigned long long s = std::stoull(v, &used);
          if (used != v.size()) throw ConfigError("bad seed '" + v + "'");
          g.seeds.push_back(s);
        }
      } else {
        throw ConfigError("unknown grid key '" + key + "' (expected modes, alphas, horizons or seeds)");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("grid key '" + key + "' has a malformed value");
    }
  }
  if (!any) throw ConfigError("ablation grid is empty");
  if (g.modes.empty()) g.modes.push_back(base.train.ablation);
  if (g.alphas.empty()) g.alphas.push_back(base.train.alpha);
  if (g.horizons.empty()) g.horizons.push_back("config");
  if (g.seeds.empty()) g.seeds.push_back(base.seed);
  return g;
}

std::vector<AblationCell> run_ablate(const RunConfig& base, const AblationGrid& grid,
                                     const BackboneFor& backbone_for, const fs::path& out_dir) {
  if (grid.modes.empty() || grid.alphas.empty() || grid.horizons.empty() || grid.seeds.empty()) {
    throw ConfigError("ablation grid is empty");
  }
  std::vector<AblationCell> cells;
  for (Ablation mode : grid.modes)
    for (double alpha : grid.alphas)
      for (const std::string& h : grid.horizons) {
        AblationCell c;
        c.mode = mode;
        c.alpha = alpha;
        c.horizons = h;
        c.seeds = grid.seeds;
        cells.push_back(std::move(c));
      }

  // Seed-major so each backbone is built once and shared by every cell.
  for (std::uint64_t seed : grid.seeds) {
    const ParamSet backbone = backbone_for(seed);
    for (AblationCell& cell : cells) {
      RunConfig cfg = base;
      cfg.seed = seed;
      cfg.train.ablation = cell.mode;
      cfg.train.alpha = cell.alpha;
      if (cell.horizons != "config") cfg.train.horizons = horizon_scheme(cell.horizons).set;
      cfg.finalize();
      fs::path dir;
      if (!out_dir.empty()) {
        dir = out_dir / (to_string(cell.mode) + "_alpha" + fmt(cell.alpha) + "_" + cell.horizons) /
              ("seed" + std::to_string(seed));
      }
      const RunResult r = run_rats(cfg, backbone, dir);
      const IterationRecord* last = r.records.empty() ? nullptr : &r.records.back();
      cell.final_student.push_back(last ? last->smooth_student : 0.0);
      cell.final_teacher.push_back(last ? last->smooth_teacher : 0.0);
      long cross = -1;
      double gate = 0.0;
      for (const auto& rec : r.records) {
        if (!rec.failed && rec.smooth_student - rec.smooth_teacher >= 0.0) {
          cross = static_cast<long>(rec.iteration);
          gate = rec.loss.gate;
          break;
        }
      }
      cell.crossing.push_back(cross);
      cell.gate_at_crossing.push_back(gate);
    }
  }
  for (AblationCell& c : cells) {
    double s = 0.0;
    for (double v : c.final_student) s += v;
    c.mean_student = s / static_cast<double>(c.final_student.size());
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    auto out = open_out(out_dir / "ablation.csv");
    write_ablation_csv(out, provenance_of(base), cells);
    if (!out) throw IoError("failed writing " + (out_dir / "ablation.csv").string());
  }
  return cells;
}

void write_ablation_csv(std::ostream& out, const Provenance& prov, const std::vector<AblationCell>& cells) {
  out << "# config_hash=" << prov.config_hash << " seed=" << prov.seed;
  if (!cells.empty()) {
    out << " seeds=";
    for (std::size_t i = 0; i < cells[0].seeds.size(); ++i) out << (i ? "," : "") << cells[0].seeds[i];
  }
  out << "\nmode,alpha,horizons,mean_final_R_S";
  if (!cells.empty()) {
    for (std::uint64_t s : cells[0].seeds) out << ",seed_" << s;
  }
  out << "\n";
  for (const AblationCell& c : cells) {
    out << to_string(c.mode) << "," << fmt(c.alpha) << "," << c.horizons << "," << fmt(c.mean_student);
    for (double v : c.final_student) out << "," << fmt(v);
    out << "\n";
  }
}

json run_eval(const RunConfig& cfg, const ParamSet& backbone, const AdapterState* adapter,
              const std::vector<std::size_t>& steps, const fs::path& out_dir) {
  if (steps.empty()) throw ConfigError("no evaluation step counts given");
  for (std::size_t s : steps) {
    if (s < 1) throw ConfigError("evaluation steps must be >= 1");
  }
  const Provenance prov = provenance_of(cfg);
  json summary = {{"config_hash", prov.config_hash},
                  {"seed", prov.seed},
                  {"eval_seed", cfg.eval_seed},
                  {"samples", cfg.eval_samples},
                  {"adapter", adapter != nullptr},
                  {"results", json::array()}};
  if (!out_dir.empty()) ensure_dir(out_dir);
  for (std::size_t s : steps) {
    const EvalSamples samples = generate_samples(cfg.model, backbone, adapter, cfg.task, cfg.train.decoder, s,
                                                 cfg.train.shift, cfg.eval_samples, cfg.eval_seed);
    const EvalSummary sum = summarize_samples(cfg.train.reward, samples, s);
    summary["results"].push_back({{"steps", s},
                                  {"mean_reward", sum.mean_reward},
                                  {"mode_accuracy", sum.mode_accuracy},
                                  {"per_condition_reward", sum.per_condition_reward},
                                  {"per_condition_count", sum.per_condition_count}});
    if (!out_dir.empty()) {
      const fs::path path = out_dir / ("samples_steps" + std::to_string(s) + ".csv");
      auto out = open_out(path);
      out << "# config_hash=" << prov.config_hash << " seed=" << prov.seed << " eval_seed=" << cfg.eval_seed
          << "\ncondition";
      const std::size_t d = samples.y.cols();
      for (std::size_t j = 0; j < d; ++j) out << ",y" << j;
      out << "\n";
      auto v = samples.y.values();
      for (std::size_t r = 0; r < samples.conditions.size(); ++r) {
        out << samples.conditions[r];
        for (std::size_t j = 0; j < d; ++j) out << "," << fmt(v[r * d + j]);
        out << "\n";
      }
      if (!out) throw IoError("failed writing " + path.string());
    }
  }
  if (!out_dir.empty()) {
    auto out = open_out(out_dir / "eval_summary.json");
    out << summary.dump(2) << "\n";
  }
  return summary;
}

}  // namespace rats
