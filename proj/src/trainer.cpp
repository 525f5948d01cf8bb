// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rats/error.hpp"

namespace rats {

std::string to_string(Ablation mode) {
  switch (mode) {
    case Ablation::Full: return "full";
    case Ablation::RewardOnly: return "reward-only";
    case Ablation::DistillOnly: return "distill-only";
    case Ablation::NoGate: return "no-gate";
  }
  return "full";
}

Ablation parse_ablation(const std::string& name) {
  if (name == "full") return Ablation::Full;
  if (name == "reward-only") return Ablation::RewardOnly;
  if (name == "distill-only") return Ablation::DistillOnly;
  if (name == "no-gate") return Ablation::NoGate;
  throw ConfigError("unknown ablation mode '" + name +
                    "' (expected full, reward-only, distill-only or no-gate)");
}

void TrainConfig::validate() const {
  if (student_steps < 1) throw ConfigError("student_steps must be >= 1");
  if (teacher_steps < student_steps) throw ConfigError("teacher_steps must be >= student_steps");
  if (!(shift > 0.0)) throw ConfigError("shift must be positive");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0,1]");
  if (!(gate_temperature > 0.0)) throw ConfigError("gate_temperature must be positive");
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw ConfigError("smoothing must lie in [0,1)");
  if (horizons.size() == 0) throw ConfigError("at least one horizon is required");
  divergence.validate();
  reward.validate();
  optimizer.validate();
  if (decoder.out_dim() != reward.dim) throw ConfigError("decoder output dim does not match reward dim");
}

GateConfig TrainConfig::gate_config() const {
  GateConfig g;
  g.temperature = gate_temperature;
  if (ablation == Ablation::NoGate || ablation == Ablation::DistillOnly) g.override_value = 1.0;
  return g;
}

TrainState make_train_state(const ModelSpec& spec, ParamSet backbone, const TrainConfig& cfg) {
  cfg.validate();
  if (!(backbone.layout() == backbone_layout(spec))) {
    throw ConfigError("backbone parameters do not match the model dimensions");
  }
  if (cfg.decoder.in_dim() != spec.dim) throw ConfigError("decoder input dim does not match the model dim");
  if (cfg.reward.conditions() != spec.conditions) {
    throw ConfigError("reward has " + std::to_string(cfg.reward.conditions()) + " centers but the model has " +
                      std::to_string(spec.conditions) + " conditions");
  }
  TrainState s;
  s.spec = spec;
  s.backbone = std::move(backbone);
  s.backbone_tensors = s.backbone.bind(false);
  Rng init(cfg.seed, "adapter-init");
  s.student = init_adapter(spec, init);
  s.teacher = clone_as_teacher(s.student);
  s.student_schedule = build_schedule(cfg.student_steps, cfg.shift);
  s.teacher_schedule = build_schedule(cfg.teacher_steps, cfg.shift);
  s.pairs = match_horizon_pair(s.student_schedule, s.teacher_schedule, cfg.horizons);
  s.window_start = cfg.shaping_enabled() ? grad_window_for(cfg.horizons, s.student_schedule)
                                         : cfg.student_steps;
  return s;
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::SampleInputs: return "sample-inputs";
    case Phase::StudentRollout: return "student-rollout";
    case Phase::TeacherRollout: return "teacher-rollout";
    case Phase::StudentReward: return "student-reward";
    case Phase::HorizonLoopBegin: return "horizon-loop-begin";
    case Phase::MatchHorizon: return "match-horizon";
    case Phase::HorizonDivergence: return "horizon-divergence";
    case Phase::HorizonLoopEnd: return "horizon-loop-end";
    case Phase::ShapingAggregate: return "shaping-aggregate";
    case Phase::TeacherReward: return "teacher-reward";
    case Phase::Gate: return "gate";
    case Phase::TotalLoss: return "total-loss";
    case Phase::BackwardUpdate: return "backward-update";
    case Phase::EmaUpdate: return "ema-update";
  }
  return "unknown";
}

namespace {

struct Shaped {
  Tensor loss;
  std::vector<double> per_horizon;
  std::size_t zero_norm = 0;
};

// Per-horizon divergences in horizon order, then the weighted sum. Mirrors
// shaping_loss() so both produce identical values.
Shaped shape_student(const TrainState& state, const TrainConfig& cfg, const Trajectory& student,
                     const Trajectory& teacher, const TraceFn& trace) {
  auto emit = [&](Phase p) {
    if (trace) trace(p);
  };
  Shaped out;
  out.loss = Tensor::scalar(0.0);
  emit(Phase::HorizonLoopBegin);
  std::vector<Tensor> terms;
  if (cfg.shaping_enabled()) {
    for (std::size_t m = 0; m < cfg.horizons.size(); ++m) {
      emit(Phase::MatchHorizon);
      const HorizonPair pair = state.pairs[m];
      emit(Phase::HorizonDivergence);
      if (pair.student < student.window_start) {
        throw std::logic_error("horizon matched before the gradient window");
      }
      DivergenceStats stats;
      terms.push_back(horizon_divergence(student.record(pair.student).x0,
                                         teacher.record(pair.teacher).x0, cfg.divergence, &stats));
      out.per_horizon.push_back(terms.back().item());
      out.zero_norm += stats.zero_norm;
    }
  }
  emit(Phase::HorizonLoopEnd);
  emit(Phase::ShapingAggregate);
  for (std::size_t m = 0; m < terms.size(); ++m) out.loss = out.loss + cfg.horizons.weights[m] * terms[m];
  return out;
}

}  // namespace

IterationProbe probe_iteration(const TrainState& state, const TrainConfig& cfg, const TraceFn& trace) {
  auto emit = [&](Phase p) {
    if (trace) trace(p);
  };
  IterationProbe p;
  p.iteration = state.iteration;
  const Rng root(cfg.seed, "train");
  const std::uint64_t k = state.iteration;

  emit(Phase::SampleInputs);
  Rng cond_rng = root.derive("cond", k);
  p.conditions.resize(cfg.batch);
  for (auto& c : p.conditions) c = static_cast<std::size_t>(cond_rng.below(state.spec.conditions));
  Rng x1_rng = root.derive("x1", k);
  p.x1 = sample_normal(cfg.batch, state.spec.dim, x1_rng);

  emit(Phase::StudentRollout);
  p.student_leaves = state.student.bind(true);
  const BoundModel student{&state.spec, state.backbone_tensors, p.student_leaves};
  Rng student_noise = root.derive("student", k);
  p.student = rollout(student, state.student_schedule, p.x1, p.conditions, student_noise, state.window_start);

  emit(Phase::TeacherRollout);
  p.teacher_tensors = state.teacher.bind(false);
  const BoundModel teacher = fold_adapter({&state.spec, state.backbone_tensors, p.teacher_tensors});
  Rng teacher_noise = root.derive(cfg.share_noise_streams ? "student" : "teacher", k);
  p.teacher = rollout(teacher, state.teacher_schedule, p.x1, p.conditions, teacher_noise,
                      state.teacher_schedule.steps + 1);

  emit(Phase::StudentReward);
  const Tensor r_student = reward_per_sample(cfg.reward, cfg.decoder.decode(p.student.final), p.conditions);
  const double rs = mean(r_student).item();
  p.reward_loss = reward_loss(cfg.reward_loss, r_student);

  Shaped shaped = shape_student(state, cfg, p.student, p.teacher, trace);
  p.shape_loss = shaped.loss;

  emit(Phase::TeacherReward);
  const double rt = reward(cfg.reward, cfg.decoder.decode(p.teacher.final), p.conditions).item();

  emit(Phase::Gate);
  const double g = reward_gate(rt, rs, cfg.gate_config());

  emit(Phase::TotalLoss);
  p.total = total_loss(p.reward_loss, p.shape_loss, g, cfg.effective_alpha(), cfg.reward_weight());
  p.total.breakdown.per_horizon = std::move(shaped.per_horizon);
  p.total.breakdown.zero_norm = shaped.zero_norm;
  p.total.breakdown.r_student = rs;
  p.total.breakdown.r_teacher = rt;
  return p;
}

Tensor replay_total(const TrainState& state, const TrainConfig& cfg, const IterationProbe& probe,
                    const std::vector<Tensor>& adapter) {
  const BoundModel model{&state.spec, state.backbone_tensors, adapter};
  const Trajectory student = resume_rollout(model, probe.student, probe.conditions);
  const Tensor r = reward_per_sample(cfg.reward, cfg.decoder.decode(student.final), probe.conditions);
  const Shaped shaped = shape_student(state, cfg, student, probe.teacher, {});
  return total_loss(reward_loss(cfg.reward_loss, r), shaped.loss, probe.total.breakdown.gate,
                    cfg.effective_alpha(), cfg.reward_weight())
      .total;
}

IterationRecord train_iteration(TrainState& state, const TrainConfig& cfg, const TraceFn& trace) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  IterationRecord rec;
  rec.iteration = state.iteration;
  try {
    IterationProbe p = probe_iteration(state, cfg, trace);
    rec.loss = p.total.breakdown;

    if (trace) trace(Phase::BackwardUpdate);
    const GradientMap grads = backward(p.total.total);
    std::vector<double> flat = state.student.gather_grads(p.student_leaves, grads);
    AdapterState student = state.student;
    AdamState adam = state.adam;
    rec.grad_norm = adam_step(student.values(), std::move(flat), adam, cfg.optimizer);
    for (double v : student.values()) {
      if (!std::isfinite(v)) throw NumericError("adapter update produced a non-finite parameter");
    }

    if (trace) trace(Phase::EmaUpdate);
    AdapterState teacher = state.teacher;
    ema_update(teacher, student, cfg.gamma);

    state.student = std::move(student);
    state.teacher = std::move(teacher);
    state.adam = std::move(adam);
    const double a = cfg.smoothing;
    state.smooth_student = state.smooth_student ? a * *state.smooth_student + (1.0 - a) * rec.loss.r_student
                                                : rec.loss.r_student;
    state.smooth_teacher = state.smooth_teacher ? a * *state.smooth_teacher + (1.0 - a) * rec.loss.r_teacher
                                                : rec.loss.r_teacher;
  } catch (const NumericError& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  rec.smooth_student = state.smooth_student.value_or(std::numeric_limits<double>::quiet_NaN());
  rec.smooth_teacher = state.smooth_teacher.value_or(std::numeric_limits<double>::quiet_NaN());
  if (cfg.record_wall_time) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  state.iteration += 1;
  return rec;
}

// ---------------------------------------------------------------------------
// Metrics and run loop

MetricsWriter::MetricsWriter(std::ostream& out, const Provenance& prov, std::size_t horizons)
    : out_(out), horizons_(horizons) {
  out_ << "# config_hash=" << prov.config_hash << " seed=" << prov.seed << "\n";
  out_ << "iteration,reward_loss,shape_loss,gate,total,R_S,R_T,grad_norm,wall_ms,R_S_smooth,R_T_smooth,status";
  for (std::size_t m = 1; m <= horizons_; ++m) out_ << ",L_" << m;
  out_ << "\n";
}

void MetricsWriter::write(const IterationRecord& rec) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    out_ << buf;
  };
  out_ << rec.iteration;
  const LossBreakdown& b = rec.loss;
  num(b.reward_loss);
  num(b.shape_loss);
  num(b.gate);
  num(b.total);
  num(b.r_student);
  num(b.r_teacher);
  num(rec.grad_norm);
  num(rec.wall_ms);
  num(rec.smooth_student);
  num(rec.smooth_teacher);
  out_ << (rec.failed ? ",failed" : ",ok");
  for (std::size_t m = 0; m < horizons_; ++m) num(m < b.per_horizon.size() ? b.per_horizon[m] : 0.0);
  out_ << "\n";
}

CheckpointHeader adapter_header(const ModelSpec& spec, const Provenance& prov) {
  CheckpointHeader h = backbone_header(spec, prov);
  h.kind = "adapter";
  return h;
}

CheckpointHeader backbone_header(const ModelSpec& spec, const Provenance& prov) {
  CheckpointHeader h;
  h.kind = "backbone";
  h.dim = spec.dim;
  h.conditions = spec.conditions;
  h.hidden = spec.hidden;
  h.adapter_rank = spec.adapter_rank;
  h.config_hash = prov.config_hash;
  h.seed = prov.seed;
  return h;
}

RunResult train_run(TrainState state, const TrainConfig& cfg, const Provenance& prov,
                    const std::filesystem::path& out_dir) {
  const bool write = !out_dir.empty();
  std::ofstream metrics;
  std::optional<MetricsWriter> writer;
  const CheckpointHeader header = adapter_header(state.spec, prov);
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    const auto path = out_dir / "metrics.csv";
    metrics.open(path, std::ios::trunc);
    if (!metrics) throw IoError("cannot open " + path.string());
    writer.emplace(metrics, prov, cfg.horizons.size());
    save_checkpoint(out_dir / "adapter_init.ckpt", header, state.student);
  }

  RunResult result;
  result.records.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    result.records.push_back(train_iteration(state, cfg));
    if (writer) writer->write(result.records.back());
    if (write && cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0 && it + 1 < cfg.iterations) {
      save_checkpoint(out_dir / ("adapter_iter" + std::to_string(it + 1) + ".ckpt"), header, state.student);
    }
  }
  if (write) {
    metrics.flush();
    if (!metrics) throw IoError("failed writing " + (out_dir / "metrics.csv").string());
    if (cfg.iterations > 0) {
      save_checkpoint(out_dir / "adapter_final.ckpt", header, state.student);
      save_checkpoint(out_dir / "teacher_final.ckpt", header, state.teacher);
    }
  }
  result.student = std::move(state.student);
  result.teacher = std::move(state.teacher);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalSamples generate_samples(const ModelSpec& spec, const ParamSet& backbone,
                             const AdapterState* adapter, const ToyTask& task, const Decoder& decoder,
                             std::size_t steps, double shift, std::size_t n, std::uint64_t eval_seed) {
  if (steps < 1) throw ConfigError("evaluation steps must be >= 1");
  if (task.conditions != spec.conditions) throw ConfigError("task and model disagree on the condition count");
  const Rng root(eval_seed, "eval");
  Rng cond_rng = root.derive("cond");
  Rng x1_rng = root.derive("x1");
  Rng noise = root.derive("noise", steps);
  EvalSamples out;
  out.conditions = sample_conditions(task, n, cond_rng);
  const Tensor x1 = sample_normal(n, spec.dim, x1_rng);
  BoundModel model{&spec, backbone.bind(false), {}};
  if (adapter) model = fold_adapter({&spec, model.backbone, adapter->bind(false)});
  const Trajectory traj = rollout(model, build_schedule(steps, shift), x1, out.conditions, noise, steps + 1);
  out.y = decoder.decode(traj.final);
  return out;
}

EvalSummary summarize_samples(const RewardModel& rm, const EvalSamples& s, std::size_t steps) {
  EvalSummary sum;
  sum.steps = steps;
  sum.samples = s.conditions.size();
  const std::size_t k = rm.conditions();
  sum.per_condition_reward.assign(k, 0.0);
  sum.per_condition_count.assign(k, 0);
  const std::size_t d = rm.dim;
  auto y = s.y.values();
  double total = 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < sum.samples; ++r) {
    const auto row = y.subspan(r * d, d);
    const std::size_t c = s.conditions[r];
    const double v = reward_value(rm, row, c);
    total += v;
    sum.per_condition_reward[c] += v;
    sum.per_condition_count[c] += 1;
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      double dist = 0.0;
      const auto mu = rm.center(j);
      for (std::size_t q = 0; q < d; ++q) dist += (row[q] - mu[q]) * (row[q] - mu[q]);
      if (dist < best) {
        best = dist;
        nearest = j;
      }
    }
    if (nearest == c) ++correct;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (sum.per_condition_count[c] > 0) sum.per_condition_reward[c] /= static_cast<double>(sum.per_condition_count[c]);
  }
  if (sum.samples > 0) {
    sum.mean_reward = total / static_cast<double>(sum.samples);
    sum.mode_accuracy = static_cast<double>(correct) / static_cast<double>(sum.samples);
  }
  return sum;
}

EvalSummary evaluate(const ModelSpec& spec, const ParamSet& backbone, const AdapterState* adapter,
                     const ToyTask& task, const RewardModel& rm, const Decoder& decoder,
                     std::size_t steps, double shift, std::size_t n, std::uint64_t eval_seed) {
  return summarize_samples(rm, generate_samples(spec, backbone, adapter, task, decoder, steps, shift, n, eval_seed),
                           steps);
}

}  // namespace rats
