// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// One training iteration of reward-aware trajectory shaping, the run loop,
// and sampling-based evaluation.
//
// An iteration draws conditions and initial noise, rolls out the student
// (tracked inside its gradient window) and the EMA teacher (untracked) from
// the same x1, scores both, matches horizons by prediction sigma, and
// updates the student adapter on
//   reward_weight * L_reward + alpha * g * L_shape,
// with g the detached reward gate. The teacher adapter then moves toward the
// student by EMA. The backbone is shared and never updated here.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rats/objective.hpp"
#include "rats/optimizer.hpp"
#include "rats/params.hpp"
#include "rats/reward.hpp"
#include "rats/sampler.hpp"
#include "rats/schedule.hpp"
#include "rats/task.hpp"
#include "rats/velocity_field.hpp"

namespace rats {

enum class Ablation { Full, RewardOnly, DistillOnly, NoGate };

std::string to_string(Ablation mode);
Ablation parse_ablation(const std::string& name);

struct TrainConfig {
  std::size_t student_steps = 3;
  std::size_t teacher_steps = 50;
  double shift = 3.0;
  std::size_t batch = 64;
  std::size_t iterations = 400;
  double alpha = 2.0;
  double gamma = 0.999;
  double gate_temperature = 0.02;
  HorizonSet horizons = default_horizons();
  DivergenceWeights divergence;
  RewardModel reward;
  Decoder decoder = Decoder::identity(2);
  RewardLossSpec reward_loss;
  AdamSpec optimizer;
  std::uint64_t seed = 1;
  Ablation ablation = Ablation::Full;
  /// Exponential smoothing factor for the reported R_S / R_T curves.
  double smoothing = 0.9;
  /// Test mode: the teacher draws its per-step noise from the student stream.
  bool share_noise_streams = false;
  bool record_wall_time = false;
  /// Periodic adapter checkpoints every n iterations (0 disables).
  std::size_t checkpoint_every = 0;

  void validate() const;

  double effective_alpha() const { return ablation == Ablation::RewardOnly ? 0.0 : alpha; }
  double reward_weight() const { return ablation == Ablation::DistillOnly ? 0.0 : 1.0; }
  bool shaping_enabled() const { return effective_alpha() > 0.0; }
  GateConfig gate_config() const;
};

struct TrainState {
  ModelSpec spec;
  ParamSet backbone;
  std::vector<Tensor> backbone_tensors;  // constants, bound once
  AdapterState student;
  AdapterState teacher;
  AdamState adam;
  std::size_t iteration = 0;
  std::optional<double> smooth_student;
  std::optional<double> smooth_teacher;

  NoiseSchedule student_schedule;
  NoiseSchedule teacher_schedule;
  std::vector<HorizonPair> pairs;
  std::size_t window_start = 0;
};

/// Builds the state around a pretrained backbone. The adapter is
/// initialized from (cfg.seed, "adapter-init"); the teacher is its clone.
TrainState make_train_state(const ModelSpec& spec, ParamSet backbone, const TrainConfig& cfg);

enum class Phase {
  SampleInputs,
  StudentRollout,
  TeacherRollout,
  StudentReward,
  HorizonLoopBegin,
  MatchHorizon,
  HorizonDivergence,
  HorizonLoopEnd,
  ShapingAggregate,
  TeacherReward,
  Gate,
  TotalLoss,
  BackwardUpdate,
  EmaUpdate,
};

std::string to_string(Phase phase);

using TraceFn = std::function<void(Phase)>;

/// Everything computed before the parameter update. Keeps the graph alive so
/// tests can inspect gradients and replay the objective.
struct IterationProbe {
  std::size_t iteration = 0;
  std::vector<std::size_t> conditions;
  Tensor x1;
  std::vector<Tensor> student_leaves;
  std::vector<Tensor> teacher_tensors;
  Trajectory student;
  Trajectory teacher;
  Tensor reward_loss;
  Tensor shape_loss;
  TotalLoss total;
};

IterationProbe probe_iteration(const TrainState& state, const TrainConfig& cfg,
                               const TraceFn& trace = {});

/// Recomputes the total loss of `probe` under the given adapter tensors,
/// holding the gate, the teacher trajectory and the detached window input
/// fixed. Used for finite-difference checks.
Tensor replay_total(const TrainState& state, const TrainConfig& cfg, const IterationProbe& probe,
                    const std::vector<Tensor>& adapter);

struct IterationRecord {
  std::size_t iteration = 0;
  LossBreakdown loss;
  double grad_norm = 0.0;
  double wall_ms = 0.0;
  double smooth_student = 0.0;
  double smooth_teacher = 0.0;
  bool failed = false;
  std::string failure;
};

/// Runs one iteration and commits the update. On a numeric failure the
/// adapter, teacher and optimizer state are left untouched and the record is
/// marked failed.
IterationRecord train_iteration(TrainState& state, const TrainConfig& cfg, const TraceFn& trace = {});

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
};

class MetricsWriter {
 public:
  MetricsWriter(std::ostream& out, const Provenance& prov, std::size_t horizons);
  void write(const IterationRecord& rec);

 private:
  std::ostream& out_;
  std::size_t horizons_;
};

struct RunResult {
  std::vector<IterationRecord> records;
  AdapterState student;
  AdapterState teacher;
};

/// Runs cfg.iterations iterations. When `out_dir` is non-empty writes
/// metrics.csv, adapter_init.ckpt, periodic adapter_iter<k>.ckpt, and after
/// at least one iteration adapter_final.ckpt and teacher_final.ckpt.
RunResult train_run(TrainState state, const TrainConfig& cfg, const Provenance& prov,
                    const std::filesystem::path& out_dir = {});

CheckpointHeader adapter_header(const ModelSpec& spec, const Provenance& prov);
CheckpointHeader backbone_header(const ModelSpec& spec, const Provenance& prov);

struct EvalSummary {
  std::size_t steps = 0;
  std::size_t samples = 0;
  double mean_reward = 0.0;
  std::vector<double> per_condition_reward;
  std::vector<std::size_t> per_condition_count;
  double mode_accuracy = 0.0;
};

struct EvalSamples {
  Tensor y;  // decoded samples
  std::vector<std::size_t> conditions;
};

/// Draws n samples with an untracked rollout. x1, conditions and per-step
/// noise come from (eval_seed, "eval"), so different step counts and
/// adapters see the same initial noise.
EvalSamples generate_samples(const ModelSpec& spec, const ParamSet& backbone,
                             const AdapterState* adapter, const ToyTask& task, const Decoder& decoder,
                             std::size_t steps, double shift, std::size_t n, std::uint64_t eval_seed);

/// Mean reward overall and per condition; a sample counts as correctly
/// assigned when its nearest reward center is its own condition's.
EvalSummary summarize_samples(const RewardModel& rm, const EvalSamples& s, std::size_t steps);

EvalSummary evaluate(const ModelSpec& spec, const ParamSet& backbone, const AdapterState* adapter,
                     const ToyTask& task, const RewardModel& rm, const Decoder& decoder,
                     std::size_t steps, double shift, std::size_t n, std::uint64_t eval_seed);

}  // namespace rats
