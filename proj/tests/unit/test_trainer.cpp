// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <set>

#include "rats/error.hpp"
#include "rats/grad_check.hpp"
#include "rats/pretrain.hpp"
#include "rats/trainer.hpp"
#include "support.hpp"

using namespace rats;

namespace {

struct Setup {
  ModelSpec spec = testing::mini_spec();
  ToyTask task = testing::mini_task();
  TrainConfig cfg = testing::mini_train(spec, task);
  ParamSet backbone = testing::mini_backbone(spec);

  TrainState state() const { return make_train_state(spec, backbone, cfg); }
};

bool same_values(const ParamSet& a, const ParamSet& b) {
  return a.size() == b.size() && std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("ablation modes map to coefficient overrides") {
  TrainConfig c;
  c.alpha = 2.0;
  c.ablation = Ablation::RewardOnly;
  CHECK(c.effective_alpha() == 0.0);
  CHECK_FALSE(c.shaping_enabled());
  c.ablation = Ablation::DistillOnly;
  CHECK(c.reward_weight() == 0.0);
  CHECK(c.gate_config().override_value == 1.0);
  c.ablation = Ablation::NoGate;
  CHECK(c.gate_config().override_value == 1.0);
  CHECK(c.reward_weight() == 1.0);
  c.ablation = Ablation::Full;
  CHECK_FALSE(c.gate_config().override_value.has_value());
  for (const char* name : {"full", "reward-only", "distill-only", "no-gate"}) CHECK(to_string(parse_ablation(name)) == name);
  CHECK_THROWS_AS(parse_ablation("fast"), ConfigError);
}

TEST_CASE("config validation") {
  Setup s;
  s.cfg.teacher_steps = 2;
  CHECK_THROWS_AS(s.state(), ConfigError);
  Setup t;
  t.cfg.reward.centers.resize(6);
  CHECK_THROWS_AS(t.state(), ConfigError);
  Setup u;
  ModelSpec other = u.spec;
  other.hidden = {4};
  CHECK_THROWS_AS(make_train_state(other, u.backbone, u.cfg), ConfigError);
}

TEST_CASE("one iteration visits every phase in order") {
  Setup s;
  TrainState st = s.state();
  std::vector<Phase> seen;
  train_iteration(st, s.cfg, [&](Phase p) { seen.push_back(p); });
  std::vector<Phase> expected{Phase::SampleInputs, Phase::StudentRollout, Phase::TeacherRollout,
                              Phase::StudentReward, Phase::HorizonLoopBegin};
  for (int m = 0; m < 3; ++m) {
    expected.push_back(Phase::MatchHorizon);
    expected.push_back(Phase::HorizonDivergence);
  }
  for (Phase p : {Phase::HorizonLoopEnd, Phase::ShapingAggregate, Phase::TeacherReward, Phase::Gate,
                  Phase::TotalLoss, Phase::BackwardUpdate, Phase::EmaUpdate})
    expected.push_back(p);
  CHECK(seen == expected);
  std::set<std::string> names;
  for (Phase p : expected) names.insert(to_string(p));
  CHECK(names.size() == 14);
}

TEST_CASE("gradients reach student leaves only") {
  Setup s;
  TrainState st = s.state();
  st.student = testing::perturbed_adapter(s.spec, 2);
  st.teacher = testing::perturbed_adapter(s.spec, 3);
  const IterationProbe p = probe_iteration(st, s.cfg);
  const GradientMap g = backward(p.total.total);
  std::set<LeafId> student_ids;
  for (const Tensor& t : p.student_leaves) student_ids.insert(t.id());
  for (const auto& [id, grad] : g) CHECK(student_ids.count(id) == 1);
  for (const Tensor& t : p.teacher_tensors) {
    CHECK_FALSE(t.requires_grad());
    CHECK_FALSE(g.contains(t.id()));
  }
  CHECK(g.size() == student_ids.size());
}

TEST_CASE("analytic gradient matches finite differences of the replayed objective") {
  Setup s;
  TrainState st = s.state();
  st.student = testing::perturbed_adapter(s.spec, 4);
  st.teacher = testing::perturbed_adapter(s.spec, 5);
  const IterationProbe p = probe_iteration(st, s.cfg);
  // Replay reproduces the recorded objective.
  CHECK(replay_total(st, s.cfg, p, p.student_leaves).item() ==
        Catch::Approx(p.total.total.item()).epsilon(1e-14));
  const auto r = grad_check([&](const std::vector<Tensor>& a) { return replay_total(st, s.cfg, p, a); },
                            p.student_leaves, 1e-4, 120, 1);
  CHECK(r.finite);
  CHECK(r.max_rel_error <= 1e-4);
}

TEST_CASE("zero-init adapter with shared noise gives equal rewards") {
  Setup s;
  s.cfg.teacher_steps = s.cfg.student_steps;
  s.cfg.share_noise_streams = true;
  TrainState st = s.state();
  const IterationRecord rec = train_iteration(st, s.cfg);
  CHECK(rec.loss.r_student == rec.loss.r_teacher);
  CHECK(rec.loss.gate == 0.5);
  for (double l : rec.loss.per_horizon) CHECK(l == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("one iteration then the EMA closed form") {
  Setup s;
  s.cfg.gamma = 0.9;
  TrainState st = s.state();
  st.teacher = testing::perturbed_adapter(s.spec, 9);
  const AdapterState teacher_before = st.teacher;
  const AdapterState student_before = st.student;
  train_iteration(st, s.cfg);
  CHECK_FALSE(same_values(st.student, student_before));
  for (std::size_t i = 0; i < st.teacher.size(); ++i) {
    const double expected = 0.9 * teacher_before.values()[i] + 0.1 * st.student.values()[i];
    CHECK(std::abs(st.teacher.values()[i] - expected) <= 1e-15);
  }
}

TEST_CASE("ablation records") {
  SECTION("reward-only has no shaping contribution") {
    Setup s;
    s.cfg.ablation = Ablation::RewardOnly;
    TrainState st = s.state();
    CHECK(st.window_start == s.cfg.student_steps);
    for (int k = 0; k < 3; ++k) {
      const auto rec = train_iteration(st, s.cfg);
      CHECK(rec.loss.shape_loss == 0.0);
      CHECK(rec.loss.alpha == 0.0);
      CHECK(rec.loss.total == rec.loss.reward_loss);
    }
  }
  SECTION("no-gate logs a gate of exactly 1") {
    Setup s;
    s.cfg.ablation = Ablation::NoGate;
    TrainState st = s.state();
    for (int k = 0; k < 3; ++k) CHECK(train_iteration(st, s.cfg).loss.gate == 1.0);
  }
  SECTION("distill-only drops the reward term") {
    Setup s;
    s.cfg.ablation = Ablation::DistillOnly;
    TrainState st = s.state();
    st.student = testing::perturbed_adapter(s.spec, 3);
    const auto rec = train_iteration(st, s.cfg);
    CHECK(rec.loss.gate == 1.0);
    CHECK(rec.loss.reward_weight == 0.0);
    CHECK(rec.loss.total == Catch::Approx(s.cfg.alpha * rec.loss.shape_loss).epsilon(1e-15));
  }
}

TEST_CASE("reward-only equals a full run with alpha zero") {
  Setup a, b;
  a.cfg.ablation = Ablation::RewardOnly;
  b.cfg.alpha = 0.0;
  TrainState sa = a.state(), sb = b.state();
  for (int k = 0; k < 5; ++k) {
    train_iteration(sa, a.cfg);
    train_iteration(sb, b.cfg);
    REQUIRE(same_values(sa.student, sb.student));
    REQUIRE(same_values(sa.teacher, sb.teacher));
  }
  CHECK(sa.adam == sb.adam);
}

TEST_CASE("logged gate matches the sigmoid of logged rewards") {
  Setup s;
  s.cfg.iterations = 8;
  const RunResult r = train_run(s.state(), s.cfg, {"h", 1});
  for (const auto& rec : r.records) {
    const double z = (rec.loss.r_teacher - rec.loss.r_student) / s.cfg.gate_temperature;
    CHECK(std::abs(rec.loss.gate - 1.0 / (1.0 + std::exp(-z))) <= 1e-12);
  }
}

TEST_CASE("failed iterations roll back") {
  Setup s;
  TrainState st = s.state();
  train_iteration(st, s.cfg);
  train_iteration(st, s.cfg);
  const AdapterState student = st.student, teacher = st.teacher;
  const AdamState adam = st.adam;
  const auto smooth = st.smooth_student;

  TrainConfig broken = s.cfg;
  broken.reward.kind = RewardKind::ModeTarget;
  broken.reward.beta = 1e308;  // reward overflows to -inf
  const IterationRecord rec = train_iteration(st, broken);
  CHECK(rec.failed);
  CHECK_FALSE(rec.failure.empty());
  CHECK(same_values(st.student, student));
  CHECK(same_values(st.teacher, teacher));
  CHECK(st.adam == adam);
  CHECK(st.smooth_student == smooth);
  // Training continues afterwards.
  CHECK_FALSE(train_iteration(st, s.cfg).failed);
}

TEST_CASE("run artifacts") {
  Setup s;
  testing::TempDir dir("train_run");

  SECTION("zero iterations write only the initial checkpoint") {
    s.cfg.iterations = 0;
    const auto out = dir.path() / "empty";
    train_run(s.state(), s.cfg, {"abc", 3}, out);
    CHECK(std::filesystem::exists(out / "adapter_init.ckpt"));
    CHECK_FALSE(std::filesystem::exists(out / "adapter_final.ckpt"));
    const std::string csv = testing::slurp(out / "metrics.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  }
  SECTION("metrics layout, checkpoints and determinism") {
    s.cfg.iterations = 6;
    s.cfg.checkpoint_every = 2;
    train_run(s.state(), s.cfg, {"abc", 3}, dir.path() / "a");
    train_run(s.state(), s.cfg, {"abc", 3}, dir.path() / "b");
    const std::string a = testing::slurp(dir.path() / "a" / "metrics.csv");
    CHECK(a == testing::slurp(dir.path() / "b" / "metrics.csv"));
    CHECK(a.rfind("# config_hash=abc seed=3\n"
                  "iteration,reward_loss,shape_loss,gate,total,R_S,R_T,grad_norm,wall_ms,R_S_smooth,R_T_smooth,"
                  "status,L_1,L_2,L_3\n",
                  0) == 0);
    CHECK(std::count(a.begin(), a.end(), '\n') == 8);
    for (const char* f : {"adapter_init.ckpt", "adapter_iter2.ckpt", "adapter_iter4.ckpt", "adapter_final.ckpt",
                          "teacher_final.ckpt"})
      CHECK(std::filesystem::exists(dir.path() / "a" / f));
    const Checkpoint ck = load_checkpoint(dir.path() / "a" / "adapter_final.ckpt");
    CHECK(ck.header.kind == "adapter");
    CHECK(ck.header.config_hash == "abc");
  }
}

TEST_CASE("smoothed curves") {
  Setup s;
  s.cfg.iterations = 5;
  s.cfg.smoothing = 0.5;
  const RunResult r = train_run(s.state(), s.cfg, {"h", 1});
  double ss = r.records[0].loss.r_student;
  CHECK(r.records[0].smooth_student == ss);
  for (std::size_t k = 1; k < r.records.size(); ++k) {
    ss = 0.5 * ss + 0.5 * r.records[k].loss.r_student;
    CHECK(r.records[k].smooth_student == Catch::Approx(ss).epsilon(1e-15));
  }
}

TEST_CASE("training raises the smoothed student reward") {
  Setup s;
  PretrainConfig pc;
  pc.iterations = 400;
  pc.batch = 128;
  s.backbone = pretrain_backbone(s.spec, s.task, pc, 1).backbone;
  s.cfg.batch = 32;
  s.cfg.iterations = 150;
  s.cfg.teacher_steps = 20;
  const RunResult r = train_run(s.state(), s.cfg, {"h", 1});
  CHECK(r.records.back().smooth_student > r.records.front().loss.r_student);
}

TEST_CASE("evaluation") {
  Setup s;
  RewardModel rm = s.cfg.reward;

  SECTION("a generator that outputs the centers is perfect") {
    EvalSamples perfect;
    perfect.conditions = {0, 1, 1, 0};
    std::vector<double> y;
    for (std::size_t c : perfect.conditions) {
      auto mu = rm.center(c);
      y.insert(y.end(), mu.begin(), mu.end());
    }
    perfect.y = Tensor::constant({4, 2}, y);
    auto sum = summarize_samples(rm, perfect, 3);
    CHECK(sum.mode_accuracy == 1.0);
    CHECK(sum.mean_reward == Catch::Approx(rm.kernel_weight));
    rm.kind = RewardKind::ModeTarget;
    sum = summarize_samples(rm, perfect, 3);
    CHECK(sum.mean_reward == 0.0);
    CHECK(sum.per_condition_count == std::vector<std::size_t>{2, 2});
  }
  SECTION("zero-init adapter evaluates like the backbone alone") {
    Rng rng(1, "adapter-init");
    const AdapterState ad = init_adapter(s.spec, rng);
    const auto a = evaluate(s.spec, s.backbone, &ad, s.task, rm, s.cfg.decoder, 3, 3.0, 64, 5);
    const auto b = evaluate(s.spec, s.backbone, nullptr, s.task, rm, s.cfg.decoder, 3, 3.0, 64, 5);
    CHECK(a.mean_reward == b.mean_reward);
    CHECK(a.mode_accuracy == b.mode_accuracy);
    CHECK(a.per_condition_reward == b.per_condition_reward);
  }
  SECTION("deterministic given the eval seed") {
    const auto a = generate_samples(s.spec, s.backbone, nullptr, s.task, s.cfg.decoder, 4, 3.0, 32, 8);
    const auto b = generate_samples(s.spec, s.backbone, nullptr, s.task, s.cfg.decoder, 4, 3.0, 32, 8);
    CHECK(std::equal(a.y.values().begin(), a.y.values().end(), b.y.values().begin()));
    CHECK_THROWS_AS(generate_samples(s.spec, s.backbone, nullptr, s.task, s.cfg.decoder, 0, 3.0, 32, 8), ConfigError);
  }
}
