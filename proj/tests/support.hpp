// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rats/config.hpp"
#include "rats/pretrain.hpp"
#include "rats/tensor.hpp"
#include "rats/trainer.hpp"

namespace rats::testing {

// Central differences of a scalar function of a flat vector. Kept separate
// from the library's grad_check so that tests have an independent oracle.
inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> x, double eps = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + eps;
    const double up = f(x);
    x[i] = keep - eps;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

inline double max_rel(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::max({std::abs(a[i]), std::abs(b[i]), 1e-8});
    worst = std::max(worst, std::abs(a[i] - b[i]) / den);
  }
  return worst;
}

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

inline std::vector<double> to_vec(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

// Small model and training setup that runs in milliseconds.
inline ModelSpec mini_spec() {
  ModelSpec s;
  s.dim = 2;
  s.conditions = 2;
  s.hidden = {8, 8};
  return s;
}

inline ToyTask mini_task() {
  ToyTask t;
  t.conditions = 2;
  t.data_seed = 7;
  return t;
}

inline TrainConfig mini_train(const ModelSpec& spec, const ToyTask& task) {
  TrainConfig c;
  c.student_steps = 3;
  c.teacher_steps = 10;
  c.batch = 4;
  c.iterations = 5;
  c.reward.centers = task.centers();
  c.reward.dim = task.dim;
  c.decoder = Decoder::identity(spec.dim);
  c.seed = 3;
  return c;
}

// A backbone with a little structure, without paying for pretraining.
inline ParamSet mini_backbone(const ModelSpec& spec, std::uint64_t seed = 11) {
  Rng rng(seed, "backbone-init");
  return init_backbone(spec, rng);
}

// Adapter with nonzero B so that every adapter coordinate influences outputs.
inline AdapterState perturbed_adapter(const ModelSpec& spec, std::uint64_t seed, double scale = 0.1) {
  Rng rng(seed, "adapter-init");
  AdapterState a = init_adapter(spec, rng);
  Rng noise(seed, "perturb");
  for (double& v : a.values()) v += scale * noise.normal();
  return a;
}

inline RunConfig mini_run_config() {
  RunConfig cfg;
  cfg.seed = 2;
  cfg.task = mini_task();
  cfg.model.hidden = {8, 8};
  cfg.pretrain.iterations = 30;
  cfg.pretrain.batch = 32;
  cfg.train.student_steps = 3;
  cfg.train.teacher_steps = 10;
  cfg.train.batch = 8;
  cfg.train.iterations = 4;
  cfg.eval_samples = 32;
  cfg.eval_steps = {3, 10};
  cfg.finalize();
  return cfg;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rats_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace rats::testing
