// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rats/error.hpp"
#include "rats/rng.hpp"

namespace rats {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Fields {
 public:
  Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  template <class T>
  T required(const std::string& key) {
    if (!obj_.contains(key)) fail(key, "is required");
    return get<T>(key);
  }

  template <class T>
  T optional(const std::string& key, T fallback) {
    if (!obj_.contains(key)) return fallback;
    return get<T>(key);
  }

  Fields object(const std::string& key) {
    seen_.insert(key);
    if (!obj_.contains(key)) return Fields(empty(), child(key));
    return Fields(obj_.at(key), child(key));
  }

  Fields required_object(const std::string& key) {
    if (!obj_.contains(key)) fail(key, "is required");
    return object(key);
  }

  const json& raw(const std::string& key) {
    if (!obj_.contains(key)) fail(key, "is required");
    seen_.insert(key);
    return obj_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : obj_.items()) {
      if (!seen_.count(k)) fail(k, "is not a recognized field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("field '" + child(key) + "' " + what);
  }

  std::string child(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }

  template <class T>
  T get(const std::string& key) {
    seen_.insert(key);
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(key, "must be a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(key, "must be true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(key, "must be a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_unsigned()) fail(key, "must be a non-negative integer");
      }
      return v.get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type");
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(Fields& f, const std::string& key, const json& v) {
  if (!v.is_array()) f.fail(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) f.fail(key, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::size_t> size_list(Fields& f, const std::string& key, const json& v) {
  if (!v.is_array()) f.fail(key, "must be an array of positive integers");
  std::vector<std::size_t> out;
  for (const auto& x : v) {
    if (!x.is_number_unsigned() || x.get<std::size_t>() == 0) f.fail(key, "must be an array of positive integers");
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

template <class F>
void guarded(const std::string& path, F fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("field '", 0) == 0) throw;
    throw ConfigError("field '" + path + "' " + msg);
  }
}

RunConfig from_json(const json& root) {
  RunConfig cfg;
  Fields top(root, "");
  cfg.seed = top.required<std::uint64_t>("seed");
  cfg.output_dir = top.optional<std::string>("output_dir", cfg.output_dir);

  {
    Fields t = top.object("task");
    ToyTask& k = cfg.task;
    k.conditions = t.optional<std::size_t>("conditions", k.conditions);
    k.dim = t.optional<std::size_t>("dim", k.dim);
    k.radius = t.optional<double>("radius", k.radius);
    k.preferred_weight = t.optional<double>("preferred_weight", k.preferred_weight);
    k.muted_scale = t.optional<double>("muted_scale", k.muted_scale);
    k.component_std = t.optional<double>("component_std", k.component_std);
    k.data_seed = t.optional<std::uint64_t>("data_seed", k.data_seed);
    t.finish();
    guarded("task", [&] { k.validate(); });
  }
  {
    Fields m = top.object("model");
    if (m.has("hidden")) cfg.model.hidden = size_list(m, "hidden", m.raw("hidden"));
    cfg.model.adapter_rank = m.optional<std::size_t>("adapter_rank", cfg.model.adapter_rank);
    cfg.model.sigma_frequencies = m.optional<std::size_t>("sigma_frequencies", cfg.model.sigma_frequencies);
    m.finish();
  }
  {
    Fields p = top.object("pretrain");
    cfg.pretrain.iterations = p.optional<std::size_t>("iterations", cfg.pretrain.iterations);
    cfg.pretrain.batch = p.optional<std::size_t>("batch", cfg.pretrain.batch);
    cfg.pretrain.learning_rate = p.optional<double>("learning_rate", cfg.pretrain.learning_rate);
    p.finish();
    guarded("pretrain", [&] { cfg.pretrain.validate(); });
  }
  {
    Fields r = top.object("reward");
    RewardModel& rm = cfg.train.reward;
    const std::string kind = r.optional<std::string>("kind", to_string(rm.kind));
    if (kind == "mode-target") {
      rm.kind = RewardKind::ModeTarget;
    } else if (kind == "composite") {
      rm.kind = RewardKind::Composite;
    } else {
      r.fail("kind", "must be 'mode-target' or 'composite'");
    }
    rm.beta = r.optional<double>("beta", rm.beta);
    rm.kernel_weight = r.optional<double>("kernel_weight", rm.kernel_weight);
    rm.bandwidth = r.optional<double>("bandwidth", rm.bandwidth);
    rm.quadratic_weight = r.optional<double>("quadratic_weight", rm.quadratic_weight);
    const std::string loss = r.optional<std::string>("loss", to_string(cfg.train.reward_loss.mode));
    if (loss == "negate") {
      cfg.train.reward_loss.mode = RewardLossMode::Negate;
    } else if (loss == "target-gap") {
      cfg.train.reward_loss.mode = RewardLossMode::TargetGap;
    } else {
      r.fail("loss", "must be 'negate' or 'target-gap'");
    }
    cfg.train.reward_loss.target = r.optional<double>("target", cfg.train.reward_loss.target);
    if (r.has("decoder")) {
      Fields d = r.object("decoder");
      const std::string dk = d.required<std::string>("kind");
      if (dk == "identity") {
        cfg.decoder.identity = true;
      } else if (dk == "linear") {
        cfg.decoder.identity = false;
        const json& m = d.raw("matrix");
        if (!m.is_array() || m.empty()) d.fail("matrix", "must be a non-empty array of rows");
        for (const auto& row : m) cfg.decoder.matrix.push_back(number_list(d, "matrix", row));
      } else {
        d.fail("kind", "must be 'identity' or 'linear'");
      }
      d.finish();
    }
    r.finish();
  }
  {
    Fields s = top.required_object("rats");
    TrainConfig& t = cfg.train;
    t.student_steps = s.required<std::size_t>("student_steps");
    t.teacher_steps = s.required<std::size_t>("teacher_steps");
    t.shift = s.required<double>("shift");
    t.alpha = s.required<double>("alpha");
    t.gamma = s.required<double>("gamma");
    t.gate_temperature = s.required<double>("gate_temperature");
    {
      Fields h = s.required_object("horizons");
      auto targets = number_list(h, "targets", h.raw("targets"));
      auto weights = number_list(h, "weights", h.raw("weights"));
      h.finish();
      guarded("rats.horizons", [&] { t.horizons = make_horizons(std::move(targets), std::move(weights)); });
    }
    {
      Fields d = s.object("divergence");
      t.divergence.cosine = d.optional<double>("cosine", t.divergence.cosine);
      t.divergence.l2 = d.optional<double>("l2", t.divergence.l2);
      d.finish();
    }
    t.batch = s.optional<std::size_t>("batch", t.batch);
    t.iterations = s.optional<std::size_t>("iterations", t.iterations);
    t.ablation = parse_ablation(s.optional<std::string>("ablation", to_string(t.ablation)));
    t.smoothing = s.optional<double>("smoothing", t.smoothing);
    t.share_noise_streams = s.optional<bool>("share_noise_streams", t.share_noise_streams);
    t.record_wall_time = s.optional<bool>("record_wall_time", t.record_wall_time);
    t.checkpoint_every = s.optional<std::size_t>("checkpoint_every", t.checkpoint_every);
    {
      Fields o = s.object("optimizer");
      t.optimizer.learning_rate = o.optional<double>("learning_rate", t.optimizer.learning_rate);
      t.optimizer.beta1 = o.optional<double>("beta1", t.optimizer.beta1);
      t.optimizer.beta2 = o.optional<double>("beta2", t.optimizer.beta2);
      t.optimizer.epsilon = o.optional<double>("epsilon", t.optimizer.epsilon);
      t.optimizer.clip_norm = o.optional<double>("clip_norm", t.optimizer.clip_norm);
      o.finish();
    }
    s.finish();
  }
  {
    Fields e = top.object("eval");
    cfg.eval_samples = e.optional<std::size_t>("samples", cfg.eval_samples);
    cfg.eval_seed = e.optional<std::uint64_t>("seed", cfg.eval_seed);
    if (e.has("steps")) cfg.eval_steps = size_list(e, "steps", e.raw("steps"));
    e.finish();
  }
  top.finish();
  guarded("rats", [&] { cfg.finalize(); });
  return cfg;
}

}  // namespace

Decoder DecoderSpec::build(std::size_t in_dim) const {
  if (identity) return Decoder::identity(in_dim);
  std::vector<double> flat;
  for (const auto& row : matrix) {
    if (row.size() != in_dim) {
      throw ConfigError("decoder matrix rows must have " + std::to_string(in_dim) + " entries");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Decoder::linear(matrix.size(), in_dim, std::move(flat));
}

void RunConfig::finalize() {
  task.validate();
  model.dim = task.dim;
  model.conditions = task.conditions;
  model.validate();
  train.seed = seed;
  train.decoder = decoder.build(task.dim);
  const auto centers = task.centers();
  const Tensor decoded = train.decoder.decode(Tensor::constant({task.conditions, task.dim}, centers));
  train.reward.dim = train.decoder.out_dim();
  train.reward.centers.assign(decoded.values().begin(), decoded.values().end());
  train.validate();
  if (eval_steps.empty()) throw ConfigError("eval.steps must not be empty");
}

RunConfig parse_config(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    const auto pos = what.find("; ");
    if (pos != std::string::npos) what = what.substr(pos + 2);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
  try {
    return from_json(root);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

json to_json(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  json decoder = cfg.decoder.identity ? json{{"kind", "identity"}}
                                      : json{{"kind", "linear"}, {"matrix", cfg.decoder.matrix}};
  return json{
      {"seed", cfg.seed},
      {"output_dir", cfg.output_dir},
      {"task",
       {{"conditions", cfg.task.conditions},
        {"dim", cfg.task.dim},
        {"radius", cfg.task.radius},
        {"preferred_weight", cfg.task.preferred_weight},
        {"muted_scale", cfg.task.muted_scale},
        {"component_std", cfg.task.component_std},
        {"data_seed", cfg.task.data_seed}}},
      {"model",
       {{"hidden", cfg.model.hidden},
        {"adapter_rank", cfg.model.adapter_rank},
        {"sigma_frequencies", cfg.model.sigma_frequencies}}},
      {"pretrain",
       {{"iterations", cfg.pretrain.iterations},
        {"batch", cfg.pretrain.batch},
        {"learning_rate", cfg.pretrain.learning_rate}}},
      {"reward",
       {{"kind", to_string(t.reward.kind)},
        {"beta", t.reward.beta},
        {"kernel_weight", t.reward.kernel_weight},
        {"bandwidth", t.reward.bandwidth},
        {"quadratic_weight", t.reward.quadratic_weight},
        {"loss", to_string(t.reward_loss.mode)},
        {"target", t.reward_loss.target},
        {"decoder", decoder}}},
      {"rats",
       {{"student_steps", t.student_steps},
        {"teacher_steps", t.teacher_steps},
        {"shift", t.shift},
        {"alpha", t.alpha},
        {"gamma", t.gamma},
        {"gate_temperature", t.gate_temperature},
        {"horizons", {{"targets", t.horizons.targets}, {"weights", t.horizons.weights}}},
        {"divergence", {{"cosine", t.divergence.cosine}, {"l2", t.divergence.l2}}},
        {"batch", t.batch},
        {"iterations", t.iterations},
        {"ablation", to_string(t.ablation)},
        {"smoothing", t.smoothing},
        {"share_noise_streams", t.share_noise_streams},
        {"record_wall_time", t.record_wall_time},
        {"checkpoint_every", t.checkpoint_every},
        {"optimizer",
         {{"learning_rate", t.optimizer.learning_rate},
          {"beta1", t.optimizer.beta1},
          {"beta2", t.optimizer.beta2},
          {"epsilon", t.optimizer.epsilon},
          {"clip_norm", t.optimizer.clip_norm}}}}},
      {"eval", {{"samples", cfg.eval_samples}, {"seed", cfg.eval_seed}, {"steps", cfg.eval_steps}}},
  };
}

std::string config_hash(const RunConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_dir");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace rats
