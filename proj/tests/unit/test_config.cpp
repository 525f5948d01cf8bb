// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <fstream>

#include "rats/config.hpp"
#include "rats/error.hpp"
#include "support.hpp"

using namespace rats;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "seed": 4,
    "rats": {
      "student_steps": 3, "teacher_steps": 50, "shift": 3.0, "alpha": 2.0,
      "gamma": 0.999, "gate_temperature": 0.02,
      "horizons": {"targets": [0.75, 0.40, 0.15], "weights": [0.2, 0.3, 0.5]}
    }
  })");
}

RunConfig parse(const json& j) { return parse_config(j.dump(), "test.json"); }

std::string error_of(const json& j) {
  try {
    parse(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config") {
  const RunConfig c = parse(minimal());
  CHECK(c.seed == 4);
  CHECK(c.train.seed == 4);
  CHECK(c.train.student_steps == 3);
  CHECK(c.train.horizons.targets == std::vector<double>{0.75, 0.40, 0.15});
  CHECK(c.train.reward.conditions() == c.task.conditions);
  CHECK(c.model.conditions == c.task.conditions);
}

TEST_CASE("physics fields have no defaults") {
  for (const char* key : {"student_steps", "teacher_steps", "shift", "alpha", "gamma", "gate_temperature", "horizons"}) {
    json j = minimal();
    j["rats"].erase(key);
    CHECK_THAT(error_of(j), Catch::Matchers::ContainsSubstring(std::string("rats.") + key) &&
                                Catch::Matchers::ContainsSubstring("required"));
  }
  json j = minimal();
  j.erase("seed");
  CHECK_THAT(error_of(j), Catch::Matchers::ContainsSubstring("'seed'"));
  json h = minimal();
  h["rats"]["horizons"].erase("weights");
  CHECK_THAT(error_of(h), Catch::Matchers::ContainsSubstring("rats.horizons.weights"));
}

TEST_CASE("unknown fields are rejected with their path") {
  json a = minimal();
  a["rats"]["optimizer"]["momentum"] = 0.5;
  CHECK_THAT(error_of(a), Catch::Matchers::ContainsSubstring("rats.optimizer.momentum"));
  json b = minimal();
  b["extra"] = 1;
  CHECK_THAT(error_of(b), Catch::Matchers::ContainsSubstring("'extra'"));
  json c = minimal();
  c["task"]["radus"] = 1;
  CHECK_THAT(error_of(c), Catch::Matchers::ContainsSubstring("task.radus"));
}

TEST_CASE("type and value errors name the field") {
  json a = minimal();
  a["rats"]["alpha"] = "two";
  CHECK_THAT(error_of(a), Catch::Matchers::ContainsSubstring("rats.alpha"));
  json b = minimal();
  b["rats"]["student_steps"] = -3;
  CHECK_THAT(error_of(b), Catch::Matchers::ContainsSubstring("rats.student_steps"));
  json c = minimal();
  c["rats"]["horizons"]["targets"] = {0.4, 0.75, 0.15};
  CHECK_THAT(error_of(c), Catch::Matchers::ContainsSubstring("rats.horizons"));
  json d = minimal();
  d["rats"]["ablation"] = "partial";
  CHECK_THAT(error_of(d), Catch::Matchers::ContainsSubstring("partial"));
  json e = minimal();
  e["rats"]["teacher_steps"] = 2;
  CHECK_THAT(error_of(e), Catch::Matchers::ContainsSubstring("teacher_steps"));
  json f = minimal();
  f["reward"]["decoder"] = {{"kind", "linear"}, {"matrix", {{1.0, 0.0, 0.0}}}};
  CHECK_THAT(error_of(f), Catch::Matchers::ContainsSubstring("decoder"));
}

TEST_CASE("syntax errors report line and column") {
  const std::string text = "{\n  \"seed\": 1,\n  \"rats\": {,}\n}";
  try {
    parse_config(text, "bad.json");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK_THAT(std::string(e.what()), Catch::Matchers::StartsWith("bad.json:3:12"));
  }
  CHECK(line_column("ab\ncd", 4) == std::pair<std::size_t, std::size_t>{2, 2});
}

TEST_CASE("round trip parse, serialize, parse") {
  json j = minimal();
  j["task"] = {{"conditions", 3}, {"data_seed", 9}};
  j["model"] = {{"hidden", {16, 8}}, {"adapter_rank", 4}};
  j["reward"] = {{"kind", "mode-target"}, {"beta", 2.0}, {"loss", "target-gap"}, {"target", 0.5},
                 {"decoder", {{"kind", "linear"}, {"matrix", {{2.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}}}}};
  j["rats"]["ablation"] = "no-gate";
  j["rats"]["share_noise_streams"] = true;
  j["eval"] = {{"steps", {3, 50}}, {"samples", 100}};
  const RunConfig a = parse(j);
  const json once = to_json(a);
  const RunConfig b = parse_config(once.dump(), "again");
  CHECK(to_json(b) == once);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(b.train.reward.dim == 3);
  CHECK(b.train.decoder.out_dim() == 3);
  // Reward centers are the decoded task centers.
  const auto centers = b.task.centers();
  CHECK(b.train.reward.centers[0] == Catch::Approx(2.0 * centers[0]));
  CHECK(b.train.reward.centers[2] == Catch::Approx(centers[0] + centers[1]));
}

TEST_CASE("config hash") {
  RunConfig a = parse(minimal());
  const std::string h = config_hash(a);
  CHECK(h.size() == 16);
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
  a.output_dir = "elsewhere";
  CHECK(config_hash(a) == h);
  a.train.alpha = 1.0;
  CHECK(config_hash(a) != h);
}

TEST_CASE("load_config file errors") {
  CHECK_THROWS_AS(load_config("/nonexistent/dir/run.json"), IoError);
  CHECK_THROWS_WITH(load_config("/nonexistent/dir/run.json"), Catch::Matchers::ContainsSubstring("/nonexistent/dir/run.json"));
  testing::TempDir dir("config");
  std::ofstream(dir.path() / "ok.json") << minimal().dump();
  CHECK(load_config(dir.path() / "ok.json").seed == 4);
}

TEST_CASE("shipped presets parse") {
  for (const char* name : {"toy_s3.json", "mini.json"}) {
    const RunConfig c = load_config(std::filesystem::path(RATS_CONFIG_DIR) / name);
    CHECK(c.train.horizons.size() == 3);
  }
}
