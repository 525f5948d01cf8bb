// Copyright (c) 2026, The RATS Authors
// SPDX-License-Identifier: Apache-2.0

#include "rats/params.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "rats/error.hpp"

namespace rats {

using nlohmann::json;

void ParamLayout::add(std::string name, Shape shape) {
  for (const auto& e : entries_) {
    if (e.name == name) throw ConfigError("layout: duplicate entry '" + name + "'");
  }
  ParamEntry e{std::move(name), total_, std::move(shape)};
  total_ += e.size();
  entries_.push_back(std::move(e));
}

const ParamEntry& ParamLayout::entry(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw ConfigError("layout: no entry named '" + name + "'");
}

ParamSet::ParamSet(ParamLayout layout) : layout_(std::move(layout)), values_(layout_.total(), 0.0) {}

ParamSet::ParamSet(ParamLayout layout, std::vector<double> values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_.total()) {
    throw ConfigError("param set: " + std::to_string(values_.size()) + " values for a layout of " +
                      std::to_string(layout_.total()));
  }
}

std::span<const double> ParamSet::view(const std::string& name) const {
  const auto& e = layout_.entry(name);
  return std::span<const double>(values_).subspan(e.offset, e.size());
}

std::span<double> ParamSet::view(const std::string& name) {
  const auto& e = layout_.entry(name);
  return std::span<double>(values_).subspan(e.offset, e.size());
}

std::vector<Tensor> ParamSet::bind(bool trainable) const {
  std::vector<Tensor> out;
  out.reserve(layout_.size());
  for (const auto& e : layout_.entries()) {
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(e.offset),
                          values_.begin() + static_cast<std::ptrdiff_t>(e.offset + e.size()));
    out.push_back(trainable ? Tensor::parameter(e.shape, std::move(v))
                            : Tensor::constant(e.shape, std::move(v)));
  }
  return out;
}

std::vector<double> ParamSet::gather_grads(const std::vector<Tensor>& bound,
                                           const GradientMap& grads) const {
  if (bound.size() != layout_.size()) throw ShapeError("gather_grads: bound tensors do not match layout");
  std::vector<double> flat(layout_.total(), 0.0);
  for (std::size_t k = 0; k < bound.size(); ++k) {
    const Tensor* g = grads.find(bound[k].id());
    if (!g) continue;
    const auto& e = layout_.entries()[k];
    std::copy(g->values().begin(), g->values().end(),
              flat.begin() + static_cast<std::ptrdiff_t>(e.offset));
  }
  return flat;
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const CheckpointHeader& header,
                     const ParamSet& params) {
  json layout = json::array();
  for (const auto& e : params.layout().entries()) {
    layout.push_back({{"name", e.name}, {"offset", e.offset}, {"shape", e.shape}});
  }
  json h = {{"format", "rats-checkpoint-v1"},
            {"kind", header.kind},
            {"dim", header.dim},
            {"conditions", header.conditions},
            {"hidden", header.hidden},
            {"adapter_rank", header.adapter_rank},
            {"config_hash", header.config_hash},
            {"seed", header.seed},
            {"count", params.size()},
            {"layout", layout}};

  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  const std::string line = h.dump() + "\n";
  out.write(line.data(), static_cast<std::streamsize>(line.size()));
  for (double v : params.values()) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(v));
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("checkpoint has no header: " + path.string());

  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError("checkpoint header is not valid JSON (" + path.string() + "): " + e.what());
  }

  Checkpoint ck;
  ParamLayout layout;
  try {
    if (h.at("format") != "rats-checkpoint-v1") {
      throw ConfigError("unsupported checkpoint format in " + path.string());
    }
    ck.header.kind = h.at("kind").get<std::string>();
    ck.header.dim = h.at("dim").get<std::size_t>();
    ck.header.conditions = h.at("conditions").get<std::size_t>();
    ck.header.hidden = h.at("hidden").get<std::vector<std::size_t>>();
    ck.header.adapter_rank = h.at("adapter_rank").get<std::size_t>();
    ck.header.config_hash = h.at("config_hash").get<std::string>();
    ck.header.seed = h.at("seed").get<std::uint64_t>();
    for (const auto& e : h.at("layout")) {
      layout.add(e.at("name").get<std::string>(), e.at("shape").get<Shape>());
      if (layout.entries().back().offset != e.at("offset").get<std::size_t>()) {
        throw ConfigError("checkpoint layout offsets are inconsistent in " + path.string());
      }
    }
    if (h.at("count").get<std::size_t>() != layout.total()) {
      throw ConfigError("checkpoint value count does not match layout in " + path.string());
    }
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint header in " + path.string() + ": " + e.what());
  }

  std::vector<double> values(layout.total());
  for (double& v : values) {
    char buf[8];
    if (!in.read(buf, 8)) throw ConfigError("checkpoint payload truncated: " + path.string());
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    v = std::bit_cast<double>(to_le(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ConfigError("checkpoint has trailing bytes: " + path.string());
  }
  ck.params = ParamSet(std::move(layout), std::move(values));
  return ck;
}

}  // namespace rats
