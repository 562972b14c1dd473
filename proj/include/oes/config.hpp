// Copyright 2026 The oesgnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oes/common.hpp"
#include "oes/data.hpp"
#include "oes/model.hpp"
#include "oes/nn.hpp"
#include "oes/oes_sampler.hpp"

namespace oes {

enum class DataKind { synth, csv, bundle };

struct DataSource {
  DataKind kind = DataKind::synth;
  std::string path;  // csv file or bundle directory
  data::SynthConfig synth;
};

struct RunConfig {
  ModelConfig model;
  std::size_t epochs_total = 60;
  std::optional<OesConfig> oes = OesConfig{};
  bool compare_oes = false;  // run both variants per seed
  ad::AdamConfig optimizer;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  DataSource data;

  void validate() const {
    if (model.depth < kMinDepth || model.depth > kMaxDepth) {
      throw ConfigError("depth " + std::to_string(model.depth) + " outside [2, 16]");
    }
    if (model.hidden == 0) throw ConfigError("hidden must be positive");
    if (epochs_total == 0) throw ConfigError("epochs_total must be positive");
    if (seeds.empty()) throw ConfigError("seeds must be nonempty");
    if (!(optimizer.lr >= 0.0)) throw ConfigError("lr must be non-negative");
    if (oes) {
      oes->validate();
      if (oes->active_epochs >= epochs_total) {
        throw ConfigError("oes.epochs (" + std::to_string(oes->active_epochs) +
                          ") must be smaller than epochs (" + std::to_string(epochs_total) + ")");
      }
    }
    if (data.kind != DataKind::synth && data.path.empty()) throw ConfigError("data.path is required");
  }
};

namespace detail {

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = lower(v);
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

inline double parse_number(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!data::detail::parse_double(v, out)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  if (!data::detail::parse_int(data::detail::trim(v), out)) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!data::detail::trim(item).empty()) out.push_back(parse_count(key, item));
  }
  return out;
}

}  // namespace detail

/// Applies one `key = value` setting.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string& v = value;
  auto oes_cfg = [&]() -> OesConfig& {
    if (!c.oes) c.oes = OesConfig{};
    return *c.oes;
  };
  if (key == "model") c.model.kind = parse_model_kind(v);
  else if (key == "depth") c.model.depth = parse_count(key, v);
  else if (key == "hidden") c.model.hidden = parse_count(key, v);
  else if (key == "epsilon") c.model.epsilon = parse_number(key, v);
  else if (key == "learnable_epsilon") c.model.learnable_epsilon = parse_bool(key, v);
  else if (key == "edge_mix") c.model.edge_mix = parse_bool(key, v);
  else if (key == "readout_edge_features") c.model.readout_edge_features = parse_bool(key, v);
  else if (key == "batch_norm") c.model.batch_norm = parse_bool(key, v);
  else if (key == "layer_relu") c.model.layer_relu = parse_bool(key, v);
  else if (key == "residual") c.model.residual = parse_bool(key, v);
  else if (key == "ego_mode") {
    std::string s = lower(v);
    if (s == "exact") c.model.ego_mode = EgoMode::exact;
    else if (s == "self_centered") c.model.ego_mode = EgoMode::self_centered;
    else throw ConfigError("ego_mode: expected exact or self_centered, got '" + v + "'");
  } else if (key == "ego_hops") c.model.ego_hops = parse_count(key, v);
  else if (key == "gn_schedule") {
    std::string s = lower(v);
    if (s == "per_layer") c.model.gn_schedule = GnSchedule::per_layer;
    else if (s == "once") c.model.gn_schedule = GnSchedule::once;
    else throw ConfigError("gn_schedule: expected per_layer or once, got '" + v + "'");
  } else if (key == "epochs") c.epochs_total = parse_count(key, v);
  else if (key == "lr") c.optimizer.lr = parse_number(key, v);
  else if (key == "beta1") c.optimizer.beta1 = parse_number(key, v);
  else if (key == "beta2") c.optimizer.beta2 = parse_number(key, v);
  else if (key == "adam_eps") c.optimizer.eps = parse_number(key, v);
  else if (key == "seeds") c.seeds = parse_seed_list(key, v);
  else if (key == "oes") {
    if (parse_bool(key, v)) oes_cfg();
    else c.oes.reset();
  } else if (key == "compare_oes") c.compare_oes = parse_bool(key, v);
  else if (key == "oes.percentile") oes_cfg().percentile = parse_number(key, v);
  else if (key == "oes.ratio") oes_cfg().sample_ratio = parse_number(key, v);
  else if (key == "oes.epochs") oes_cfg().active_epochs = parse_count(key, v);
  else if (key == "oes.mode") {
    std::string s = lower(v);
    if (s == "cumulative") oes_cfg().mode = OesMode::cumulative;
    else if (s == "fresh" || s == "per_epoch_fresh") oes_cfg().mode = OesMode::per_epoch_fresh;
    else throw ConfigError("oes.mode: expected cumulative or fresh, got '" + v + "'");
  } else if (key == "oes.confidence") {
    std::string s = lower(v);
    if (s == "softmax") oes_cfg().confidence = ConfidenceMode::softmax;
    else if (s == "raw") oes_cfg().confidence = ConfidenceMode::raw;
    else throw ConfigError("oes.confidence: expected softmax or raw, got '" + v + "'");
  } else if (key == "data") {
    std::string s = lower(v);
    if (s == "synth") c.data.kind = DataKind::synth;
    else if (s == "csv") c.data.kind = DataKind::csv;
    else if (s == "bundle") c.data.kind = DataKind::bundle;
    else throw ConfigError("data: expected synth, csv or bundle, got '" + v + "'");
  } else if (key == "data.path") c.data.path = v;
  else if (key == "synth.seed") c.data.synth.seed = parse_count(key, v);
  else if (key == "synth.accounts") c.data.synth.accounts = parse_count(key, v);
  else if (key == "synth.transactions") c.data.synth.transactions = parse_count(key, v);
  else if (key == "synth.illicit_ratio") c.data.synth.illicit_ratio = parse_number(key, v);
  else if (key == "synth.cycle") c.data.synth.mix.cycle = parse_number(key, v);
  else if (key == "synth.fan_in") c.data.synth.mix.fan_in = parse_number(key, v);
  else if (key == "synth.fan_out") c.data.synth.mix.fan_out = parse_number(key, v);
  else if (key == "synth.days") c.data.synth.days = parse_count(key, v);
  else throw ConfigError("unknown config key '" + key + "'");
}

/// `key = value` lines; '#' starts a comment. Later keys win.
inline RunConfig parse_config(std::string_view text, RunConfig base = {}) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto body = data::detail::trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(data::detail::trim(body.substr(0, eq)));
    std::string value(data::detail::trim(body.substr(eq + 1)));
    try {
      apply_setting(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  base.validate();
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

/// Canonical text form; parse_config(to_config_text(c)) reproduces c.
inline std::string to_config_text(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  auto b = [](bool x) { return x ? "true" : "false"; };
  os << "model = " << to_string(c.model.kind) << '\n'
     << "depth = " << c.model.depth << '\n'
     << "hidden = " << c.model.hidden << '\n'
     << "epsilon = " << c.model.epsilon << '\n'
     << "learnable_epsilon = " << b(c.model.learnable_epsilon) << '\n'
     << "edge_mix = " << b(c.model.edge_mix) << '\n'
     << "readout_edge_features = " << b(c.model.readout_edge_features) << '\n'
     << "batch_norm = " << b(c.model.batch_norm) << '\n'
     << "layer_relu = " << b(c.model.layer_relu) << '\n'
     << "residual = " << b(c.model.residual) << '\n'
     << "ego_mode = " << (c.model.ego_mode == EgoMode::exact ? "exact" : "self_centered") << '\n'
     << "ego_hops = " << c.model.ego_hops << '\n'
     << "gn_schedule = " << (c.model.gn_schedule == GnSchedule::once ? "once" : "per_layer") << '\n'
     << "epochs = " << c.epochs_total << '\n'
     << "lr = " << c.optimizer.lr << '\n'
     << "beta1 = " << c.optimizer.beta1 << '\n'
     << "beta2 = " << c.optimizer.beta2 << '\n'
     << "adam_eps = " << c.optimizer.eps << '\n';
  os << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) os << (i ? "," : "") << c.seeds[i];
  os << '\n' << "oes = " << b(c.oes.has_value()) << '\n';
  if (c.oes) {
    os << "oes.percentile = " << c.oes->percentile << '\n'
       << "oes.ratio = " << c.oes->sample_ratio << '\n'
       << "oes.epochs = " << c.oes->active_epochs << '\n'
       << "oes.mode = " << (c.oes->mode == OesMode::cumulative ? "cumulative" : "fresh") << '\n'
       << "oes.confidence = " << (c.oes->confidence == ConfidenceMode::softmax ? "softmax" : "raw") << '\n';
  }
  os << "compare_oes = " << b(c.compare_oes) << '\n';
  const char* kinds[] = {"synth", "csv", "bundle"};
  os << "data = " << kinds[static_cast<int>(c.data.kind)] << '\n';
  if (!c.data.path.empty()) os << "data.path = " << c.data.path << '\n';
  os << "synth.seed = " << c.data.synth.seed << '\n'
     << "synth.accounts = " << c.data.synth.accounts << '\n'
     << "synth.transactions = " << c.data.synth.transactions << '\n'
     << "synth.illicit_ratio = " << c.data.synth.illicit_ratio << '\n'
     << "synth.cycle = " << c.data.synth.mix.cycle << '\n'
     << "synth.fan_in = " << c.data.synth.mix.fan_in << '\n'
     << "synth.fan_out = " << c.data.synth.mix.fan_out << '\n'
     << "synth.days = " << c.data.synth.days << '\n';
  return os.str();
}

}  // namespace oes
