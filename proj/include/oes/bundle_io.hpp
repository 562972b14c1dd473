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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oes/common.hpp"
#include "oes/data.hpp"

namespace oes::data {

// Graph container, little-endian:
//   char[8]  magic "OESGRAPH"
//   u32      version (1)
//   u32      reserved (0)
//   u64      N, E, Fv, Fe
//   E x (u64 src, u64 dst)
//   E x u8   label
//   N*Fv f64 node features, row-major
//   E*Fe f64 edge features, row-major
inline constexpr char kGraphMagic[8] = {'O', 'E', 'S', 'G', 'R', 'A', 'P', 'H'};
inline constexpr std::uint32_t kGraphVersion = 1;

namespace detail {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& is, const std::string& what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("truncated graph file: " + what);
  return v;
}

}  // namespace detail

inline void write_graph(std::ostream& os, const DirectedMultigraph& g) {
  os.write(kGraphMagic, sizeof kGraphMagic);
  detail::put<std::uint32_t>(os, kGraphVersion);
  detail::put<std::uint32_t>(os, 0);
  detail::put<std::uint64_t>(os, g.node_count());
  detail::put<std::uint64_t>(os, g.edge_count());
  detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(g.node_features().cols()));
  detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(g.edge_features().cols()));
  for (const Edge& e : g.edges()) {
    detail::put<std::uint64_t>(os, e.src);
    detail::put<std::uint64_t>(os, e.dst);
  }
  for (Label y : g.labels()) detail::put<std::uint8_t>(os, static_cast<std::uint8_t>(y));
  auto dump = [&](const Matrix& m) {
    os.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
  };
  dump(g.node_features());
  dump(g.edge_features());
}

inline DirectedMultigraph read_graph(std::istream& is) {
  char magic[8];
  if (!is.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kGraphMagic)) {
    throw ParseError("not a graph container (bad magic)");
  }
  auto version = detail::get<std::uint32_t>(is, "version");
  if (version != kGraphVersion) throw ParseError("unsupported graph container version " + std::to_string(version));
  detail::get<std::uint32_t>(is, "reserved");
  auto n = detail::get<std::uint64_t>(is, "N");
  auto m = detail::get<std::uint64_t>(is, "E");
  auto fv = detail::get<std::uint64_t>(is, "Fv");
  auto fe = detail::get<std::uint64_t>(is, "Fe");
  std::vector<Edge> edges(m);
  for (auto& e : edges) {
    e.src = detail::get<std::uint64_t>(is, "edge");
    e.dst = detail::get<std::uint64_t>(is, "edge");
  }
  std::vector<Label> labels(m);
  for (auto& y : labels) {
    auto raw = detail::get<std::uint8_t>(is, "label");
    if (raw > 1) throw ParseError("label byte out of range");
    y = static_cast<Label>(raw);
  }
  Matrix nodes(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fv));
  Matrix efeat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(fe));
  auto load = [&](Matrix& mat) {
    auto bytes = static_cast<std::streamsize>(mat.size() * sizeof(double));
    if (bytes && !is.read(reinterpret_cast<char*>(mat.data()), bytes)) throw ParseError("truncated graph file: features");
  };
  load(nodes);
  load(efeat);
  return DirectedMultigraph::build(n, std::move(edges), std::move(nodes), std::move(efeat), std::move(labels));
}

inline nlohmann::json encoder_to_json(const EncoderState& s) {
  return {{"amount_mean", s.amount_mean}, {"amount_std", s.amount_std},
          {"time_min", s.time_min},       {"time_range", s.time_range},
          {"currencies", s.currencies},   {"formats", s.formats},
          {"in_mean", s.in_mean},         {"in_std", s.in_std},
          {"out_mean", s.out_mean},       {"out_std", s.out_std}};
}

inline EncoderState encoder_from_json(const nlohmann::json& j) {
  EncoderState s;
  s.amount_mean = j.at("amount_mean");
  s.amount_std = j.at("amount_std");
  s.time_min = j.at("time_min");
  s.time_range = j.at("time_range");
  s.currencies = j.at("currencies").get<std::vector<std::string>>();
  s.formats = j.at("formats").get<std::vector<std::string>>();
  s.in_mean = j.at("in_mean");
  s.in_std = j.at("in_std");
  s.out_mean = j.at("out_mean");
  s.out_std = j.at("out_std");
  return s;
}

/// Directory layout: train.graph, valid.graph, test.graph, split.json.
/// The raw records are not stored.
inline void save_bundle(const DatasetBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const DirectedMultigraph& g) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir / name).string());
    write_graph(os, g);
    if (!os) throw ConfigError("write failed for " + (dir / name).string());
  };
  write("train.graph", b.train_graph);
  write("valid.graph", b.valid_graph);
  write("test.graph", b.test_graph);
  nlohmann::json j = {{"format", "oesgnn-bundle"},
                      {"version", 1},
                      {"t1", b.t1},
                      {"t2", b.t2},
                      {"node_count", b.node_count},
                      {"train_count", b.train_count},
                      {"valid_count", b.valid_count},
                      {"test_count", b.test_count},
                      {"valid_eval_mask", b.valid_eval_mask},
                      {"test_eval_mask", b.test_eval_mask},
                      {"encoder", encoder_to_json(b.encoder)}};
  std::ofstream os(dir / "split.json");
  if (!os) throw ConfigError("cannot write " + (dir / "split.json").string());
  os << j.dump(2) << '\n';
}

inline DatasetBundle load_bundle(const std::filesystem::path& dir) {
  auto read = [&](const char* name) {
    std::ifstream is(dir / name, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + (dir / name).string());
    return read_graph(is);
  };
  DatasetBundle b;
  b.train_graph = read("train.graph");
  b.valid_graph = read("valid.graph");
  b.test_graph = read("test.graph");
  std::ifstream is(dir / "split.json");
  if (!is) throw ConfigError("cannot open " + (dir / "split.json").string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("split.json: ") + e.what());
  }
  if (j.value("format", "") != "oesgnn-bundle") throw ParseError("split.json: unexpected format tag");
  b.t1 = j.at("t1");
  b.t2 = j.at("t2");
  b.node_count = j.at("node_count");
  b.train_count = j.at("train_count");
  b.valid_count = j.at("valid_count");
  b.test_count = j.at("test_count");
  b.valid_eval_mask = j.at("valid_eval_mask").get<std::vector<std::size_t>>();
  b.test_eval_mask = j.at("test_eval_mask").get<std::vector<std::size_t>>();
  b.encoder = encoder_from_json(j.at("encoder"));
  return b;
}

}  // namespace oes::data
