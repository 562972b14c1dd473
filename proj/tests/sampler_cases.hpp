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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oes/oes_sampler.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace testutil {

struct SamplerInstance {
  oes::DirectedMultigraph graph;
  Matrix logits;
  std::vector<oes::Label> labels;
  oes::OesConfig config;
  std::size_t epoch = 1;
};

/// Random graph, logits with deliberate ties, labels and config.
inline SamplerInstance random_sampler_instance(std::mt19937_64& rng) {
  SamplerInstance s;
  std::size_t n = 1 + rng() % 40;
  std::size_t m = rng() % 300;
  s.graph = random_graph(rng, n, m, 1, 2);
  s.logits = random_matrix(rng, static_cast<Eigen::Index>(m), 2, 2.0);
  if (rng() % 2 == 0) {
    // coarse values make confidence ties common
    s.logits = (s.logits * 2.0).array().round() / 2.0;
  }
  for (std::size_t e = 0; e < m; ++e) s.labels.push_back(rng() % 2 ? oes::Label::positive : oes::Label::negative);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double percentiles[] = {0.0, 50.0, 90.0, 99.0, 100.0};
  s.config.percentile = rng() % 3 == 0 ? percentiles[rng() % 5] : 100.0 * unit(rng);
  s.config.sample_ratio = rng() % 4 == 0 ? std::round(unit(rng) * 4.0) / 4.0 : unit(rng);
  s.config.active_epochs = 1 + rng() % 5;
  s.config.rng_seed = rng();
  s.epoch = 1 + rng() % 5;
  return s;
}

/// Checks one outcome against the brute-force sampler contract; returns an
/// empty string when every property holds.
inline std::string sampler_violation(const SamplerInstance& s, const oes::SampleOutcome& out) {
  const std::size_t edges = s.graph.edge_count();
  if (s.epoch > s.config.active_epochs || edges == 0) {
    if (!out.dropped_ids.empty()) return "inactive epoch dropped edges";
    if (out.retained_graph.edge_count() != edges) return "inactive epoch changed the graph";
    return {};
  }
  std::vector<double> conf = oes::edge_confidences(s.logits);
  std::vector<bool> correct(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    double z0 = s.logits(static_cast<Eigen::Index>(e), 0), z1 = s.logits(static_cast<Eigen::Index>(e), 1);
    double softmax_max = std::max(std::exp(z0), std::exp(z1)) / (std::exp(z0) + std::exp(z1));
    if (std::abs(conf[e] - softmax_max) > 1e-12) return "confidence differs from softmax oracle";
    int predicted = z1 > z0 ? 1 : 0;
    correct[e] = predicted == static_cast<int>(s.labels[e]);
  }
  double threshold = oracle::percentile(conf, s.config.percentile);
  if (out.threshold != threshold) return "threshold differs from oracle";
  std::vector<std::size_t> eligible;
  for (std::size_t e = 0; e < edges; ++e) {
    if (conf[e] >= out.threshold && correct[e]) eligible.push_back(e);
  }
  if (eligible != out.eligible_ids) return "eligible set differs from brute-force filter";
  auto expect = static_cast<std::size_t>(std::lround(s.config.sample_ratio * static_cast<double>(eligible.size())));
  expect = std::min(expect, eligible.size());
  if (out.dropped_ids.size() != expect) {
    return "|D| = " + std::to_string(out.dropped_ids.size()) + ", expected " + std::to_string(expect);
  }
  for (std::size_t d : out.dropped_ids) {
    if (!std::binary_search(eligible.begin(), eligible.end(), d)) return "dropped edge outside E'";
    if (conf[d] < out.threshold || !correct[d]) return "dropped edge violates the filter";
  }
  if (std::adjacent_find(out.dropped_ids.begin(), out.dropped_ids.end()) != out.dropped_ids.end()) {
    return "duplicate dropped id";
  }
  if (out.retained_graph.edge_count() != edges - out.dropped_ids.size()) return "retained count mismatch";
  for (std::size_t k = 0; k < out.retained_to_input.size(); ++k) {
    std::size_t src = out.retained_to_input[k];
    if (std::binary_search(out.dropped_ids.begin(), out.dropped_ids.end(), src)) return "dropped edge retained";
    if (!(out.retained_graph.edge(k) == s.graph.edge(src))) return "retained edge endpoints changed";
  }
  return {};
}

}  // namespace testutil
