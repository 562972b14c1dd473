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
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oes/model.hpp"
#include "oes/multigraph.hpp"

namespace oes {

/// Resampling strategy across active epochs.
enum class OesMode {
  per_epoch_fresh,  // every active epoch samples from the original graph
  cumulative,       // drops accumulate; the shrunken graph is kept after epoch n
};

/// What the confidence of an edge is measured on.
enum class ConfidenceMode { softmax, raw };

struct OesConfig {
  double percentile = 99.0;   // p, in percent
  double sample_ratio = 0.10; // r, fraction of the eligible set
  std::size_t active_epochs = 20;  // n
  std::uint64_t rng_seed = 0;
  OesMode mode = OesMode::cumulative;
  ConfidenceMode confidence = ConfidenceMode::softmax;

  void validate() const {
    if (!(percentile >= 0.0 && percentile <= 100.0)) {
      throw ConfigError("OES percentile must lie in [0, 100]");
    }
    if (!(sample_ratio >= 0.0 && sample_ratio <= 1.0)) {
      throw ConfigError("OES sample ratio must lie in [0, 1]");
    }
  }
};

struct SampleOutcome {
  std::size_t epoch = 0;
  bool active = false;
  double threshold = 0.0;
  std::vector<std::size_t> eligible_ids;  // E'
  std::vector<std::size_t> dropped_ids;   // D, subset of E', ascending
  DirectedMultigraph retained_graph;
  std::vector<std::size_t> retained_to_input;  // new edge id -> input edge id
};

/// Larger of the two class scores. Softmax-normalized unless `mode` is raw.
inline double edge_confidence(double negative_logit, double positive_logit,
                              ConfidenceMode mode = ConfidenceMode::softmax) {
  if (!std::isfinite(negative_logit) || !std::isfinite(positive_logit)) {
    throw NonFiniteError("edge_confidence: non-finite logit");
  }
  if (mode == ConfidenceMode::raw) return std::max(negative_logit, positive_logit);
  // max softmax = 1 / (1 + exp(-|z1 - z0|))
  return 1.0 / (1.0 + std::exp(-std::abs(positive_logit - negative_logit)));
}

inline std::vector<double> edge_confidences(const Matrix& logits,
                                            ConfidenceMode mode = ConfidenceMode::softmax) {
  std::vector<double> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        edge_confidence(logits(i, ad::kNegativeColumn), logits(i, ad::kPositiveColumn), mode);
  }
  return out;
}

/// Nearest-rank percentile: the element at 1-based rank ceil(p/100 * |C|)
/// of the ascending order, with rank clamped to [1, |C|].
inline double percentile_threshold(std::span<const double> confidences, double p) {
  if (confidences.empty()) throw ConfigError("percentile_threshold: empty confidence set");
  if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("percentile_threshold: p outside [0, 100]");
  std::vector<double> sorted(confidences.begin(), confidences.end());
  std::sort(sorted.begin(), sorted.end());
  double rank = std::ceil(p * static_cast<double>(sorted.size()) / 100.0);
  std::size_t r = rank < 1.0 ? 1 : static_cast<std::size_t>(rank);
  r = std::min(r, sorted.size());
  return sorted[r - 1];
}

/// Edges with c >= threshold (inclusive) and a correct prediction.
inline std::vector<std::size_t> eligible_edges(std::span<const double> confidences,
                                               std::span<const Label> predictions,
                                               std::span<const Label> labels, double threshold) {
  if (confidences.size() != predictions.size() || confidences.size() != labels.size()) {
    throw ShapeError("eligible_edges: length mismatch");
  }
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < confidences.size(); ++e) {
    if (confidences[e] >= threshold && predictions[e] == labels[e]) out.push_back(e);
  }
  return out;
}

/// m = round-half-up(r * |E'|), capped at |E'|.
inline std::size_t sample_count(double ratio, std::size_t eligible) {
  auto m = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(eligible) + 0.5));
  return std::min(m, eligible);
}

/// Generator for one (seed, epoch) pair.
inline std::mt19937_64 oes_generator(std::uint64_t seed, std::size_t epoch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), 0x0E5u};
  return std::mt19937_64(seq);
}

/// One application of the sampler. Inactive epochs (epoch > n) return the
/// input unchanged with nothing dropped.
inline SampleOutcome apply_oes(const DirectedMultigraph& g, const Matrix& logits,
                               std::span<const Label> labels, const OesConfig& cfg,
                               std::size_t epoch) {
  cfg.validate();
  if (static_cast<std::size_t>(logits.rows()) != g.edge_count() || logits.cols() != 2) {
    throw ShapeError("apply_oes: logits " + shape_string(logits) + " do not cover " +
                     std::to_string(g.edge_count()) + " edges");
  }
  if (labels.size() != g.edge_count()) throw ShapeError("apply_oes: label count mismatch");

  SampleOutcome out;
  out.epoch = epoch;
  if (epoch > cfg.active_epochs || g.edge_count() == 0) {
    out.retained_graph = g;
    out.retained_to_input.resize(g.edge_count());
    std::iota(out.retained_to_input.begin(), out.retained_to_input.end(), std::size_t{0});
    return out;
  }
  out.active = true;
  std::vector<double> conf = edge_confidences(logits, cfg.confidence);
  std::vector<Label> pred = predict_labels(logits);
  out.threshold = percentile_threshold(conf, cfg.percentile);
  out.eligible_ids = eligible_edges(conf, pred, labels, out.threshold);

  std::size_t m = sample_count(cfg.sample_ratio, out.eligible_ids.size());
  std::vector<std::size_t> pool = out.eligible_ids;
  auto rng = oes_generator(cfg.rng_seed, epoch);
  for (std::size_t i = 0; i < m; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  out.dropped_ids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(out.dropped_ids.begin(), out.dropped_ids.end());

  EdgeRemoval removal = remove_edges(g, out.dropped_ids);
  out.retained_graph = std::move(removal.graph);
  out.retained_to_input = std::move(removal.new_to_old);
  return out;
}

/// Expected number of dropped edges, (1 - p/100) * r * |E|; logged next to
/// the realized counts.
inline double closed_form_edge_count(const OesConfig& cfg, std::size_t edges) {
  return (1.0 - cfg.percentile / 100.0) * cfg.sample_ratio * static_cast<double>(edges);
}

}  // namespace oes
