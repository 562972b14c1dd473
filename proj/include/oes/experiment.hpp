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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "oes/bundle_io.hpp"
#include "oes/config.hpp"
#include "oes/data.hpp"
#include "oes/model.hpp"
#include "oes/nn.hpp"
#include "oes/oes_sampler.hpp"

namespace oes {

/// Confusion counts and scores; positive = laundering.
struct Scores {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Precision and recall are 0 when their denominator is 0; F1 is 0 when
/// P + R = 0.
inline Scores score_predictions(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size()) throw ShapeError("score_predictions: length mismatch");
  if (predicted.empty()) throw ConfigError("score_predictions: empty evaluation set");
  Scores s;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    bool p = predicted[i] == Label::positive, a = actual[i] == Label::positive;
    s.tp += p && a;
    s.fp += p && !a;
    s.fn += !p && a;
    s.tn += !p && !a;
  }
  auto ratio = [](std::size_t num, std::size_t den) {
    return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  s.precision = ratio(s.tp, s.tp + s.fp);
  s.recall = ratio(s.tp, s.tp + s.fn);
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

/// Scores the masked rows of precomputed logits.
inline Scores evaluate_logits(const Matrix& logits, std::span<const Label> labels,
                              std::span<const std::size_t> mask) {
  if (mask.empty()) throw ConfigError("evaluate: empty evaluation mask");
  std::vector<Label> pred, actual;
  pred.reserve(mask.size());
  actual.reserve(mask.size());
  for (std::size_t e : mask) {
    if (e >= labels.size() || static_cast<Eigen::Index>(e) >= logits.rows()) {
      throw IndexError("evaluate: mask edge " + std::to_string(e) + " out of range");
    }
    auto i = static_cast<Eigen::Index>(e);
    pred.push_back(predict_label(logits(i, ad::kNegativeColumn), logits(i, ad::kPositiveColumn)));
    actual.push_back(labels[e]);
  }
  return score_predictions(pred, actual);
}

inline Scores evaluate(ModelStack& model, const DirectedMultigraph& g, std::span<const std::size_t> mask) {
  if (mask.empty()) throw ConfigError("evaluate: empty evaluation mask");
  return evaluate_logits(predict_logits(model, g), g.labels(), mask);
}

/// Negative weight 1, positive weight #negative / #positive; 1 when either
/// class is absent.
inline ad::ClassWeights class_weights(std::span<const Label> labels) {
  std::size_t pos = 0;
  for (Label y : labels) pos += y == Label::positive;
  std::size_t neg = labels.size() - pos;
  ad::ClassWeights w;
  if (pos && neg) w.positive = static_cast<double>(neg) / static_cast<double>(pos);
  return w;
}

// ---------------------------------------------------------------------------
// Training

struct EpochMetrics {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double test_loss = 0.0;
  std::size_t edges_used = 0;
  std::size_t dropped = 0;  // dropped by this epoch's sampler call
  std::size_t eligible = 0;
  double threshold = 0.0;
  double expected_drop = 0.0;  // (1 - p/100) * r * |E| of the sampled graph
  bool oes_active = false;
  double wall_seconds = 0.0;  // sampler + forward + backward + optimizer step
};

struct TrainState {
  ModelStack model;
  std::optional<OesConfig> oes;
  ad::AdamConfig optimizer;
  DirectedMultigraph original;  // training graph as loaded
  DirectedMultigraph current;   // graph trained on last epoch
  Matrix previous_logits;       // rows align with `current` edges
  bool has_previous = false;

  static TrainState create(const RunConfig& cfg, const DirectedMultigraph& train_graph,
                           std::uint64_t seed, bool use_oes) {
    ModelConfig mc = cfg.model;
    mc.node_in = static_cast<std::size_t>(train_graph.node_features().cols());
    mc.edge_in = static_cast<std::size_t>(train_graph.edge_features().cols());
    TrainState s{ModelStack::create(mc, seed), std::nullopt, cfg.optimizer, train_graph, train_graph, Matrix(), false};
    if (use_oes) {
      s.oes = cfg.oes.value_or(OesConfig{});
      s.oes->rng_seed = seed;
    }
    return s;
  }
};

/// One optimizer step on the (possibly sampled) training graph. Sampling at
/// epoch k uses the logits of epoch k - 1, so epoch 1 never drops.
inline EpochMetrics train_epoch(TrainState& state, std::size_t epoch) {
  using clock = std::chrono::steady_clock;
  EpochMetrics m;
  m.epoch = epoch;
  auto start = clock::now();
  try {
    DirectedMultigraph graph = state.current;
    if (state.oes && state.oes->mode == OesMode::per_epoch_fresh) graph = state.original;
    if (state.oes && epoch <= state.oes->active_epochs && epoch > 1 && state.has_previous) {
      Matrix logits = state.previous_logits;
      if (state.oes->mode == OesMode::per_epoch_fresh) logits = predict_logits(state.model, state.original);
      SampleOutcome out = apply_oes(graph, logits, graph.labels(), *state.oes, epoch);
      m.oes_active = out.active;
      m.dropped = out.dropped_ids.size();
      m.eligible = out.eligible_ids.size();
      m.threshold = out.threshold;
      m.expected_drop = closed_form_edge_count(*state.oes, graph.edge_count());
      graph = std::move(out.retained_graph);
    }
    ad::Tape tape;
    ForwardPass fp = model_forward(state.model, graph, tape);
    ad::Tensor loss = ad::weighted_cross_entropy(fp.logits, graph.labels(), class_weights(graph.labels()));
    m.train_loss = loss.item();
    if (!std::isfinite(m.train_loss)) throw NonFiniteError("non-finite training loss");
    state.model.params().zero_grad();
    tape.backward(loss);
    ad::adam_step(state.model.params(), state.optimizer);
    state.previous_logits = fp.logits.value();
    state.has_previous = true;
    m.edges_used = graph.edge_count();
    state.current = std::move(graph);
  } catch (const NonFiniteError& e) {
    throw NonFiniteError("epoch " + std::to_string(epoch) + ": " + e.what());
  }
  m.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return m;
}

// ---------------------------------------------------------------------------
// Reports

struct SeedResult {
  std::uint64_t seed = 0;
  Scores valid, test;
  std::vector<double> train_loss, test_loss;
  std::vector<std::size_t> edges_used, dropped, eligible;
  std::vector<double> thresholds, expected_drop;
  std::vector<double> epoch_seconds;  // timing; kept out of report.json
  double total_minutes = 0.0;         // timing
};

struct Aggregate {
  double mean = 0.0, stddev = 0.0;  // population std
};

inline Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  if (xs.empty()) return a;
  for (double x : xs) a.mean += x;
  a.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - a.mean) * (x - a.mean);
  a.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return a;
}

struct VariantReport {
  std::string name;  // "baseline" or "oes"
  bool oes = false;
  std::vector<SeedResult> seeds;

  Aggregate f1() const { return collect([](const SeedResult& s) { return s.test.f1; }); }
  Aggregate precision() const { return collect([](const SeedResult& s) { return s.test.precision; }); }
  Aggregate recall() const { return collect([](const SeedResult& s) { return s.test.recall; }); }
  Aggregate minutes() const { return collect([](const SeedResult& s) { return s.total_minutes; }); }

  template <typename F>
  Aggregate collect(F f) const {
    std::vector<double> xs;
    for (const auto& s : seeds) xs.push_back(f(s));
    return aggregate(xs);
  }
};

struct MetricsReport {
  std::string label;   // e.g. "base" or "depth=8"
  std::string config;  // canonical config text
  std::size_t epochs_total = 0;
  std::vector<VariantReport> variants;
};

inline bool operator==(const Scores& a, const Scores& b) {
  return a.tp == b.tp && a.fp == b.fp && a.fn == b.fn && a.tn == b.tn && a.precision == b.precision &&
         a.recall == b.recall && a.f1 == b.f1;
}
inline bool operator==(const SeedResult& a, const SeedResult& b) {
  return a.seed == b.seed && a.valid == b.valid && a.test == b.test && a.train_loss == b.train_loss &&
         a.test_loss == b.test_loss && a.edges_used == b.edges_used && a.dropped == b.dropped &&
         a.eligible == b.eligible && a.thresholds == b.thresholds && a.expected_drop == b.expected_drop &&
         a.epoch_seconds == b.epoch_seconds && a.total_minutes == b.total_minutes;
}
inline bool operator==(const VariantReport& a, const VariantReport& b) {
  return a.name == b.name && a.oes == b.oes && a.seeds == b.seeds;
}
inline bool operator==(const MetricsReport& a, const MetricsReport& b) {
  return a.label == b.label && a.config == b.config && a.epochs_total == b.epochs_total &&
         a.variants == b.variants;
}

// ---------------------------------------------------------------------------
// Experiments

/// Loads, or synthesizes, and encodes the configured dataset.
inline data::DatasetBundle load_dataset(const DataSource& src) {
  switch (src.kind) {
    case DataKind::bundle:
      return data::load_bundle(src.path);
    case DataKind::csv: {
      std::ifstream is(src.path, std::ios::binary);
      if (!is) throw ConfigError("cannot open " + src.path);
      std::stringstream ss;
      ss << is.rdbuf();
      return data::build_bundle(ss.str());
    }
    case DataKind::synth:
      break;
  }
  return data::build_bundle(data::synthesize_dataset(src.synth));
}

/// Checks that evaluation masks sit inside their windows of the graphs.
inline void check_eval_isolation(const data::DatasetBundle& b) {
  const std::size_t train_edges = b.train_graph.edge_count();
  for (std::size_t e : b.valid_eval_mask) {
    if (e < train_edges || e >= b.valid_graph.edge_count()) {
      throw GraphError("validation mask edge " + std::to_string(e) + " leaves its window");
    }
  }
  for (std::size_t e : b.test_eval_mask) {
    if (e < b.valid_graph.edge_count() || e >= b.test_graph.edge_count()) {
      throw GraphError("test mask edge " + std::to_string(e) + " leaves its window");
    }
  }
}

/// Full training run for one seed and one variant.
inline SeedResult run_seed(const RunConfig& cfg, const data::DatasetBundle& bundle, std::uint64_t seed,
                           bool use_oes) {
  check_eval_isolation(bundle);
  SeedResult r;
  r.seed = seed;
  TrainState state = TrainState::create(cfg, bundle.train_graph, seed, use_oes);
  const ad::ClassWeights test_weights = class_weights(bundle.train_graph.labels());
  double total = 0.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs_total; ++epoch) {
    EpochMetrics m = train_epoch(state, epoch);
    Matrix test_logits = predict_logits(state.model, bundle.test_graph);
    m.test_loss = ad::weighted_cross_entropy_value(test_logits, bundle.test_graph.labels(), test_weights,
                                                   bundle.test_eval_mask);
    r.train_loss.push_back(m.train_loss);
    r.test_loss.push_back(m.test_loss);
    r.edges_used.push_back(m.edges_used);
    r.dropped.push_back(m.dropped);
    r.eligible.push_back(m.eligible);
    r.thresholds.push_back(m.threshold);
    r.expected_drop.push_back(m.expected_drop);
    r.epoch_seconds.push_back(m.wall_seconds);
    total += m.wall_seconds;
    if (epoch == cfg.epochs_total) {
      r.test = evaluate_logits(test_logits, bundle.test_graph.labels(), bundle.test_eval_mask);
    }
  }
  r.valid = evaluate(state.model, bundle.valid_graph, bundle.valid_eval_mask);
  r.total_minutes = total / 60.0;
  return r;
}

/// Runs every seed; with compare_oes both variants run back to back per
/// seed. Variants are reported baseline first, seeds in config order.
inline MetricsReport run_experiment(const RunConfig& cfg, const data::DatasetBundle& bundle,
                                    const std::string& label = "base") {
  cfg.validate();
  MetricsReport rep;
  rep.label = label;
  rep.config = to_config_text(cfg);
  rep.epochs_total = cfg.epochs_total;
  std::vector<bool> modes;
  if (cfg.compare_oes) modes = {false, true};
  else modes = {cfg.oes.has_value()};
  for (bool m : modes) rep.variants.push_back({m ? "oes" : "baseline", m, {}});
  for (std::uint64_t seed : cfg.seeds) {
    for (std::size_t v = 0; v < modes.size(); ++v) {
      try {
        rep.variants[v].seeds.push_back(run_seed(cfg, bundle, seed, modes[v]));
      } catch (const std::exception& e) {
        throw RunError("seed " + std::to_string(seed) + " (" + rep.variants[v].name + "): " + e.what());
      }
    }
  }
  return rep;
}

inline MetricsReport run_experiment(const RunConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_dataset(cfg.data));
}

enum class SweepAxis { depth, percentile, ratio, epochs };

inline SweepAxis parse_sweep_axis(const std::string& s) {
  if (s == "depth") return SweepAxis::depth;
  if (s == "percentile") return SweepAxis::percentile;
  if (s == "ratio") return SweepAxis::ratio;
  if (s == "epochs") return SweepAxis::epochs;
  throw ConfigError("unknown sweep axis '" + s + "' (depth, percentile, ratio, epochs)");
}

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::depth: return "depth";
    case SweepAxis::percentile: return "percentile";
    case SweepAxis::ratio: return "ratio";
    case SweepAxis::epochs: return "epochs";
  }
  return "?";
}

/// Base config with one field replaced. `ratio` values are percentages;
/// `epochs` sets the number of active OES epochs.
inline RunConfig sweep_point(RunConfig base, SweepAxis axis, double value) {
  auto as_count = [&] {
    if (!(value >= 0.0) || value != std::floor(value)) {
      throw ConfigError(std::string(to_string(axis)) + " sweep value must be a non-negative integer");
    }
    return static_cast<std::size_t>(value);
  };
  switch (axis) {
    case SweepAxis::depth: base.model.depth = as_count(); break;
    case SweepAxis::percentile:
      if (!base.oes) base.oes = OesConfig{};
      base.oes->percentile = value;
      break;
    case SweepAxis::ratio:
      if (!base.oes) base.oes = OesConfig{};
      base.oes->sample_ratio = value / 100.0;
      break;
    case SweepAxis::epochs:
      if (!base.oes) base.oes = OesConfig{};
      base.oes->active_epochs = as_count();
      break;
  }
  base.validate();
  return base;
}

inline std::string format_value(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

inline std::vector<MetricsReport> sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values,
                                        const data::DatasetBundle& bundle) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<RunConfig> points;
  for (double v : values) points.push_back(sweep_point(base, axis, v));
  std::vector<MetricsReport> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.push_back(run_experiment(points[i], bundle, std::string(to_string(axis)) + "=" + format_value(values[i])));
  }
  return out;
}

}  // namespace oes
