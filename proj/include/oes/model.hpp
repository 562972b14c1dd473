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
#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oes/layers.hpp"
#include "oes/multigraph.hpp"
#include "oes/nn.hpp"
#include "oes/tensor.hpp"

namespace oes {

enum class ModelKind { gin, gin_ego, gin_eu };

/// How GIN+EGO assigns centers. `exact` extracts one ego net per node.
enum class EgoMode { self_centered, exact };

/// Whether GIN+EU runs its GN block after every layer or once up front.
enum class GnSchedule { per_layer, once };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::gin: return "GIN";
    case ModelKind::gin_ego: return "GIN_EGO";
    case ModelKind::gin_eu: return "GIN_EU";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  std::replace(s.begin(), s.end(), '+', '_');
  if (s == "GIN") return ModelKind::gin;
  if (s == "GIN_EGO" || s == "EGO") return ModelKind::gin_ego;
  if (s == "GIN_EU" || s == "EU") return ModelKind::gin_eu;
  throw ConfigError("unknown model kind '" + s + "'");
}

inline constexpr std::size_t kMinDepth = 2;
inline constexpr std::size_t kMaxDepth = 16;

struct ModelConfig {
  ModelKind kind = ModelKind::gin;
  std::size_t depth = 2;
  std::size_t hidden = 64;
  std::size_t node_in = 0;
  std::size_t edge_in = 0;
  double epsilon = 0.0;
  bool learnable_epsilon = false;
  bool edge_mix = true;
  bool readout_edge_features = true;
  // Per-layer wrapper: h <- residual ? (h + act(bn(z))) / 2 : act(bn(z))
  bool batch_norm = true;
  bool layer_relu = true;
  bool residual = true;
  EgoMode ego_mode = EgoMode::self_centered;
  std::size_t ego_hops = 0;  // 0 means "same as depth"
  Reachability ego_reachability = Reachability::undirected;
  GnSchedule gn_schedule = GnSchedule::per_layer;
};

/// Encoders, message-passing layers and the edge readout for one backbone.
class ModelStack {
 public:
  static ModelStack create(const ModelConfig& cfg, std::uint64_t seed) {
    if (cfg.depth < kMinDepth || cfg.depth > kMaxDepth) {
      throw ConfigError("depth " + std::to_string(cfg.depth) + " outside [2, 16]");
    }
    if (cfg.hidden == 0) throw ConfigError("hidden dimension must be positive");
    ModelStack s;
    s.config_ = cfg;
    std::mt19937_64 rng(seed);
    const std::size_t d = cfg.hidden;
    s.node_encoder_ = {"encode.node", {cfg.node_in, d}, ad::Activation::relu, ad::Activation::identity};
    s.edge_encoder_ = {"encode.edge", {cfg.edge_in, d}, ad::Activation::relu, ad::Activation::identity};
    ad::init_mlp(s.params_, s.node_encoder_, rng);
    ad::init_mlp(s.params_, s.edge_encoder_, rng);
    for (std::size_t k = 0; k < cfg.depth; ++k) {
      std::string name = "layer" + std::to_string(k);
      if (cfg.kind == ModelKind::gin_ego) {
        EgoGinLayer l = EgoGinLayer::make(name, d, d, cfg.edge_mix);
        l.base.epsilon = cfg.epsilon;
        l.base.learnable_epsilon = cfg.learnable_epsilon;
        l.init(s.params_, rng);
        s.ego_layers_.push_back(std::move(l));
      } else {
        GinLayer l = GinLayer::make(name, d, d, cfg.edge_mix);
        l.epsilon = cfg.epsilon;
        l.learnable_epsilon = cfg.learnable_epsilon;
        l.init(s.params_, rng);
        s.gin_layers_.push_back(std::move(l));
      }
      if (cfg.kind == ModelKind::gin_eu && (cfg.gn_schedule == GnSchedule::per_layer || k == 0)) {
        GnBlock b = GnBlock::make("gn" + std::to_string(k), d);
        b.init(s.params_, rng);
        s.gn_blocks_.push_back(std::move(b));
      }
    }
    std::size_t readout_in = (cfg.readout_edge_features ? 3 : 2) * d;
    s.readout_hidden_ = {"readout.m", {readout_in, d}, ad::Activation::relu, ad::Activation::relu};
    s.readout_out_ = {"readout.sigma", {d, 2}, ad::Activation::relu, ad::Activation::identity};
    ad::init_mlp(s.params_, s.readout_hidden_, rng);
    ad::init_mlp(s.params_, s.readout_out_, rng);
    return s;
  }

  const ModelConfig& config() const { return config_; }
  ad::ParameterSet& params() { return params_; }
  const ad::ParameterSet& params() const { return params_; }
  const std::vector<GinLayer>& gin_layers() const { return gin_layers_; }
  const std::vector<EgoGinLayer>& ego_layers() const { return ego_layers_; }
  const std::vector<GnBlock>& gn_blocks() const { return gn_blocks_; }
  const MlpSpec& node_encoder() const { return node_encoder_; }
  const MlpSpec& edge_encoder() const { return edge_encoder_; }
  const MlpSpec& readout_hidden() const { return readout_hidden_; }
  const MlpSpec& readout_out() const { return readout_out_; }
  std::size_t layer_count() const { return gin_layers_.size() + ego_layers_.size(); }

  /// Names of the weight matrices of the message-passing layers.
  std::vector<std::string> layer_weight_names() const {
    std::vector<std::string> out;
    auto add_mlp = [&](const MlpSpec& m) {
      for (std::size_t i = 0; i < m.layer_count(); ++i) out.push_back(m.weight(i));
    };
    for (const auto& l : gin_layers_) add_mlp(l.update_net);
    for (const auto& l : ego_layers_) {
      add_mlp(l.base.update_net);
      add_mlp(l.theta_unlabeled);
      add_mlp(l.theta_labeled);
    }
    return out;
  }

 private:
  ModelConfig config_;
  ad::ParameterSet params_;
  MlpSpec node_encoder_, edge_encoder_, readout_hidden_, readout_out_;
  std::vector<GinLayer> gin_layers_;
  std::vector<EgoGinLayer> ego_layers_;
  std::vector<GnBlock> gn_blocks_;
};

struct ForwardPass {
  Tensor logits;  // |E| x 2, columns (negative, positive)
  Tensor nodes;   // final node embeddings
  Tensor edges;   // final edge representation used by the readout
};

/// Positive only when its logit is strictly larger; ties go negative.
inline Label predict_label(double negative_logit, double positive_logit) {
  return positive_logit > negative_logit ? Label::positive : Label::negative;
}

inline std::vector<Label> predict_labels(const Matrix& logits) {
  std::vector<Label> out(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out[static_cast<std::size_t>(i)] =
        predict_label(logits(i, ad::kNegativeColumn), logits(i, ad::kPositiveColumn));
  }
  return out;
}

/// Per edge (u, v): sigma(m([a(u), a(v), h(u,v)])).
inline Tensor edge_readout(ParamBinding& bind, const ModelStack& stack, const DirectedMultigraph& g,
                           const Tensor& h, const Tensor& edge_h) {
  std::vector<Tensor> parts{ad::gather_rows(h, g.sources()), ad::gather_rows(h, g.targets())};
  if (stack.config().readout_edge_features) parts.push_back(edge_h);
  Tensor hidden = ad::mlp_apply(bind, ad::concat_cols(parts), stack.readout_hidden());
  return ad::mlp_apply(bind, hidden, stack.readout_out());
}

/// The per-layer wrapper applied to every message-passing output.
inline Tensor layer_update(const ModelConfig& cfg, const Tensor& prev, const Tensor& z) {
  Tensor y = cfg.batch_norm ? ad::batch_norm(z) : z;
  if (cfg.layer_relu) y = ad::relu(y);
  return cfg.residual ? ad::scale(ad::add(prev, y), 0.5) : y;
}

namespace detail {

inline Tensor encode_nodes(ParamBinding& bind, const ModelStack& s, const DirectedMultigraph& g) {
  return ad::mlp_apply(bind, bind.tape().constant(g.node_features()), s.node_encoder());
}

inline Tensor encode_edges(ParamBinding& bind, const ModelStack& s, const DirectedMultigraph& g) {
  return ad::mlp_apply(bind, bind.tape().constant(g.edge_features()), s.edge_encoder());
}

/// Runs the ego stack on one ego net and returns the center's embedding row.
inline Tensor ego_center_embedding(ParamBinding& bind, const ModelStack& s, const EgoNetwork& ego) {
  Tensor h = encode_nodes(bind, s, ego.subgraph);
  Tensor e = encode_edges(bind, s, ego.subgraph);
  for (const auto& layer : s.ego_layers()) {
    h = layer_update(s.config(), h, ego_forward(bind, layer, ego.subgraph, h, &e, ego.center_mark));
  }
  std::vector<std::size_t> center{ego.center_local_index};
  return ad::gather_rows(h, center);
}

}  // namespace detail

/// encode -> depth message-passing layers -> edge readout.
inline ForwardPass model_forward(ModelStack& stack, const DirectedMultigraph& g, ad::Tape& tape) {
  const ModelConfig& cfg = stack.config();
  if (static_cast<std::size_t>(g.node_features().cols()) != cfg.node_in ||
      static_cast<std::size_t>(g.edge_features().cols()) != cfg.edge_in) {
    throw ShapeError("graph feature widths (" + std::to_string(g.node_features().cols()) + ", " +
                     std::to_string(g.edge_features().cols()) + ") do not match the model (" +
                     std::to_string(cfg.node_in) + ", " + std::to_string(cfg.edge_in) + ")");
  }
  ParamBinding bind(tape, stack.params());
  Tensor h = detail::encode_nodes(bind, stack, g);
  Tensor e = detail::encode_edges(bind, stack, g);

  if (cfg.kind == ModelKind::gin_ego && cfg.ego_mode == EgoMode::exact) {
    std::size_t hops = cfg.ego_hops ? cfg.ego_hops : cfg.depth;
    std::vector<Tensor> rows;
    rows.reserve(g.node_count());
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      rows.push_back(detail::ego_center_embedding(bind, stack, ego_network(g, v, hops, cfg.ego_reachability)));
    }
    if (!rows.empty()) h = ad::concat_rows(rows);
  } else if (cfg.kind == ModelKind::gin_ego) {
    for (const auto& layer : stack.ego_layers()) {
      h = layer_update(cfg, h, ego_forward_self_centered(bind, layer, g, h, &e));
    }
  } else {
    Tensor global = tape.constant(Matrix::Zero(1, static_cast<Eigen::Index>(cfg.hidden)));
    auto run_gn = [&](const GnBlock& block) {
      GnOutput out = gn_block_forward(bind, block, g, h, e, global);
      e = cfg.residual ? ad::scale(ad::add(e, out.edges), 0.5) : out.edges;
      global = out.global;
    };
    for (std::size_t k = 0; k < stack.gin_layers().size(); ++k) {
      if (cfg.kind == ModelKind::gin_eu && cfg.gn_schedule == GnSchedule::once && k == 0) {
        run_gn(stack.gn_blocks().front());
      }
      h = layer_update(cfg, h, gin_forward(bind, stack.gin_layers()[k], g, h, &e));
      if (cfg.kind == ModelKind::gin_eu && cfg.gn_schedule == GnSchedule::per_layer) {
        run_gn(stack.gn_blocks()[k]);
      }
    }
  }
  Tensor logits = edge_readout(bind, stack, g, h, e);
  return {logits, h, e};
}

/// Forward pass without keeping the tape; returns the |E| x 2 logits.
inline Matrix predict_logits(ModelStack& stack, const DirectedMultigraph& g) {
  ad::Tape tape;
  return model_forward(stack, g, tape).logits.value();
}

}  // namespace oes
