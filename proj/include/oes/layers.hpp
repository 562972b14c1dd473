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
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oes/multigraph.hpp"
#include "oes/nn.hpp"
#include "oes/tensor.hpp"

namespace oes {

using ad::MlpSpec;
using ad::ParamBinding;
using ad::Tensor;

/// GIN update with an optional bias-free edge mix:
///   h'(v) = phi((1 + eps) h(v) + sum_{(u,e) in in(v)} (h(u) + h(e) W_mix))
struct GinLayer {
  std::string name;
  std::size_t hidden = 0;
  double epsilon = 0.0;
  bool learnable_epsilon = false;
  bool edge_mix = true;
  std::size_t edge_dim = 0;
  MlpSpec update_net;

  std::string epsilon_param() const { return name + ".eps"; }
  std::string mix_param() const { return name + ".edge_mix"; }

  static GinLayer make(std::string name, std::size_t hidden, std::size_t edge_dim,
                       bool edge_mix = true) {
    GinLayer l;
    l.name = std::move(name);
    l.hidden = hidden;
    l.edge_dim = edge_dim;
    l.edge_mix = edge_mix && edge_dim > 0;
    l.update_net = {l.name + ".phi", {hidden, hidden, hidden}, ad::Activation::relu,
                    ad::Activation::identity};
    return l;
  }

  void init(ad::ParameterSet& params, std::mt19937_64& rng) const {
    ad::init_mlp(params, update_net, rng);
    if (edge_mix) params.add(mix_param(), ad::glorot(edge_dim, hidden, rng));
    if (learnable_epsilon) params.add(epsilon_param(), Matrix::Constant(1, 1, epsilon));
  }
};

/// GIN layer whose messages pass through theta_1 when they originate at a
/// flagged center and theta_0 otherwise.
struct EgoGinLayer {
  GinLayer base;  // epsilon, edge mix, phi
  MlpSpec theta_unlabeled;
  MlpSpec theta_labeled;

  static EgoGinLayer make(std::string name, std::size_t hidden, std::size_t edge_dim,
                          bool edge_mix = true) {
    EgoGinLayer l;
    l.base = GinLayer::make(name, hidden, edge_dim, edge_mix);
    l.theta_unlabeled = {name + ".theta0", {hidden, hidden}, ad::Activation::relu,
                         ad::Activation::identity};
    l.theta_labeled = {name + ".theta1", {hidden, hidden}, ad::Activation::relu,
                       ad::Activation::identity};
    return l;
  }

  void init(ad::ParameterSet& params, std::mt19937_64& rng) const {
    base.init(params, rng);
    ad::init_mlp(params, theta_unlabeled, rng);
    ad::init_mlp(params, theta_labeled, rng);
  }
};

/// Edge -> node -> global update block with mean aggregators.
struct GnBlock {
  std::string name;
  std::size_t hidden = 0;
  MlpSpec edge_update;    // [h(u,v), h(u), h(v), g] -> hidden
  MlpSpec node_update;    // [mean incoming h'(u,v), h(v), g] -> hidden
  MlpSpec global_update;  // [mean h'(u,v), mean h'(v), g] -> hidden

  static GnBlock make(std::string name, std::size_t hidden) {
    GnBlock b;
    b.name = std::move(name);
    b.hidden = hidden;
    b.edge_update = {b.name + ".edge", {4 * hidden, hidden}, ad::Activation::relu, ad::Activation::relu};
    b.node_update = {b.name + ".node", {3 * hidden, hidden}, ad::Activation::relu, ad::Activation::relu};
    b.global_update = {b.name + ".global", {3 * hidden, hidden}, ad::Activation::relu,
                       ad::Activation::relu};
    return b;
  }

  void init(ad::ParameterSet& params, std::mt19937_64& rng) const {
    ad::init_mlp(params, edge_update, rng);
    ad::init_mlp(params, node_update, rng);
    ad::init_mlp(params, global_update, rng);
  }
};

struct GnOutput {
  Tensor edges;
  Tensor nodes;
  Tensor global;
};

namespace detail {

inline void check_rows(const Tensor& t, std::size_t rows, const char* what) {
  if (static_cast<std::size_t>(t.rows()) != rows) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + " rows, got " +
                     std::to_string(t.rows()));
  }
}

inline Tensor self_term(ParamBinding& bind, const GinLayer& layer, const Tensor& h) {
  if (layer.learnable_epsilon) return ad::add(h, ad::scale_by(h, bind(layer.epsilon_param())));
  if (layer.epsilon == 0.0) return h;
  return ad::scale(h, 1.0 + layer.epsilon);
}

/// sum over incoming edges of h(e) W_mix, or nothing when mixing is off.
inline std::optional<Tensor> mixed_edge_sum(ParamBinding& bind, const GinLayer& layer,
                                            const DirectedMultigraph& g, const Tensor* edge_h) {
  if (!layer.edge_mix || edge_h == nullptr) return std::nullopt;
  check_rows(*edge_h, g.edge_count(), "edge features");
  Tensor summed = ad::scatter_add_rows(*edge_h, g.targets(), g.node_count());
  return ad::matmul(summed, bind(layer.mix_param()));
}

}  // namespace detail

inline Tensor gin_forward(ParamBinding& bind, const GinLayer& layer, const DirectedMultigraph& g,
                          const Tensor& h, const Tensor* edge_h) {
  detail::check_rows(h, g.node_count(), "gin_forward node matrix");
  Tensor z = ad::add(detail::self_term(bind, layer, h),
                     ad::propagate(h, g.sources(), g.targets(), g.node_count()));
  if (auto mixed = detail::mixed_edge_sum(bind, layer, g, edge_h)) z = ad::add(z, *mixed);
  return ad::mlp_apply(bind, z, layer.update_net);
}

/// Exact ego mode: messages from nodes with center_mark = 1 use theta_1.
inline Tensor ego_forward(ParamBinding& bind, const EgoGinLayer& layer, const DirectedMultigraph& g,
                          const Tensor& h, const Tensor* edge_h,
                          std::span<const std::uint8_t> center_mark) {
  detail::check_rows(h, g.node_count(), "ego_forward node matrix");
  if (center_mark.size() != g.node_count()) throw ShapeError("ego_forward: center mark length");
  if (std::count(center_mark.begin(), center_mark.end(), std::uint8_t{1}) == 0) {
    throw ConfigError("ego_forward: no node carries the center flag");
  }
  Tensor m0 = ad::mlp_apply(bind, h, layer.theta_unlabeled);
  Tensor m1 = ad::mlp_apply(bind, h, layer.theta_labeled);
  Tensor messages = ad::select_rows(m0, m1, center_mark);
  Tensor z = ad::add(detail::self_term(bind, layer.base, h),
                     ad::propagate(messages, g.sources(), g.targets(), g.node_count()));
  if (auto mixed = detail::mixed_edge_sum(bind, layer.base, g, edge_h)) z = ad::add(z, *mixed);
  return ad::mlp_apply(bind, z, layer.base.update_net);
}

inline Tensor ego_forward(ParamBinding& bind, const EgoGinLayer& layer, const EgoNetwork& ego,
                          const Tensor& h, const Tensor* edge_h = nullptr) {
  return ego_forward(bind, layer, ego.subgraph, h, edge_h, ego.center_mark);
}

/// Full-graph approximation: every node is the center of its own ego net,
/// so only information that never left the node (the self term and
/// self-loop transfers) goes through theta_1.
inline Tensor ego_forward_self_centered(ParamBinding& bind, const EgoGinLayer& layer,
                                        const DirectedMultigraph& g, const Tensor& h,
                                        const Tensor* edge_h) {
  detail::check_rows(h, g.node_count(), "ego_forward node matrix");
  Tensor m0 = ad::mlp_apply(bind, h, layer.theta_unlabeled);
  Tensor m1 = ad::mlp_apply(bind, h, layer.theta_labeled);
  std::vector<std::size_t> src0, dst0, src1, dst1;
  for (const Edge& e : g.edges()) {
    auto& s = e.src == e.dst ? src1 : src0;
    auto& d = e.src == e.dst ? dst1 : dst0;
    s.push_back(e.src);
    d.push_back(e.dst);
  }
  Tensor z = ad::add(detail::self_term(bind, layer.base, m1),
                     ad::propagate(m0, src0, dst0, g.node_count()));
  if (!src1.empty()) z = ad::add(z, ad::propagate(m1, src1, dst1, g.node_count()));
  if (auto mixed = detail::mixed_edge_sum(bind, layer.base, g, edge_h)) z = ad::add(z, *mixed);
  return ad::mlp_apply(bind, z, layer.base.update_net);
}

/// Runs the six block steps in order: edge update, per-receiver mean, node
/// update, global edge mean, global node mean, global update.
inline GnOutput gn_block_forward(ParamBinding& bind, const GnBlock& block,
                                 const DirectedMultigraph& g, const Tensor& h,
                                 const Tensor& edge_h, const Tensor& global) {
  detail::check_rows(h, g.node_count(), "gn_block node matrix");
  detail::check_rows(edge_h, g.edge_count(), "gn_block edge matrix");
  detail::check_rows(global, 1, "gn_block global attribute");
  const std::size_t n = g.node_count(), m = g.edge_count();

  Tensor edge_in = ad::concat_cols({edge_h, ad::gather_rows(h, g.sources()),
                                    ad::gather_rows(h, g.targets()), ad::broadcast_rows(global, m)});
  Tensor edge_new = ad::mlp_apply(bind, edge_in, block.edge_update);
  Tensor incoming = ad::scatter_mean_rows(edge_new, g.targets(), n);
  Tensor node_in = ad::concat_cols({incoming, h, ad::broadcast_rows(global, n)});
  Tensor node_new = ad::mlp_apply(bind, node_in, block.node_update);
  Tensor edge_agg = ad::mean_rows(edge_new);
  Tensor node_agg = ad::mean_rows(node_new);
  Tensor global_new =
      ad::mlp_apply(bind, ad::concat_cols({edge_agg, node_agg, global}), block.global_update);
  return {edge_new, node_new, global_new};
}

}  // namespace oes
