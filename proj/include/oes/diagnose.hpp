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
#include <optional>
#include <vector>

#include <json.hpp>

#include "oes/experiment.hpp"
#include "oes/report.hpp"
#include "oes/spectral.hpp"

namespace oes {

struct DepthDiagnosis {
  std::size_t depth = 0;
  double weight_norm = 0.0;   // s: largest spectral norm over layer weights
  double d_m_input = 0.0;     // of the encoded node features
  double d_m_output = 0.0;    // of the final node embeddings
  std::optional<long> l_hat;  // from d_m_input, s and lambda
};

struct Diagnosis {
  std::size_t epoch = 0;  // training epochs applied before the graph was taken
  std::size_t nodes = 0, edges = 0, components = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  std::vector<DepthDiagnosis> depths;
};

/// Spectral summary of `g` plus, per depth, the subspace distance of an
/// initialized model's embeddings.
inline Diagnosis diagnose(const RunConfig& cfg, const DirectedMultigraph& g, const std::vector<std::size_t>& depths,
                          double epsilon, std::uint64_t seed) {
  spectral::check_size(g);
  Diagnosis d;
  d.nodes = g.node_count();
  d.edges = g.edge_count();
  d.epsilon = epsilon;
  d.lambda = spectral::second_largest_eigenvalue(g);
  spectral::SubspaceBasis basis = spectral::subspace_basis(g);
  d.components = basis.dimension();
  for (std::size_t depth : depths) {
    ModelConfig mc = cfg.model;
    mc.depth = depth;
    mc.node_in = static_cast<std::size_t>(g.node_features().cols());
    mc.edge_in = static_cast<std::size_t>(g.edge_features().cols());
    ModelStack model = ModelStack::create(mc, seed);
    DepthDiagnosis row;
    row.depth = depth;
    for (const auto& name : model.layer_weight_names()) {
      row.weight_norm = std::max(row.weight_norm, spectral::spectral_norm(model.params().at(name).value));
    }
    ad::Tape tape;
    ForwardPass fp = model_forward(model, g, tape);
    {
      ad::Tape enc;
      ad::ParamBinding bind(enc, model.params());
      Matrix h0 = detail::encode_nodes(bind, model, g).value();
      row.d_m_input = spectral::subspace_distance(Eigen::MatrixXd(h0), basis);
    }
    row.d_m_output = spectral::subspace_distance(Eigen::MatrixXd(fp.nodes.value()), basis);
    row.l_hat = row.d_m_input > 0.0 && row.weight_norm > 0.0
                    ? spectral::relaxed_smoothing_layer(row.d_m_input, epsilon, row.weight_norm, d.lambda)
                    : std::optional<long>(0);
    d.depths.push_back(row);
  }
  return d;
}

inline nlohmann::json diagnosis_to_json(const Diagnosis& d) {
  nlohmann::json j = {{"epoch", d.epoch}, {"nodes", d.nodes}, {"edges", d.edges}, {"components", d.components},
                      {"lambda", d.lambda}, {"epsilon", d.epsilon}, {"depths", nlohmann::json::array()}};
  for (const auto& r : d.depths) {
    j["depths"].push_back({{"depth", r.depth},
                           {"weight_norm", r.weight_norm},
                           {"d_m_input", r.d_m_input},
                           {"d_m_output", r.d_m_output},
                           {"l_hat", r.l_hat ? nlohmann::json(*r.l_hat) : nlohmann::json(nullptr)}});
  }
  return j;
}

/// Rows for the input training graph (epoch 0) and, when `train_epochs` is
/// positive, for the graph an OES-enabled run trains on after that many
/// epochs.
inline std::vector<Diagnosis> diagnose_over_training(const RunConfig& cfg, const DirectedMultigraph& train_graph,
                                                     const std::vector<std::size_t>& depths, double epsilon,
                                                     std::uint64_t seed, std::size_t train_epochs) {
  std::vector<Diagnosis> out{diagnose(cfg, train_graph, depths, epsilon, seed)};
  if (train_epochs == 0) return out;
  TrainState state = TrainState::create(cfg, train_graph, seed, true);
  for (std::size_t epoch = 1; epoch <= train_epochs; ++epoch) train_epoch(state, epoch);
  out.push_back(diagnose(cfg, state.current, depths, epsilon, seed));
  out.back().epoch = train_epochs;
  return out;
}

/// Columns: epoch,depth,nodes,edges,components,lambda,epsilon,weight_norm,
/// d_m_input,d_m_output,l_hat (empty when unbounded)
inline std::string diagnoses_to_csv(const std::vector<Diagnosis>& rows) {
  std::string out = "epoch,depth,nodes,edges,components,lambda,epsilon,weight_norm,d_m_input,d_m_output,l_hat\n";
  for (const auto& d : rows) {
    for (const auto& r : d.depths) {
      out += std::to_string(d.epoch) + ',' + std::to_string(r.depth) + ',' + std::to_string(d.nodes) + ',' +
             std::to_string(d.edges) + ',' + std::to_string(d.components) + ',' + detail::num(d.lambda) + ',' +
             detail::num(d.epsilon) + ',' + detail::num(r.weight_norm) + ',' + detail::num(r.d_m_input) + ',' +
             detail::num(r.d_m_output) + ',' + (r.l_hat ? std::to_string(*r.l_hat) : std::string()) + '\n';
    }
  }
  return out;
}

}  // namespace oes
