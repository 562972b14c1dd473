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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oes/common.hpp"

namespace oes {

enum class Label : std::uint8_t { negative = 0, positive = 1 };

enum class Direction { in, out };

/// Reachability rule used when growing ego networks.
enum class Reachability { undirected, directed_in, directed_out };

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One entry of a neighbor index: the node on the other end and the edge id.
struct Incidence {
  std::size_t neighbor = 0;
  std::size_t edge_id = 0;
  friend bool operator==(const Incidence&, const Incidence&) = default;
};

inline constexpr std::size_t kRemoved = std::numeric_limits<std::size_t>::max();

/// Directed multigraph with parallel edges, dense edge ids, and node/edge
/// feature matrices. Immutable once built; "mutation" returns a new graph.
class DirectedMultigraph {
 public:
  DirectedMultigraph() = default;

  /// Edge ids are the input positions. Empty feature matrices (0 columns)
  /// are accepted; row counts must match N and |E| otherwise.
  static DirectedMultigraph build(std::size_t node_count, std::vector<Edge> edges,
                                  Matrix node_features, Matrix edge_features,
                                  std::vector<Label> edge_labels) {
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].src >= node_count || edges[e].dst >= node_count) {
        throw GraphError("edge " + std::to_string(e) + " (" + std::to_string(edges[e].src) +
                         " -> " + std::to_string(edges[e].dst) + ") references a node >= " +
                         std::to_string(node_count));
      }
    }
    if (node_features.size() == 0 && node_features.rows() != static_cast<Eigen::Index>(node_count)) {
      node_features.resize(static_cast<Eigen::Index>(node_count), 0);
    }
    if (edge_features.size() == 0 && edge_features.rows() != static_cast<Eigen::Index>(edges.size())) {
      edge_features.resize(static_cast<Eigen::Index>(edges.size()), 0);
    }
    if (edge_labels.empty() && !edges.empty()) edge_labels.assign(edges.size(), Label::negative);
    if (node_features.rows() != static_cast<Eigen::Index>(node_count)) {
      throw ShapeError("node feature rows " + std::to_string(node_features.rows()) +
                       " != node count " + std::to_string(node_count));
    }
    if (edge_features.rows() != static_cast<Eigen::Index>(edges.size())) {
      throw ShapeError("edge feature rows " + std::to_string(edge_features.rows()) +
                       " != edge count " + std::to_string(edges.size()));
    }
    if (edge_labels.size() != edges.size()) {
      throw ShapeError("edge label count " + std::to_string(edge_labels.size()) +
                       " != edge count " + std::to_string(edges.size()));
    }
    DirectedMultigraph g;
    g.node_count_ = node_count;
    g.edges_ = std::move(edges);
    g.node_features_ = std::move(node_features);
    g.edge_features_ = std::move(edge_features);
    g.labels_ = std::move(edge_labels);
    g.build_index();
    return g;
  }

  /// Structure-only graph: no features, every label negative.
  static DirectedMultigraph from_edges(std::size_t node_count, std::vector<Edge> edges) {
    return build(node_count, std::move(edges), Matrix(), Matrix(), {});
  }

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const {
    if (e >= edges_.size()) throw IndexError("edge id " + std::to_string(e) + " out of range");
    return edges_[e];
  }
  const Matrix& node_features() const { return node_features_; }
  const Matrix& edge_features() const { return edge_features_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<std::size_t>& sources() const { return src_; }
  const std::vector<std::size_t>& targets() const { return dst_; }

  /// Neighbor multiset in ascending edge-id order.
  std::span<const Incidence> neighbors(std::size_t v, Direction dir) const {
    check_node(v);
    const auto& offsets = dir == Direction::in ? in_offsets_ : out_offsets_;
    const auto& entries = dir == Direction::in ? in_index_ : out_index_;
    return {entries.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::size_t in_degree(std::size_t v) const { return neighbors(v, Direction::in).size(); }
  std::size_t out_degree(std::size_t v) const { return neighbors(v, Direction::out).size(); }

  std::size_t positive_count() const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), Label::positive));
  }

  DirectedMultigraph with_features(Matrix node_features, Matrix edge_features) const {
    return build(node_count_, edges_, std::move(node_features), std::move(edge_features), labels_);
  }

 private:
  void check_node(std::size_t v) const {
    if (v >= node_count_) {
      throw IndexError("node " + std::to_string(v) + " out of range (N=" +
                       std::to_string(node_count_) + ")");
    }
  }

  // CSR-style buckets; edges are visited in id order so each bucket is sorted.
  void build_index() {
    in_offsets_.assign(node_count_ + 1, 0);
    out_offsets_.assign(node_count_ + 1, 0);
    src_.resize(edges_.size());
    dst_.resize(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      src_[e] = edges_[e].src;
      dst_[e] = edges_[e].dst;
      ++in_offsets_[edges_[e].dst + 1];
      ++out_offsets_[edges_[e].src + 1];
    }
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    in_index_.resize(edges_.size());
    out_index_.resize(edges_.size());
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      in_index_[in_fill[edges_[e].dst]++] = {edges_[e].src, e};
      out_index_[out_fill[edges_[e].src]++] = {edges_[e].dst, e};
    }
  }

  std::size_t node_count_ = 0;
  std::vector<Edge> edges_;
  Matrix node_features_;
  Matrix edge_features_;
  std::vector<Label> labels_;
  std::vector<std::size_t> src_, dst_;
  std::vector<std::size_t> in_offsets_{0}, out_offsets_{0};
  std::vector<Incidence> in_index_, out_index_;
};

/// k-hop ego network around a center, with the center flagged.
struct EgoNetwork {
  DirectedMultigraph subgraph;
  std::size_t center_local_index = 0;
  std::size_t hop_radius = 0;
  std::vector<std::uint8_t> center_mark;
  std::vector<std::size_t> node_map;  // local -> original node id
  std::vector<std::size_t> edge_map;  // local -> original edge id
};

struct EdgeRemoval {
  DirectedMultigraph graph;
  std::vector<std::size_t> old_to_new;  // kRemoved for dropped edges
  std::vector<std::size_t> new_to_old;
};

struct Components {
  std::vector<std::size_t> component;  // dense ids in [0, count), first-seen order
  std::size_t count = 0;
};

inline std::span<const Incidence> neighbors(const DirectedMultigraph& g, std::size_t v,
                                            Direction dir) {
  return g.neighbors(v, dir);
}

namespace detail {

inline Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace detail

/// Induced subgraph on the nodes within k hops of v. Local node order is
/// ascending original id; local edge order is ascending original edge id.
inline EgoNetwork ego_network(const DirectedMultigraph& g, std::size_t v, std::size_t k,
                              Reachability rule = Reachability::undirected) {
  (void)g.neighbors(v, Direction::in);
  std::vector<std::size_t> dist(g.node_count(), kRemoved);
  std::queue<std::size_t> frontier;
  dist[v] = 0;
  frontier.push(v);
  while (!frontier.empty()) {
    std::size_t u = frontier.front();
    frontier.pop();
    if (dist[u] == k) continue;
    auto visit = [&](std::span<const Incidence> adj) {
      for (const auto& inc : adj) {
        if (dist[inc.neighbor] == kRemoved) {
          dist[inc.neighbor] = dist[u] + 1;
          frontier.push(inc.neighbor);
        }
      }
    };
    if (rule != Reachability::directed_in) visit(g.neighbors(u, Direction::out));
    if (rule != Reachability::directed_out) visit(g.neighbors(u, Direction::in));
  }

  EgoNetwork ego;
  ego.hop_radius = k;
  std::vector<std::size_t> local(g.node_count(), kRemoved);
  for (std::size_t u = 0; u < g.node_count(); ++u) {
    if (dist[u] != kRemoved) {
      local[u] = ego.node_map.size();
      ego.node_map.push_back(u);
    }
  }
  std::vector<Edge> edges;
  std::vector<Label> labels;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[e];
    if (local[ed.src] != kRemoved && local[ed.dst] != kRemoved) {
      edges.push_back({local[ed.src], local[ed.dst]});
      labels.push_back(g.labels()[e]);
      ego.edge_map.push_back(e);
    }
  }
  ego.center_local_index = local[v];
  ego.center_mark.assign(ego.node_map.size(), 0);
  ego.center_mark[ego.center_local_index] = 1;
  ego.subgraph = DirectedMultigraph::build(ego.node_map.size(), std::move(edges),
                                           detail::select_rows(g.node_features(), ego.node_map),
                                           detail::select_rows(g.edge_features(), ego.edge_map),
                                           std::move(labels));
  return ego;
}

/// Drops the given edge ids. Surviving edges keep relative order and get
/// dense new ids; duplicates in the input set are ignored.
inline EdgeRemoval remove_edges(const DirectedMultigraph& g, std::span<const std::size_t> edge_ids) {
  std::vector<std::uint8_t> drop(g.edge_count(), 0);
  for (std::size_t id : edge_ids) {
    if (id >= g.edge_count()) {
      throw IndexError("cannot remove unknown edge id " + std::to_string(id));
    }
    drop[id] = 1;
  }
  EdgeRemoval out;
  out.old_to_new.assign(g.edge_count(), kRemoved);
  std::vector<Edge> edges;
  std::vector<Label> labels;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (drop[e]) continue;
    out.old_to_new[e] = out.new_to_old.size();
    out.new_to_old.push_back(e);
    edges.push_back(g.edges()[e]);
    labels.push_back(g.labels()[e]);
  }
  out.graph = DirectedMultigraph::build(g.node_count(), std::move(edges), g.node_features(),
                                        detail::select_rows(g.edge_features(), out.new_to_old),
                                        std::move(labels));
  return out;
}

inline EdgeRemoval remove_edges(const DirectedMultigraph& g,
                                const std::vector<std::size_t>& edge_ids) {
  return remove_edges(g, std::span<const std::size_t>(edge_ids));
}

/// Weakly connected components (edge direction ignored).
inline Components connected_components(const DirectedMultigraph& g) {
  std::vector<std::size_t> parent(g.node_count());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const Edge& e : g.edges()) {
    std::size_t a = find(e.src), b = find(e.dst);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  Components out;
  out.component.assign(g.node_count(), kRemoved);
  std::vector<std::size_t> root_id(g.node_count(), kRemoved);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    std::size_t r = find(v);
    if (root_id[r] == kRemoved) root_id[r] = out.count++;
    out.component[v] = root_id[r];
  }
  return out;
}

}  // namespace oes
