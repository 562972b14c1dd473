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

// Reference implementations used only by tests. They share no code with the
// library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;
using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

inline Dense zeros(std::size_t r, std::size_t c) { return Dense(r, std::vector<double>(c, 0.0)); }

/// Symmetrized unit weights: u->v adds one to both (u,v) and (v,u); a
/// self-loop adds one to the diagonal.
inline Dense sym_weights(std::size_t n, const EdgeList& edges) {
  Dense w = zeros(n, n);
  for (auto [u, v] : edges) {
    if (u == v) {
      w[u][u] += 1.0;
    } else {
      w[u][v] += 1.0;
      w[v][u] += 1.0;
    }
  }
  return w;
}

inline std::vector<double> augmented_degree(std::size_t n, const EdgeList& edges) {
  Dense w = sym_weights(n, edges);
  std::vector<double> d(n, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d[i] += w[i][j];
  return d;
}

inline Dense augmented_adjacency(std::size_t n, const EdgeList& edges) {
  Dense w = sym_weights(n, edges);
  for (std::size_t i = 0; i < n; ++i) w[i][i] += 1.0;
  std::vector<double> d = augmented_degree(n, edges);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w[i][j] /= std::sqrt(d[i] * d[j]);
  return w;
}

/// Cyclic Jacobi rotations; eigenvalues in descending order.
inline std::vector<double> jacobi_eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 200; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

inline std::vector<std::size_t> bfs_components(std::size_t n, const EdgeList& edges, std::size_t* count = nullptr) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<std::size_t> comp(n, SIZE_MAX);
  std::size_t c = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (comp[s] != SIZE_MAX) continue;
    std::vector<std::size_t> queue{s};
    comp[s] = c;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      for (std::size_t w : adj[queue[i]]) {
        if (comp[w] == SIZE_MAX) {
          comp[w] = c;
          queue.push_back(w);
        }
      }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

/// Solves a x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(Dense a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Effective resistance by grounding t inside the component of s.
inline double resistance(std::size_t n, const EdgeList& edges, std::size_t s, std::size_t t) {
  auto comp = bfs_components(n, edges);
  if (comp[s] != comp[t]) return std::numeric_limits<double>::infinity();
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> pos(n, SIZE_MAX);
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] == comp[s] && v != t) {
      pos[v] = nodes.size();
      nodes.push_back(v);
    }
  }
  Dense lap = zeros(nodes.size(), nodes.size());
  for (auto [u, v] : edges) {
    if (u == v) continue;
    if (pos[u] != SIZE_MAX) lap[pos[u]][pos[u]] += 1.0;
    if (pos[v] != SIZE_MAX) lap[pos[v]][pos[v]] += 1.0;
    if (pos[u] != SIZE_MAX && pos[v] != SIZE_MAX) {
      lap[pos[u]][pos[v]] -= 1.0;
      lap[pos[v]][pos[u]] -= 1.0;
    }
  }
  std::vector<double> b(nodes.size(), 0.0);
  b[pos[s]] = 1.0;
  return solve(lap, b)[pos[s]];
}

/// Smallest value v in the multiset with 100 * #{c <= v} >= p * n.
inline double percentile(const std::vector<double>& values, double p) {
  double best = std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(values.size());
  for (double v : values) {
    std::size_t count = 0;
    for (double c : values) count += c <= v;
    if (100.0 * static_cast<double>(count) >= p * n) best = std::min(best, v);
  }
  return best;
}

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f1 = 0;
};

inline Confusion confusion(const std::vector<int>& predicted, const std::vector<int>& actual) {
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == 1 && actual[i] == 1) ++c.tp;
    if (predicted[i] == 1 && actual[i] == 0) ++c.fp;
    if (predicted[i] == 0 && actual[i] == 1) ++c.fn;
    if (predicted[i] == 0 && actual[i] == 0) ++c.tn;
  }
  c.precision = c.tp + c.fp == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fp);
  c.recall = c.tp + c.fn == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fn);
  c.f1 = c.precision + c.recall == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
  return c;
}

/// Distance from h to span of sqrt(deg)-scaled component indicators, by
/// solving the normal equations of the least-squares fit per column.
inline double subspace_distance(const Dense& h, std::size_t n, const EdgeList& edges) {
  std::size_t m = 0;
  auto comp = bfs_components(n, edges, &m);
  auto deg = augmented_degree(n, edges);
  Dense basis = zeros(n, m);
  for (std::size_t v = 0; v < n; ++v) basis[v][comp[v]] = std::sqrt(deg[v]);
  Dense gram = zeros(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t v = 0; v < n; ++v) gram[i][j] += basis[v][i] * basis[v][j];
  double total = 0.0;
  const std::size_t cols = h.empty() ? 0 : h[0].size();
  for (std::size_t c = 0; c < cols; ++c) {
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t v = 0; v < n; ++v) rhs[i] += basis[v][i] * h[v][c];
    auto coef = solve(gram, rhs);
    for (std::size_t v = 0; v < n; ++v) {
      double fit = 0.0;
      for (std::size_t i = 0; i < m; ++i) fit += basis[v][i] * coef[i];
      total += (h[v][c] - fit) * (h[v][c] - fit);
    }
  }
  return std::sqrt(total);
}

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense out = zeros(a.size(), b.empty() ? 0 : b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < out[i].size(); ++j) out[i][j] += a[i][k] * b[k][j];
  return out;
}

/// True when the positive-edge subgraph has a directed simple cycle of
/// exactly `length` edges.
inline bool has_directed_cycle(std::size_t n, const EdgeList& edges, std::size_t length) {
  std::vector<std::vector<std::size_t>> out(n);
  for (auto [u, v] : edges) out[u].push_back(v);
  std::vector<char> on_path(n, 0);
  std::function<bool(std::size_t, std::size_t, std::size_t)> dfs = [&](std::size_t start, std::size_t v,
                                                                      std::size_t depth) {
    for (std::size_t w : out[v]) {
      if (w == start && depth + 1 == length) return true;
      if (w > start && !on_path[w] && depth + 1 < length) {
        on_path[w] = 1;
        bool found = dfs(start, w, depth + 1);
        on_path[w] = 0;
        if (found) return true;
      }
    }
    return false;
  };
  for (std::size_t s = 0; s < n; ++s) {
    on_path[s] = 1;
    bool found = dfs(s, s, 0);
    on_path[s] = 0;
    if (found) return true;
  }
  return false;
}

/// Random connected multigraph: a random tree plus extra edges with random
/// orientation; parallel edges allowed, self-loops optional.
inline EdgeList random_connected(std::mt19937_64& rng, std::size_t n, std::size_t extra, bool loops) {
  EdgeList edges;
  for (std::size_t v = 1; v < n; ++v) {
    std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
    if (rng() & 1) edges.push_back({u, v});
    else edges.push_back({v, u});
  }
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  for (std::size_t i = 0; i < extra; ++i) {
    std::size_t u = node(rng), v = node(rng);
    if (u == v && !loops) continue;
    edges.push_back({u, v});
  }
  return edges;
}

}  // namespace oracle
