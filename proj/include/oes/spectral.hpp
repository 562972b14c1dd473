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
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oes/common.hpp"
#include "oes/multigraph.hpp"

namespace oes::spectral {

/// Dense diagnostics are O(N^3); larger graphs are rejected.
inline constexpr std::size_t kMaxDenseNodes = 2000;

inline void check_size(const DirectedMultigraph& g) {
  if (g.node_count() > kMaxDenseNodes) {
    throw ConfigError("spectral diagnostics are dense and limited to " +
                      std::to_string(kMaxDenseNodes) + " nodes; graph has " +
                      std::to_string(g.node_count()));
  }
}

/// Symmetrized edge-count matrix: each directed edge u->v adds 1 to W[u][v]
/// and W[v][u]; a self-loop adds 1 to W[v][v].
inline Eigen::MatrixXd symmetric_weights(const DirectedMultigraph& g) {
  check_size(g);
  auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    auto u = static_cast<Eigen::Index>(e.src), v = static_cast<Eigen::Index>(e.dst);
    w(u, v) += 1.0;
    if (u != v) w(v, u) += 1.0;
  }
  return w;
}

/// Degrees of A + I.
inline Eigen::VectorXd augmented_degrees(const DirectedMultigraph& g) {
  return symmetric_weights(g).rowwise().sum().array() + 1.0;
}

/// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
inline Eigen::MatrixXd augmented_normalized_adjacency(const DirectedMultigraph& g) {
  Eigen::MatrixXd a = symmetric_weights(g);
  a.diagonal().array() += 1.0;
  Eigen::VectorXd inv_sqrt = a.rowwise().sum().array().rsqrt();
  return inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
}

/// Eigenvalues of the augmented normalized adjacency, descending.
inline std::vector<double> spectrum(const DirectedMultigraph& g) {
  if (g.node_count() == 0) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(augmented_normalized_adjacency(g),
                                                        Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Second largest eigenvalue; a single node has no second direction and
/// reports 0. Every component contributes an eigenvalue of exactly 1, so a
/// disconnected graph reports 1 without rounding.
inline double second_largest_eigenvalue(const DirectedMultigraph& g) {
  if (g.node_count() == 0) throw ConfigError("second_largest_eigenvalue: empty graph");
  check_size(g);
  if (connected_components(g).count > 1) return 1.0;
  auto ev = spectrum(g);
  return ev.size() < 2 ? 0.0 : ev[1];
}

/// Combinatorial Laplacian of the symmetrized multigraph (loops ignored).
inline Eigen::MatrixXd laplacian(const DirectedMultigraph& g) {
  Eigen::MatrixXd w = symmetric_weights(g);
  w.diagonal().setZero();
  Eigen::MatrixXd l = -w;
  l.diagonal() = w.rowwise().sum();
  return l;
}

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via its
/// eigendecomposition.
inline Eigen::MatrixXd symmetric_pseudoinverse(const Eigen::MatrixXd& m, double rel_tol = 1e-10) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const auto& vals = solver.eigenvalues();
  double cutoff = rel_tol * std::max(1.0, vals.cwiseAbs().maxCoeff());
  Eigen::VectorXd inv = vals.unaryExpr([cutoff](double x) { return std::abs(x) > cutoff ? 1.0 / x : 0.0; });
  return solver.eigenvectors() * inv.asDiagonal() * solver.eigenvectors().transpose();
}

/// Effective resistances of one graph, sharing a single pseudoinverse.
class ResistanceTable {
 public:
  explicit ResistanceTable(const DirectedMultigraph& g)
      : components_(connected_components(g)), pinv_(symmetric_pseudoinverse(laplacian(g))) {}

  /// +inf across components; 0 for s == t.
  double operator()(std::size_t s, std::size_t t) const {
    if (s >= components_.component.size() || t >= components_.component.size()) {
      throw IndexError("effective_resistance: node out of range");
    }
    if (s == t) return 0.0;
    if (components_.component[s] != components_.component[t]) {
      return std::numeric_limits<double>::infinity();
    }
    auto a = static_cast<Eigen::Index>(s), b = static_cast<Eigen::Index>(t);
    return pinv_(a, a) + pinv_(b, b) - 2.0 * pinv_(a, b);
  }

  const Components& components() const { return components_; }

 private:
  Components components_;
  Eigen::MatrixXd pinv_;
};

inline double effective_resistance(const DirectedMultigraph& g, std::size_t s, std::size_t t) {
  if (s == t) throw ConfigError("effective_resistance: endpoints must differ");
  return ResistanceTable(g)(s, t);
}

/// Induced subgraph on one connected component.
inline DirectedMultigraph component_subgraph(const DirectedMultigraph& g, const Components& comps,
                                             std::size_t component) {
  std::vector<std::size_t> local(g.node_count(), kRemoved);
  std::size_t n = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    if (comps.component[v] == component) local[v] = n++;
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) {
    if (local[e.src] != kRemoved) edges.push_back({local[e.src], local[e.dst]});
  }
  return DirectedMultigraph::from_edges(n, std::move(edges));
}

struct Lemma1Result {
  double bound = 1.0;
  double lambda = 1.0;  // second largest eigenvalue of the pair's component
  double resistance = std::numeric_limits<double>::infinity();
  bool holds = true;
  bool cross_component = false;
};

inline constexpr double kLemmaTolerance = 1e-9;

/// 1 - (1/R_st)(1/d_s + 1/d_t) with augmented degrees.
inline double lemma1_value(double resistance, double deg_s, double deg_t) {
  if (std::isinf(resistance)) return 1.0;
  return 1.0 - (1.0 / resistance) * (1.0 / deg_s + 1.0 / deg_t);
}

/// Precomputes component eigenvalues, degrees and resistances for repeated
/// Lemma-1 queries on one graph.
class Lemma1Checker {
 public:
  explicit Lemma1Checker(const DirectedMultigraph& g)
      : resistances_(g), degrees_(augmented_degrees(g)) {
    const Components& comps = resistances_.components();
    lambdas_.resize(comps.count);
    for (std::size_t c = 0; c < comps.count; ++c) {
      lambdas_[c] = second_largest_eigenvalue(component_subgraph(g, comps, c));
    }
  }

  Lemma1Result operator()(std::size_t s, std::size_t t) const {
    if (s == t) throw ConfigError("lemma1_bound: endpoints must differ");
    Lemma1Result r;
    r.resistance = resistances_(s, t);
    const Components& comps = resistances_.components();
    if (comps.component[s] != comps.component[t]) {
      r.cross_component = true;
      r.bound = 1.0;
      r.lambda = 1.0;
      r.holds = true;
      return r;
    }
    r.lambda = lambdas_[comps.component[s]];
    r.bound = lemma1_value(r.resistance, degrees_(static_cast<Eigen::Index>(s)),
                           degrees_(static_cast<Eigen::Index>(t)));
    r.holds = r.lambda >= r.bound - kLemmaTolerance;
    return r;
  }

  const ResistanceTable& resistances() const { return resistances_; }
  double degree(std::size_t v) const { return degrees_(static_cast<Eigen::Index>(v)); }

 private:
  ResistanceTable resistances_;
  Eigen::VectorXd degrees_;
  std::vector<double> lambdas_;
};

inline Lemma1Result lemma1_bound(const DirectedMultigraph& g, std::size_t s, std::size_t t) {
  return Lemma1Checker(g)(s, t);
}

/// Orthonormal basis of the eigenvalue-1 eigenspace: one column per
/// component, sqrt(augmented degree) on its nodes.
struct SubspaceBasis {
  Eigen::MatrixXd basis;  // N x M
  std::size_t dimension() const { return static_cast<std::size_t>(basis.cols()); }
};

inline SubspaceBasis subspace_basis(const DirectedMultigraph& g) {
  Components comps = connected_components(g);
  Eigen::VectorXd deg = augmented_degrees(g);
  SubspaceBasis out;
  out.basis = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.node_count()),
                                    static_cast<Eigen::Index>(comps.count));
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    out.basis(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(comps.component[v])) =
        std::sqrt(deg(static_cast<Eigen::Index>(v)));
  }
  for (Eigen::Index c = 0; c < out.basis.cols(); ++c) out.basis.col(c).normalize();
  return out;
}

/// Frobenius norm of H - E E^T H.
inline double subspace_distance(const Eigen::MatrixXd& h, const SubspaceBasis& basis) {
  if (h.rows() != basis.basis.rows()) throw ShapeError("subspace_distance: row count mismatch");
  return (h - basis.basis * (basis.basis.transpose() * h)).norm();
}

inline double subspace_distance(const Matrix& h, const DirectedMultigraph& g) {
  return subspace_distance(Eigen::MatrixXd(h), subspace_basis(g));
}

/// ceil(log(eps / d_M) / log(s * lambda)); nullopt means unbounded (no
/// contraction guarantee).
inline std::optional<long> relaxed_smoothing_layer(double d_m, double epsilon, double s,
                                                   double lambda) {
  if (!(epsilon > 0.0)) throw ConfigError("relaxed_smoothing_layer: epsilon must be positive");
  if (!(d_m > 0.0)) throw ConfigError("relaxed_smoothing_layer: d_M must be positive");
  if (!(s > 0.0)) throw ConfigError("relaxed_smoothing_layer: s must be positive");
  if (epsilon >= d_m) return 0L;
  double rate = s * lambda;
  if (rate >= 1.0 || lambda <= 0.0) return std::nullopt;
  return static_cast<long>(std::ceil(std::log(epsilon / d_m) / std::log(rate)));
}

/// Largest singular value by power iteration on W^T W.
inline double spectral_norm(const Matrix& w, double tol = 1e-8, int max_iter = 10000) {
  if (w.size() == 0) return 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(w.cols(), 1.0, 2.0);
  x.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = w.transpose() * (w * x);
    double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    double next = std::sqrt(norm);
    if (std::abs(next - sigma) <= tol * std::max(1.0, next)) return next;
    sigma = next;
  }
  return sigma;
}

struct SmoothingReport {
  double lambda = 0.0;
  double s = 0.0;
  double d_m = 0.0;
  std::optional<long> l_hat;  // nullopt = unbounded
  std::size_t components = 0;
  double epsilon = 0.0;
};

inline SmoothingReport smoothing_report(const DirectedMultigraph& g, const Matrix& features,
                                        double s, double epsilon) {
  SmoothingReport r;
  r.lambda = second_largest_eigenvalue(g);
  r.s = s;
  SubspaceBasis basis = subspace_basis(g);
  r.components = basis.dimension();
  r.d_m = subspace_distance(Eigen::MatrixXd(features), basis);
  r.epsilon = epsilon;
  r.l_hat = r.d_m > 0.0 ? relaxed_smoothing_layer(r.d_m, epsilon, s, r.lambda) : std::optional<long>(0);
  return r;
}

/// d_M after each of `steps` linear propagations H <- A_hat H W.
inline std::vector<double> linear_propagation_distances(const DirectedMultigraph& g,
                                                        const Eigen::MatrixXd& h0,
                                                        const Eigen::MatrixXd& w,
                                                        std::size_t steps) {
  Eigen::MatrixXd a = augmented_normalized_adjacency(g);
  SubspaceBasis basis = subspace_basis(g);
  std::vector<double> out{subspace_distance(h0, basis)};
  Eigen::MatrixXd h = h0;
  for (std::size_t k = 0; k < steps; ++k) {
    h = a * h * w;
    out.push_back(subspace_distance(h, basis));
  }
  return out;
}

/// One removal step of the theorem check.
struct TheoremStep {
  std::size_t step = 0;
  std::size_t removed = 0;
  std::size_t components_before = 0, components_after = 0;
  std::size_t rank_gap_before = 0, rank_gap_after = 0;  // N - dim(M)
  double lambda_before = 0.0, lambda_after = 0.0;
  double d_m_before = 0.0, d_m_after = 0.0;
  std::optional<long> l_hat_before, l_hat_after;
  std::size_t tracked_pairs = 0;
  std::size_t resistance_violations = 0;
  std::size_t bound_violations = 0;
  double max_resistance_drop = 0.0;  // largest R_before - R_after seen
  double max_bound_rise = 0.0;       // largest bound_after - bound_before seen
  bool resistance_monotone = true;   // (a)
  bool components_monotone = true;   // (b)
  bool bound_monotone = true;        // (c)
};

inline constexpr double kMonotoneTolerance = 1e-9;

namespace detail {

struct GraphState {
  DirectedMultigraph graph;
  std::size_t components = 0;
  double lambda = 0.0;
  double d_m = 0.0;
  std::optional<long> l_hat;
  std::optional<Lemma1Checker> lemma;
};

inline GraphState analyse(DirectedMultigraph g, const Eigen::MatrixXd& features, double epsilon,
                          double s) {
  GraphState st;
  st.lemma.emplace(g);
  st.components = st.lemma->resistances().components().count;
  st.lambda = g.node_count() ? second_largest_eigenvalue(g) : 0.0;
  st.d_m = subspace_distance(features, subspace_basis(g));
  st.l_hat = st.d_m > 0.0 ? relaxed_smoothing_layer(st.d_m, epsilon, s, st.lambda) : std::optional<long>(0);
  st.graph = std::move(g);
  return st;
}

}  // namespace detail

/// Applies each drop set in turn (ids are edge ids of `g`; ids already
/// removed by an earlier step are skipped, so nested sets also work) and
/// checks the monotonicity consequences at every step.
inline std::vector<TheoremStep> theorem_verifier(const DirectedMultigraph& g,
                                                 const std::vector<std::vector<std::size_t>>& drop_sets,
                                                 double epsilon, double s,
                                                 const Eigen::MatrixXd& features) {
  if (static_cast<std::size_t>(features.rows()) != g.node_count()) {
    throw ShapeError("theorem_verifier: feature rows != node count");
  }
  std::vector<std::size_t> current_id(g.edge_count());
  std::iota(current_id.begin(), current_id.end(), std::size_t{0});
  detail::GraphState before = detail::analyse(g, features, epsilon, s);
  std::vector<TheoremStep> steps;
  const std::size_t n = g.node_count();

  for (std::size_t k = 0; k < drop_sets.size(); ++k) {
    std::vector<std::size_t> local;
    for (std::size_t id : drop_sets[k]) {
      if (id >= g.edge_count()) throw IndexError("theorem_verifier: unknown edge id " + std::to_string(id));
      if (current_id[id] != kRemoved) local.push_back(current_id[id]);
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    EdgeRemoval removal = remove_edges(before.graph, local);
    for (auto& id : current_id) {
      if (id != kRemoved) id = removal.old_to_new[id];
    }
    detail::GraphState after = detail::analyse(std::move(removal.graph), features, epsilon, s);

    TheoremStep st;
    st.step = k + 1;
    st.removed = local.size();
    st.components_before = before.components;
    st.components_after = after.components;
    st.rank_gap_before = n - before.components;
    st.rank_gap_after = n - after.components;
    st.lambda_before = before.lambda;
    st.lambda_after = after.lambda;
    st.d_m_before = before.d_m;
    st.d_m_after = after.d_m;
    st.l_hat_before = before.l_hat;
    st.l_hat_after = after.l_hat;
    st.components_monotone = after.components >= before.components;

    const auto& cb = before.lemma->resistances().components().component;
    const auto& ca = after.lemma->resistances().components().component;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (cb[a] != cb[b] || ca[a] != ca[b]) continue;
        ++st.tracked_pairs;
        Lemma1Result lb = (*before.lemma)(a, b);
        Lemma1Result la = (*after.lemma)(a, b);
        double drop = lb.resistance - la.resistance;
        st.max_resistance_drop = std::max(st.max_resistance_drop, drop);
        if (drop > kMonotoneTolerance) ++st.resistance_violations;
        double rise = la.bound - lb.bound;
        st.max_bound_rise = std::max(st.max_bound_rise, rise);
        if (rise > kMonotoneTolerance) ++st.bound_violations;
      }
    }
    st.resistance_monotone = st.resistance_violations == 0;
    st.bound_monotone = st.bound_violations == 0;
    steps.push_back(st);
    before = std::move(after);
  }
  return steps;
}

}  // namespace oes::spectral
