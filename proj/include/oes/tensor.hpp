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

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oes/common.hpp"
#include "oes/multigraph.hpp"

namespace oes::ad {

/// A named trainable block plus its Adam moments.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix first_moment;
  Matrix second_moment;
};

/// Ordered collection of parameters. Names are unique; shapes never change.
class ParameterSet {
 public:
  Parameter& add(const std::string& name, Matrix value) {
    if (index_.count(name)) throw ConfigError("duplicate parameter name '" + name + "'");
    index_[name] = params_.size();
    Parameter p;
    p.name = name;
    p.grad = Matrix::Zero(value.rows(), value.cols());
    p.first_moment = Matrix::Zero(value.rows(), value.cols());
    p.second_moment = Matrix::Zero(value.rows(), value.cols());
    p.value = std::move(value);
    params_.push_back(std::move(p));
    return params_.back();
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Parameter& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return params_[it->second];
  }
  const Parameter& at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return params_[it->second];
  }

  std::vector<Parameter>& all() { return params_; }
  const std::vector<Parameter>& all() const { return params_; }
  std::size_t size() const { return params_.size(); }

  void zero_grad() {
    for (auto& p : params_) p.grad.setZero();
  }

  std::size_t step = 0;

 private:
  std::vector<Parameter> params_;
  std::map<std::string, std::size_t> index_;
};

class Tape;

/// Handle to a value recorded on a tape.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix& value() const;
  const Matrix& grad() const;
  bool requires_grad() const;
  std::vector<std::size_t> shape() const {
    return {static_cast<std::size_t>(value().rows()), static_cast<std::size_t>(value().cols())};
  }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  double item() const {
    if (value().size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_string(value()));
    return value()(0, 0);
  }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records operations in creation order; backward walks the record in
/// reverse. One tape belongs to one forward/backward pass on one thread.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Matrix& grad_out)>;

  Tensor constant(Matrix value) { return push(std::move(value), false, nullptr, {}, "constant"); }
  Tensor variable(Matrix value) { return push(std::move(value), true, nullptr, {}, "variable"); }
  Tensor parameter(Parameter& p) { return push(p.value, true, &p, {}, "parameter"); }

  /// Appends an op result. `inputs` decides whether the node needs a grad.
  Tensor record(Matrix value, std::initializer_list<Tensor> inputs, BackwardFn fn,
                const char* op) {
    bool needs = false;
    for (const Tensor& t : inputs) needs = needs || nodes_[t.id()].requires_grad;
    return push(std::move(value), needs, nullptr, needs ? std::move(fn) : BackwardFn{}, op);
  }

  Tensor record(Matrix value, const std::vector<Tensor>& inputs, BackwardFn fn, const char* op) {
    bool needs = false;
    for (const Tensor& t : inputs) needs = needs || nodes_[t.id()].requires_grad;
    return push(std::move(value), needs, nullptr, needs ? std::move(fn) : BackwardFn{}, op);
  }

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const Matrix& grad(std::size_t id) const {
    static const Matrix empty;
    return nodes_[id].grad.size() ? nodes_[id].grad : empty;
  }

  /// Zero-initialized gradient slot, or nullptr when the node needs none.
  Matrix* grad_slot(std::size_t id) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return nullptr;
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    return &n.grad;
  }

  void accumulate(std::size_t id, const Matrix& g) {
    if (Matrix* slot = grad_slot(id)) *slot += g;
  }

  /// Populates gradients of every requires_grad node reachable from `loss`
  /// and adds parameter gradients into Parameter::grad.
  void backward(const Tensor& loss) {
    if (loss.tape() != this) throw ShapeError("loss tensor belongs to a different tape");
    const Matrix& v = nodes_[loss.id()].value;
    if (v.rows() != 1 || v.cols() != 1) {
      throw ShapeError("backward requires a scalar loss, got " + shape_string(v));
    }
    if (!nodes_[loss.id()].requires_grad) return;
    nodes_[loss.id()].grad = Matrix::Constant(1, 1, 1.0);
    for (std::size_t i = loss.id() + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.grad.size() == 0) continue;
      if (n.backward) {
        Matrix g = n.grad;  // backward may touch nodes_ entries but never resizes
        n.backward(*this, g);
      }
      if (n.param != nullptr) n.param->grad += n.grad;
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    BackwardFn backward;
    const char* op = "";
  };

  Tensor push(Matrix value, bool requires_grad, Parameter* param, BackwardFn fn, const char* op) {
    if (!value.allFinite()) {
      throw NonFiniteError(std::string("non-finite value produced by '") + op + "'");
    }
    nodes_.push_back({std::move(value), Matrix(), requires_grad, param, std::move(fn), op});
    return Tensor(this, nodes_.size() - 1);
  }

  std::vector<Node> nodes_;
};

inline const Matrix& Tensor::value() const { return tape_->value(id_); }
inline const Matrix& Tensor::grad() const { return tape_->grad(id_); }
inline bool Tensor::requires_grad() const { return tape_->requires_grad(id_); }

/// Binds ParameterSet entries onto a tape at most once per forward pass.
class ParamBinding {
 public:
  ParamBinding(Tape& tape, ParameterSet& params) : tape_(tape), params_(params) {}
  Tensor operator()(const std::string& name) {
    auto it = cache_.find(name);
    if (it != cache_.end()) return it->second;
    Tensor t = tape_.parameter(params_.at(name));
    cache_.emplace(name, t);
    return t;
  }
  Tape& tape() { return tape_; }
  ParameterSet& params() { return params_; }

 private:
  Tape& tape_;
  ParameterSet& params_;
  std::map<std::string, Tensor> cache_;
};

// ---------------------------------------------------------------------------
// Operations

namespace detail {

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                     shape_string(b));
  }
}

}  // namespace detail

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: " + shape_string(av) + " * " + shape_string(bv));
  }
  std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(av * bv, {a, b},
                          [ia, ib](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) ga->noalias() += g * t.value(ib).transpose();
                            if (Matrix* gb = t.grad_slot(ib)) gb->noalias() += t.value(ia).transpose() * g;
                          },
                          "matmul");
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  detail::require_same_shape(a.value(), b.value(), "add");
  std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(a.value() + b.value(), {a, b},
                          [ia, ib](Tape& t, const Matrix& g) {
                            t.accumulate(ia, g);
                            t.accumulate(ib, g);
                          },
                          "add");
}

/// a + row vector b broadcast over rows.
inline Tensor add_bias(const Tensor& a, const Tensor& b) {
  if (b.rows() != 1 || b.cols() != a.cols()) {
    throw ShapeError("add_bias: " + shape_string(a.value()) + " + " + shape_string(b.value()));
  }
  std::size_t ia = a.id(), ib = b.id();
  Matrix out = a.value().rowwise() + b.value().row(0);
  return a.tape()->record(std::move(out), {a, b},
                          [ia, ib](Tape& t, const Matrix& g) {
                            t.accumulate(ia, g);
                            if (Matrix* gb = t.grad_slot(ib)) *gb += g.colwise().sum();
                          },
                          "add_bias");
}

inline Tensor scale(const Tensor& a, double s) {
  std::size_t ia = a.id();
  return a.tape()->record(a.value() * s, {a},
                          [ia, s](Tape& t, const Matrix& g) { t.accumulate(ia, g * s); },
                          "scale");
}

/// a * s where s is a 1x1 tensor.
inline Tensor scale_by(const Tensor& a, const Tensor& s) {
  if (s.value().size() != 1) throw ShapeError("scale_by: factor must be 1x1");
  std::size_t ia = a.id(), is = s.id();
  return a.tape()->record(a.value() * s.value()(0, 0), {a, s},
                          [ia, is](Tape& t, const Matrix& g) {
                            t.accumulate(ia, g * t.value(is)(0, 0));
                            if (Matrix* gs = t.grad_slot(is)) {
                              (*gs)(0, 0) += g.cwiseProduct(t.value(ia)).sum();
                            }
                          },
                          "scale_by");
}

inline Tensor relu(const Tensor& a) {
  std::size_t ia = a.id();
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape()->record(std::move(out), {a},
                          [ia](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) {
                              *ga += (t.value(ia).array() > 0.0).select(g, 0.0);
                            }
                          },
                          "relu");
}

inline Tensor sum(const Tensor& a) {
  std::size_t ia = a.id();
  return a.tape()->record(Matrix::Constant(1, 1, a.value().sum()), {a},
                          [ia](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) ga->array() += g(0, 0);
                          },
                          "sum");
}

inline Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  Eigen::Index rows = parts.front().rows(), cols = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> widths;
  Eigen::Index at = 0;
  for (const Tensor& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  return parts.front().tape()->record(
      std::move(out), parts,
      [ids, widths](Tape& t, const Matrix& g) {
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (Matrix* gi = t.grad_slot(ids[i])) *gi += g.middleCols(off, widths[i]);
          off += widths[i];
        }
      },
      "concat_cols");
}

/// Stacks inputs vertically; all must share a column count.
inline Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Eigen::Index cols = parts.front().cols(), rows = 0;
  for (const Tensor& p : parts) {
    if (p.cols() != cols) throw ShapeError("concat_rows: column count mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> heights;
  Eigen::Index at = 0;
  for (const Tensor& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
    ids.push_back(p.id());
    heights.push_back(p.rows());
  }
  return parts.front().tape()->record(
      std::move(out), parts,
      [ids, heights](Tape& t, const Matrix& g) {
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (Matrix* gi = t.grad_slot(ids[i])) *gi += g.middleRows(off, heights[i]);
          off += heights[i];
        }
      },
      "concat_rows");
}

/// out[i] = a[index[i]]
inline Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index) {
  const Matrix& av = a.value();
  Matrix out(static_cast<Eigen::Index>(index.size()), av.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= static_cast<std::size_t>(av.rows())) throw IndexError("gather_rows: index out of range");
    out.row(static_cast<Eigen::Index>(i)) = av.row(static_cast<Eigen::Index>(index[i]));
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::size_t ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia, idx = std::move(idx)](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) {
                              for (std::size_t i = 0; i < idx.size(); ++i) {
                                ga->row(static_cast<Eigen::Index>(idx[i])) += g.row(static_cast<Eigen::Index>(i));
                              }
                            }
                          },
                          "gather_rows");
}

/// out[index[i]] += a[i]; out has `rows` rows.
inline Tensor scatter_add_rows(const Tensor& a, std::span<const std::size_t> index,
                               std::size_t rows) {
  const Matrix& av = a.value();
  if (index.size() != static_cast<std::size_t>(av.rows())) throw ShapeError("scatter_add_rows: index length");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), av.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= rows) throw IndexError("scatter_add_rows: index out of range");
    out.row(static_cast<Eigen::Index>(index[i])) += av.row(static_cast<Eigen::Index>(i));
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::size_t ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia, idx = std::move(idx)](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) {
                              for (std::size_t i = 0; i < idx.size(); ++i) {
                                ga->row(static_cast<Eigen::Index>(i)) += g.row(static_cast<Eigen::Index>(idx[i]));
                              }
                            }
                          },
                          "scatter_add_rows");
}

/// Per-target mean of rows; targets receiving nothing get zeros.
inline Tensor scatter_mean_rows(const Tensor& a, std::span<const std::size_t> index,
                                std::size_t rows) {
  std::vector<double> inv(rows, 0.0);
  for (std::size_t i : index) {
    if (i >= rows) throw IndexError("scatter_mean_rows: index out of range");
    inv[i] += 1.0;
  }
  for (double& c : inv) c = c > 0.0 ? 1.0 / c : 0.0;
  const Matrix& av = a.value();
  if (index.size() != static_cast<std::size_t>(av.rows())) throw ShapeError("scatter_mean_rows: index length");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), av.cols());
  for (std::size_t i = 0; i < index.size(); ++i) {
    out.row(static_cast<Eigen::Index>(index[i])) += av.row(static_cast<Eigen::Index>(i));
  }
  for (std::size_t r = 0; r < rows; ++r) out.row(static_cast<Eigen::Index>(r)) *= inv[r];
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::size_t ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia, idx = std::move(idx), inv = std::move(inv)](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) {
                              for (std::size_t i = 0; i < idx.size(); ++i) {
                                ga->row(static_cast<Eigen::Index>(i)) +=
                                    g.row(static_cast<Eigen::Index>(idx[i])) * inv[idx[i]];
                              }
                            }
                          },
                          "scatter_mean_rows");
}

/// out[dst[e]] += a[src[e]] for every edge; the fused gather+scatter of
/// message passing, without an |E|-row intermediate.
inline Tensor propagate(const Tensor& a, std::span<const std::size_t> src,
                        std::span<const std::size_t> dst, std::size_t rows) {
  const Matrix& av = a.value();
  if (src.size() != dst.size()) throw ShapeError("propagate: src/dst length mismatch");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rows), av.cols());
  for (std::size_t e = 0; e < src.size(); ++e) {
    out.row(static_cast<Eigen::Index>(dst[e])) += av.row(static_cast<Eigen::Index>(src[e]));
  }
  std::size_t ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia, src = std::vector<std::size_t>(src.begin(), src.end()),
                           dst = std::vector<std::size_t>(dst.begin(), dst.end())](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) {
                              for (std::size_t e = 0; e < src.size(); ++e) {
                                ga->row(static_cast<Eigen::Index>(src[e])) += g.row(static_cast<Eigen::Index>(dst[e]));
                              }
                            }
                          },
                          "propagate");
}

/// Column means as a 1 x C row.
inline Tensor mean_rows(const Tensor& a) {
  Eigen::Index n = a.rows();
  Matrix out = n > 0 ? Matrix(a.value().colwise().mean()) : Matrix::Zero(1, a.cols());
  std::size_t ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia, n](Tape& t, const Matrix& g) {
                            if (n == 0) return;
                            if (Matrix* ga = t.grad_slot(ia)) ga->rowwise() += g.row(0) / static_cast<double>(n);
                          },
                          "mean_rows");
}

/// Repeats a 1 x C row `rows` times.
inline Tensor broadcast_rows(const Tensor& a, std::size_t rows) {
  if (a.rows() != 1) throw ShapeError("broadcast_rows: expects a single row");
  Matrix out = a.value().replicate(static_cast<Eigen::Index>(rows), 1);
  std::size_t ia = a.id();
  return a.tape()->record(std::move(out), {a},
                          [ia](Tape& t, const Matrix& g) {
                            if (Matrix* ga = t.grad_slot(ia)) *ga += g.colwise().sum();
                          },
                          "broadcast_rows");
}

/// Row i of the result is b[i] where mask[i] != 0, a[i] otherwise.
inline Tensor select_rows(const Tensor& a, const Tensor& b, std::span<const std::uint8_t> mask) {
  detail::require_same_shape(a.value(), b.value(), "select_rows");
  if (mask.size() != static_cast<std::size_t>(a.rows())) throw ShapeError("select_rows: mask length");
  Matrix out = a.value();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.row(static_cast<Eigen::Index>(i)) = b.value().row(static_cast<Eigen::Index>(i));
  }
  std::vector<std::uint8_t> m(mask.begin(), mask.end());
  std::size_t ia = a.id(), ib = b.id();
  return a.tape()->record(std::move(out), {a, b},
                          [ia, ib, m = std::move(m)](Tape& t, const Matrix& g) {
                            Matrix* ga = t.grad_slot(ia);
                            Matrix* gb = t.grad_slot(ib);
                            for (std::size_t i = 0; i < m.size(); ++i) {
                              Matrix* dst = m[i] ? gb : ga;
                              if (dst) dst->row(static_cast<Eigen::Index>(i)) += g.row(static_cast<Eigen::Index>(i));
                            }
                          },
                          "select_rows");
}

/// Per-column standardization over rows (no affine part). Batch statistics
/// are used in every pass; training is full-batch.
inline Tensor batch_norm(const Tensor& a, double eps = 1e-5) {
  const Matrix& x = a.value();
  Eigen::Index n = x.rows();
  if (n == 0) return a.tape()->record(x, {a}, [](Tape&, const Matrix&) {}, "batch_norm");
  Eigen::RowVectorXd mean = x.colwise().mean();
  Matrix centered = x.rowwise() - mean;
  Eigen::RowVectorXd var = centered.array().square().colwise().mean();
  Eigen::RowVectorXd inv_std = (var.array() + eps).rsqrt();
  Matrix xhat = centered.array().rowwise() * inv_std.array();
  std::size_t ia = a.id();
  return a.tape()->record(xhat, {a},
                          [ia, xhat, inv_std, n](Tape& t, const Matrix& g) {
                            Matrix* ga = t.grad_slot(ia);
                            if (!ga) return;
                            double dn = static_cast<double>(n);
                            Eigen::RowVectorXd g_mean = g.colwise().mean();
                            Eigen::RowVectorXd gx_mean = g.cwiseProduct(xhat).colwise().sum() / dn;
                            Matrix term = (g.rowwise() - g_mean) - Matrix(xhat.array().rowwise() * gx_mean.array());
                            *ga += Matrix(term.array().rowwise() * inv_std.array());
                          },
                          "batch_norm");
}

/// Per-class weights for the two-class cross-entropy.
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;
  double of(Label y) const { return y == Label::positive ? positive : negative; }
};

/// Column convention for two-class logits.
inline constexpr Eigen::Index kNegativeColumn = 0;
inline constexpr Eigen::Index kPositiveColumn = 1;

/// mean_i w(y_i) * -log softmax(z_i)[y_i] over the selected rows (all rows
/// when `rows` is empty).
inline double weighted_cross_entropy_value(const Matrix& logits, std::span<const Label> labels,
                                           ClassWeights w,
                                           std::span<const std::size_t> rows = {}) {
  std::size_t count = rows.empty() ? labels.size() : rows.size();
  if (count == 0) throw ShapeError("weighted_cross_entropy: empty batch");
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    std::size_t i = rows.empty() ? k : rows[k];
    double z0 = logits(static_cast<Eigen::Index>(i), 0), z1 = logits(static_cast<Eigen::Index>(i), 1);
    double mx = std::max(z0, z1);
    double lse = mx + std::log(std::exp(z0 - mx) + std::exp(z1 - mx));
    double zy = labels[i] == Label::positive ? z1 : z0;
    total += w.of(labels[i]) * (lse - zy);
  }
  return total / static_cast<double>(count);
}

inline Tensor weighted_cross_entropy(const Tensor& logits, std::span<const Label> labels,
                                     ClassWeights weights) {
  const Matrix& z = logits.value();
  if (z.cols() != 2) throw ShapeError("weighted_cross_entropy: logits must have 2 columns");
  if (static_cast<std::size_t>(z.rows()) != labels.size()) {
    throw ShapeError("weighted_cross_entropy: " + std::to_string(z.rows()) + " logit rows vs " +
                     std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw ShapeError("weighted_cross_entropy: empty batch");
  if (!(weights.negative > 0.0) || !(weights.positive > 0.0)) {
    throw ConfigError("weighted_cross_entropy: class weights must be positive");
  }
  double loss = weighted_cross_entropy_value(z, labels, weights);
  std::vector<Label> y(labels.begin(), labels.end());
  std::size_t iz = logits.id();
  return logits.tape()->record(
      Matrix::Constant(1, 1, loss), {logits},
      [iz, y = std::move(y), weights](Tape& t, const Matrix& g) {
        Matrix* gz = t.grad_slot(iz);
        if (!gz) return;
        const Matrix& zv = t.value(iz);
        double scale = g(0, 0) / static_cast<double>(y.size());
        for (Eigen::Index i = 0; i < zv.rows(); ++i) {
          double z0 = zv(i, 0), z1 = zv(i, 1);
          double mx = std::max(z0, z1);
          double e0 = std::exp(z0 - mx), e1 = std::exp(z1 - mx);
          double p1 = e1 / (e0 + e1);
          double p0 = e0 / (e0 + e1);
          Label yi = y[static_cast<std::size_t>(i)];
          double w = weights.of(yi) * scale;
          (*gz)(i, 0) += w * (p0 - (yi == Label::negative ? 1.0 : 0.0));
          (*gz)(i, 1) += w * (p1 - (yi == Label::positive ? 1.0 : 0.0));
        }
      },
      "weighted_cross_entropy");
}

/// Row-wise softmax of a plain matrix (not recorded).
inline Matrix softmax_rows(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double mx = z.row(i).maxCoeff();
    Eigen::RowVectorXd e = (z.row(i).array() - mx).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

}  // namespace oes::ad
