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
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "oes/tensor.hpp"

namespace oes::ad {

enum class Activation { identity, relu };

/// Layer sizes including the input width, e.g. {in, hidden, out}.
struct MlpSpec {
  std::string name;
  std::vector<std::size_t> sizes;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  std::size_t layer_count() const { return sizes.empty() ? 0 : sizes.size() - 1; }
  std::string weight(std::size_t i) const { return name + ".w" + std::to_string(i); }
  std::string bias(std::size_t i) const { return name + ".b" + std::to_string(i); }
};

/// Glorot-uniform weights and zero biases.
inline Matrix glorot(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix w(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return w;
}

inline void init_mlp(ParameterSet& params, const MlpSpec& spec, std::mt19937_64& rng) {
  if (spec.layer_count() == 0) throw ConfigError("mlp '" + spec.name + "' has no layers");
  for (std::size_t i = 0; i < spec.layer_count(); ++i) {
    params.add(spec.weight(i), glorot(spec.sizes[i], spec.sizes[i + 1], rng));
    params.add(spec.bias(i), Matrix::Zero(1, static_cast<Eigen::Index>(spec.sizes[i + 1])));
  }
}

inline Tensor activate(const Tensor& x, Activation a) {
  return a == Activation::relu ? relu(x) : x;
}

/// Affine-then-activation composition; the last layer uses the output
/// activation.
inline Tensor mlp_apply(ParamBinding& bind, const Tensor& input, const MlpSpec& spec) {
  if (spec.layer_count() == 0) throw ConfigError("mlp '" + spec.name + "' has no layers");
  if (static_cast<std::size_t>(input.cols()) != spec.sizes.front()) {
    throw ShapeError("mlp '" + spec.name + "': input width " + std::to_string(input.cols()) +
                     " != " + std::to_string(spec.sizes.front()));
  }
  Tensor h = input;
  for (std::size_t i = 0; i < spec.layer_count(); ++i) {
    h = add_bias(matmul(h, bind(spec.weight(i))), bind(spec.bias(i)));
    bool last = i + 1 == spec.layer_count();
    h = activate(h, last ? spec.output_activation : spec.hidden_activation);
  }
  return h;
}

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam update using the gradients stored on each parameter.
inline void adam_step(ParameterSet& params, const AdamConfig& cfg) {
  ++params.step;
  double t = static_cast<double>(params.step);
  double c1 = 1.0 - std::pow(cfg.beta1, t);
  double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (Parameter& p : params.all()) {
    if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
      throw ShapeError("adam_step: gradient shape mismatch for '" + p.name + "'");
    }
    p.first_moment = cfg.beta1 * p.first_moment + (1.0 - cfg.beta1) * p.grad;
    p.second_moment = cfg.beta2 * p.second_moment + (1.0 - cfg.beta2) * p.grad.cwiseProduct(p.grad);
    if (cfg.lr == 0.0) continue;
    Matrix m_hat = p.first_moment / c1;
    Matrix v_hat = p.second_moment / c2;
    p.value.array() -= cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.eps);
  }
}

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h per coordinate.
inline Matrix finite_difference_oracle(const std::function<double(const Matrix&)>& f,
                                       const Matrix& x, double h) {
  if (!(h > 0.0)) throw ConfigError("finite_difference_oracle: h must be positive");
  Matrix grad(x.rows(), x.cols());
  Matrix probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double saved = probe.data()[i];
    probe.data()[i] = saved + h;
    double up = f(probe);
    probe.data()[i] = saved - h;
    double down = f(probe);
    probe.data()[i] = saved;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Checkpoint container (JSON):
//   {"format": "oesgnn-checkpoint", "version": 1, "step": <uint>,
//    "parameters": [{"name": str, "shape": [rows, cols], "values": [row-major f64...]}]}
inline nlohmann::json checkpoint_to_json(const ParameterSet& params) {
  nlohmann::json j;
  j["format"] = "oesgnn-checkpoint";
  j["version"] = 1;
  j["step"] = params.step;
  j["parameters"] = nlohmann::json::array();
  for (const Parameter& p : params.all()) {
    std::vector<double> values(p.value.data(), p.value.data() + p.value.size());
    j["parameters"].push_back({{"name", p.name},
                               {"shape", {p.value.rows(), p.value.cols()}},
                               {"values", values}});
  }
  return j;
}

/// Loads values into an existing set; names and shapes must match.
inline void checkpoint_from_json(ParameterSet& params, const nlohmann::json& j) {
  if (j.value("format", "") != "oesgnn-checkpoint") throw ParseError("not an oesgnn checkpoint");
  params.step = j.at("step").get<std::size_t>();
  for (const auto& entry : j.at("parameters")) {
    Parameter& p = params.at(entry.at("name").get<std::string>());
    auto shape = entry.at("shape").get<std::vector<Eigen::Index>>();
    auto values = entry.at("values").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] != p.value.rows() || shape[1] != p.value.cols() ||
        values.size() != static_cast<std::size_t>(p.value.size())) {
      throw ShapeError("checkpoint shape mismatch for '" + p.name + "'");
    }
    std::copy(values.begin(), values.end(), p.value.data());
  }
}

inline void save_checkpoint(const ParameterSet& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << checkpoint_to_json(params).dump() << '\n';
}

inline void load_checkpoint(ParameterSet& params, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path);
  checkpoint_from_json(params, nlohmann::json::parse(in));
}

}  // namespace oes::ad
