// Copyright 2026 The DPSBCD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpsbcd/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dpsbcd/kernels.hpp"
#include "dpsbcd/numerics.hpp"

namespace dpsbcd {
namespace {

void require_layer(std::size_t d, std::size_t lo, std::size_t hi, const char* what) {
  if (d < lo || d > hi) {
    throw std::invalid_argument(std::string(what) + ": layer " + std::to_string(d) +
                                " outside [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "]");
  }
}

double batch_scale(const SplitState& state) {
  const std::size_t b = state.batch_size();
  if (b == 0) throw std::invalid_argument("SplitState: empty batch");
  return 1.0 / static_cast<double>(b);
}

}  // namespace

void SplitState::validate(const LipschitzMLP& model) const {
  const std::size_t layers = model.num_layers();
  if (x.size() != layers || U.size() + 1 != layers) {
    throw std::invalid_argument("SplitState: expected " + std::to_string(layers) +
                                " activations and " + std::to_string(layers - 1) +
                                " pre-activations");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("SplitState: gamma must be > 0");
  const std::size_t b = batch_size();
  for (std::size_t d = 0; d < layers; ++d) {
    const Matrix& t = model.weights[d];
    if (x[d].rows() != t.cols() || x[d].cols() != b) {
      throw std::invalid_argument("SplitState: x_" + std::to_string(d) + " has shape " +
                                  std::to_string(x[d].rows()) + "x" +
                                  std::to_string(x[d].cols()));
    }
    if (d < U.size() && (U[d].rows() != t.rows() || U[d].cols() != b)) {
      throw std::invalid_argument("SplitState: U_" + std::to_string(d) + " has shape " +
                                  std::to_string(U[d].rows()) + "x" +
                                  std::to_string(U[d].cols()));
    }
  }
}

bool SplitState::all_finite() const noexcept {
  return std::all_of(x.begin(), x.end(), [](const Matrix& m) { return m.all_finite(); }) &&
         std::all_of(U.begin(), U.end(), [](const Matrix& m) { return m.all_finite(); });
}

SplitState init_state(const LipschitzMLP& model, const Matrix& inputs, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("init_state: gamma must be > 0");
  SplitState s;
  s.gamma = gamma;
  s.x = forward(model, inputs);
  for (std::size_t d = 0; d < model.depth(); ++d) {
    s.U.push_back(kernels::matmul(model.weights[d], s.x[d]));
  }
  return s;
}

double lagrangian(const LipschitzMLP& model, const SplitState& state, const Matrix& targets) {
  state.validate(model);
  const std::size_t D = model.depth();
  double penalty = 0.0;
  for (std::size_t d = 0; d < D; ++d) {
    penalty += frobenius_norm_squared(state.x[d + 1] - relu(state.U[d]));
    penalty += frobenius_norm_squared(state.U[d] - kernels::matmul(model.weights[d], state.x[d]));
  }
  return loss(model.weights[D], state.x[D], targets) +
         0.5 * state.gamma * penalty * batch_scale(state);
}

Matrix grad_theta_from_product(std::size_t d, const Matrix& z, const SplitState& state,
                               const Matrix& targets) {
  const std::size_t D = state.x.size() - 1;
  require_layer(d, 0, D, "grad_theta");
  Matrix r = z;
  double coeff = batch_scale(state);
  if (d < D) {
    r -= state.U[d];
    coeff *= state.gamma;
  } else {
    r -= targets;
  }
  Matrix g = kernels::matmul_nt(r, state.x[d]);
  g *= coeff;
  return g;
}

Matrix grad_theta(std::size_t d, const LipschitzMLP& model, const SplitState& state,
                  const Matrix& targets) {
  state.validate(model);
  require_layer(d, 0, model.depth(), "grad_theta");
  return grad_theta_from_product(d, kernels::matmul(model.weights[d], state.x[d]), state,
                                 targets);
}

Matrix update_x(std::size_t d, const LipschitzMLP& model, const SplitState& state,
                const Matrix& targets) {
  state.validate(model);
  const std::size_t D = model.depth();
  require_layer(d, 1, D, "update_x");
  const Matrix& theta = model.weights[d];
  const Matrix prev = relu(state.U[d - 1]);
  if (d == D) return prox_loss_in_xD(theta, prev, targets, state.gamma);
  Matrix a = kernels::matmul_tn(theta, theta);
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += 1.0;
  Matrix rhs = kernels::matmul_tn(theta, state.U[d]);
  rhs += prev;
  return numerics::solve_spd(a, rhs);
}

double update_U_scalar(double z, double a) {
  static const double kSqrt2m1 = std::sqrt(2.0) - 1.0;
  if (-a <= z && z <= -kSqrt2m1 * a) return z;
  if (z + a <= 0.0) return std::min(0.0, z);
  return 0.5 * (z + a);
}

Matrix update_U_from_product(const Matrix& z, const Matrix& next_x) {
  check_same_shape(z, next_x, "update_U");
  Matrix u(z.rows(), z.cols());
  const auto zv = z.values();
  const auto av = next_x.values();
  auto uv = u.values();
  for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = update_U_scalar(zv[i], av[i]);
  return u;
}

Matrix update_U(std::size_t d, const LipschitzMLP& model, const SplitState& state) {
  state.validate(model);
  if (model.depth() == 0) throw std::invalid_argument("update_U: network has no hidden layer");
  require_layer(d, 0, model.depth() - 1, "update_U");
  return update_U_from_product(kernels::matmul(model.weights[d], state.x[d]), state.x[d + 1]);
}

ProxKind parse_prox_kind(std::string_view name) {
  if (name == "none") return ProxKind::kNone;
  if (name == "l2") return ProxKind::kL2;
  if (name == "l1") return ProxKind::kL1;
  throw std::invalid_argument("unknown prox kind '" + std::string(name) +
                              "' (expected none, l2 or l1)");
}

std::string_view prox_kind_name(ProxKind kind) {
  switch (kind) {
    case ProxKind::kNone: return "none";
    case ProxKind::kL2: return "l2";
    case ProxKind::kL1: return "l1";
  }
  throw std::invalid_argument("unknown prox kind");
}

double prox_scalar(ProxKind kind, double eta, double v) {
  switch (kind) {
    case ProxKind::kNone: return v;
    case ProxKind::kL2: return v / (1.0 + eta);
    case ProxKind::kL1: return std::copysign(std::max(0.0, std::abs(v) - eta), v);
  }
  throw std::invalid_argument("unknown prox kind");
}

Matrix prox(ProxKind kind, double eta, const Matrix& v) {
  if (!(eta > 0.0)) throw std::invalid_argument("prox: eta must be > 0");
  if (kind == ProxKind::kNone) return v;
  Matrix out = v;
  for (double& t : out.values()) t = prox_scalar(kind, eta, t);
  return out;
}

SmoothnessReport smoothness_from_activations(std::size_t d, const Matrix& x, double gamma) {
  if (x.cols() == 0) throw std::invalid_argument("smoothness_constants: empty batch");
  if (!(gamma > 0.0)) throw std::invalid_argument("smoothness_constants: gamma must be > 0");
  SmoothnessReport rep;
  rep.layer = d;
  rep.X = max_column_norm_squared(x);
  rep.beta_bound = gamma * rep.X;
  rep.beta_bound_squared = gamma * rep.X * rep.X;
  if (rep.X == 0.0) return rep;
  Matrix g = kernels::gram(x);
  g *= 1.0 / static_cast<double>(x.cols());
  const auto range = numerics::symmetric_eigen_range(g);
  rep.beta = gamma * std::max(0.0, range.max);
  rep.omega = std::min(rep.beta, gamma * std::max(0.0, range.min));
  return rep;
}

SmoothnessReport smoothness_constants(std::size_t d, const SplitState& state) {
  if (state.x.empty()) throw std::invalid_argument("smoothness_constants: empty state");
  const std::size_t D = state.x.size() - 1;
  require_layer(d, 0, D, "smoothness_constants");
  // The output layer's loss carries no gamma.
  return smoothness_from_activations(d, state.x[d], d < D ? state.gamma : 1.0);
}

double lipschitz_F(double eta, double beta, double omega) {
  if (!(eta > 0.0)) throw std::invalid_argument("lipschitz_F: eta must be > 0");
  if (omega < 0.0 || beta < 0.0) throw std::invalid_argument("lipschitz_F: negative constant");
  if (omega > beta) {
    throw std::invalid_argument("lipschitz_F: omega " + std::to_string(omega) +
                                " exceeds beta " + std::to_string(beta));
  }
  return std::max(std::abs(1.0 - eta * omega), std::abs(1.0 - eta * beta));
}

}  // namespace dpsbcd
