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

// Three-splitting of the network objective. For one batch of b columns,
//
//   L = (1/b) [ 1/2 ||theta_D x_D - y||^2
//               + gamma/2 sum_{d<D} ( ||x_{d+1} - relu(U_d)||^2 + ||U_d - theta_d x_d||^2 ) ]
//
// Every term is batch-averaged, so the block minimizers below are independent
// of b while the theta gradients carry the 1/b of mean aggregation.

#ifndef DPSBCD_SPLITTING_HPP_
#define DPSBCD_SPLITTING_HPP_

#include <cstddef>
#include <string_view>
#include <vector>

#include "dpsbcd/matrix.hpp"
#include "dpsbcd/network.hpp"

namespace dpsbcd {

struct SplitState {
  std::vector<Matrix> x;  // x_0..x_D, x_0 holds the batch inputs
  std::vector<Matrix> U;  // U_0..U_{D-1}
  double gamma = 1.0;

  std::size_t batch_size() const noexcept { return x.empty() ? 0 : x.front().cols(); }
  // Throws std::invalid_argument unless shapes agree with `model`.
  void validate(const LipschitzMLP& model) const;
  bool all_finite() const noexcept;
};

// Feasible start: U_d = theta_d x_d, x_{d+1} = relu(U_d).
SplitState init_state(const LipschitzMLP& model, const Matrix& inputs, double gamma = 1.0);

double lagrangian(const LipschitzMLP& model, const SplitState& state, const Matrix& targets);

// Gradient of the Lagrangian in theta_d. `targets` is only read for d = D.
Matrix grad_theta(std::size_t d, const LipschitzMLP& model, const SplitState& state,
                  const Matrix& targets);
// Same, given the product z = theta_d x_d already formed.
Matrix grad_theta_from_product(std::size_t d, const Matrix& z, const SplitState& state,
                               const Matrix& targets);

// Exact minimizer of the Lagrangian in x_d, 1 <= d <= D.
Matrix update_x(std::size_t d, const LipschitzMLP& model, const SplitState& state,
                const Matrix& targets);

// Exact minimizer over u of (a - relu(u))^2 + (u - z)^2.
double update_U_scalar(double z, double a);
// Elementwise update_U_scalar on z = theta_d x_d, a = x_{d+1}.
Matrix update_U_from_product(const Matrix& z, const Matrix& next_x);
Matrix update_U(std::size_t d, const LipschitzMLP& model, const SplitState& state);

enum class ProxKind { kNone, kL2, kL1 };

ProxKind parse_prox_kind(std::string_view name);
std::string_view prox_kind_name(ProxKind kind);

// argmin_t r(t) + (1/2 eta) (t - v)^2 with r = 0, t^2/2 or |t|.
double prox_scalar(ProxKind kind, double eta, double v);
Matrix prox(ProxKind kind, double eta, const Matrix& v);

struct SmoothnessReport {
  std::size_t layer = 0;
  double beta = 0.0;   // gamma * lambda_max(x x^T / b)
  double omega = 0.0;  // gamma * lambda_min(x x^T / b), clipped at 0
  double X = 0.0;      // max column norm squared of x_d
  double beta_bound = 0.0;          // gamma * X
  double beta_bound_squared = 0.0;  // gamma * X^2
};

// Constants of the theta_d subproblem from the current batch activations x_d.
SmoothnessReport smoothness_constants(std::size_t d, const SplitState& state);
SmoothnessReport smoothness_from_activations(std::size_t d, const Matrix& x, double gamma);

// max(|1 - eta omega|, |1 - eta beta|).
double lipschitz_F(double eta, double beta, double omega);

}  // namespace dpsbcd

#endif  // DPSBCD_SPLITTING_HPP_
