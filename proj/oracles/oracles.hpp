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

// Reference computations that share no code path with the library: Eigen for
// dense linear algebra, plain loops and 1-D searches for the closed forms, and
// 50-digit floating point with direct summation for the accountant.

#ifndef DPSBCD_ORACLES_HPP_
#define DPSBCD_ORACLES_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "dpsbcd/accountant.hpp"
#include "dpsbcd/matrix.hpp"
#include "dpsbcd/numerics.hpp"
#include "dpsbcd/splitting.hpp"

namespace dpsbcd::oracles {

// Largest singular value from a full SVD.
double spectral_norm(const Matrix& a);
// Smallest and largest eigenvalue of a symmetric matrix.
numerics::EigenRange eigen_range(const Matrix& a);
// Dense LU solve.
Matrix solve(const Matrix& a, const Matrix& b);

// Grid scan followed by golden-section refinement of a 1-D function on [lo, hi].
double minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                   int grid = 4001);

// argmin_u (a - relu(u))^2 + (u - z)^2 by search.
double brute_force_U(double z, double a);
// argmin_t r(t) + (t - v)^2 / (2 eta) by search, r given as a function.
double numerical_prox(const std::function<double(double)>& r, double eta, double v);

// x_0..x_D recomputed with naive triple loops.
std::vector<Matrix> naive_forward(const std::vector<Matrix>& weights, const Matrix& inputs);

// Gradient descent on the strongly convex x_D subproblem until the gradient
// norm drops below `tol`.
Matrix gd_prox_loss(const Matrix& theta, const Matrix& v, const Matrix& targets, double gamma,
                    double tol = 1e-10);

// Lagrangian summed term by term with naive loops.
double naive_lagrangian(const std::vector<Matrix>& weights, const SplitState& state,
                        const Matrix& targets);

// c(k, j) by the double sum over earlier iterations, in 50-digit arithmetic.
double naive_lsi(const PrivacyConfig& cfg, std::int64_t k, std::int64_t j);
// eps(alpha, j0) evaluated with explicit ratios, powers and products
// in 50-digit arithmetic (no logarithms).
EpsilonJ0 naive_epsilon_j0(const PrivacyConfig& cfg, std::int64_t j0);

// Random helpers for oracle suites.
Matrix random_matrix(numerics::Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0);
Matrix random_spd(numerics::Rng& rng, std::size_t n);

}  // namespace dpsbcd::oracles

#endif  // DPSBCD_ORACLES_HPP_
