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

#include <gtest/gtest.h>
#include <omp.h>

#include <tuple>

#include "dpsbcd/kernels.hpp"
#include "dpsbcd/numerics.hpp"
#include "oracles.hpp"

namespace dpsbcd::kernels {
namespace {

using oracles::random_matrix;

class Shapes : public ::testing::TestWithParam<std::tuple<int, int, int>> {};

TEST_P(Shapes, ParallelMatchesSerial) {
  const auto [m, k, n] = GetParam();
  numerics::Rng rng(static_cast<std::uint64_t>(m * 10007 + k * 101 + n));
  const Matrix a = random_matrix(rng, m, k), b = random_matrix(rng, k, n);
  const Matrix at = random_matrix(rng, k, m), bt = random_matrix(rng, n, k);
  const double tol = 1e-12 * static_cast<double>(k);
  EXPECT_LT(max_abs(matmul(a, b) - serial::matmul(a, b)), tol);
  EXPECT_LT(max_abs(matmul_tn(at, b) - serial::matmul_tn(at, b)), tol);
  EXPECT_LT(max_abs(matmul_nt(a, bt) - serial::matmul_nt(a, bt)), tol);
  EXPECT_LT(max_abs(gram(a) - serial::gram(a)), tol);
  const Matrix g = gram(a);
  EXPECT_EQ(g, g.transposed());
}

INSTANTIATE_TEST_SUITE_P(Kernels, Shapes,
                         ::testing::Values(std::make_tuple(1, 1, 1), std::make_tuple(3, 5, 7),
                                           std::make_tuple(17, 1, 9),
                                           std::make_tuple(64, 64, 64),
                                           std::make_tuple(201, 200, 97),
                                           std::make_tuple(5, 200, 960)));

TEST(Kernels, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), std::invalid_argument);
  EXPECT_THROW(matmul_tn(Matrix(2, 3), Matrix(3, 3)), std::invalid_argument);
  EXPECT_THROW(matmul_nt(Matrix(2, 3), Matrix(2, 2)), std::invalid_argument);
}

TEST(Kernels, BitIdenticalAcrossThreadCounts) {
  numerics::Rng rng(5);
  const Matrix a = random_matrix(rng, 150, 90), b = random_matrix(rng, 90, 130);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const Matrix one = matmul(a, b);
  const Matrix g1 = gram(a);
  omp_set_num_threads(4);
  const Matrix four = matmul(a, b);
  const Matrix g4 = gram(a);
  omp_set_num_threads(saved);
  EXPECT_EQ(one, four);
  EXPECT_EQ(g1, g4);
}

TEST(Cholesky, FactorReproducesMatrix) {
  numerics::Rng rng(12);
  const Matrix a = oracles::random_spd(rng, 30);
  const Matrix l = cholesky(a);
  for (std::size_t i = 0; i < l.rows(); ++i) {
    for (std::size_t j = i + 1; j < l.cols(); ++j) EXPECT_EQ(l(i, j), 0.0);
  }
  EXPECT_LT(max_abs(serial::matmul_nt(l, l) - a), 1e-10);
}

TEST(Cholesky, SolveMatchesSerialAndOracle) {
  numerics::Rng rng(13);
  const Matrix a = oracles::random_spd(rng, 25);
  const Matrix b = random_matrix(rng, 25, 40);
  const Matrix l = cholesky(a);
  Matrix x = b, xs = b;
  cholesky_solve_inplace(l, x);
  serial::cholesky_solve_inplace(l, xs);
  EXPECT_LT(max_abs(x - xs), 1e-12);
  EXPECT_LT(max_abs(x - oracles::solve(a, b)), 1e-9);
}

TEST(Cholesky, NonPositivePivotThrows) {
  EXPECT_THROW(cholesky(Matrix(2, 2, {1, 2, 2, 1})), std::invalid_argument);
}

}  // namespace
}  // namespace dpsbcd::kernels
