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

#include <cmath>
#include <set>
#include <stdexcept>

#include "dpsbcd/kernels.hpp"
#include "dpsbcd/numerics.hpp"
#include "oracles.hpp"

namespace dpsbcd::numerics {
namespace {

using oracles::random_matrix;

TEST(PowerIteration, IdentityIsOne) {
  EXPECT_NEAR(power_iteration(Matrix::identity(3)), 1.0, 1e-12);
}

TEST(PowerIteration, DiagonalPicksLargest) {
  EXPECT_NEAR(power_iteration(Matrix(2, 2, {3, 0, 0, 1})), 3.0, 1e-9);
}

TEST(PowerIteration, Random50MatchesSvd) {
  Rng rng(7);
  const Matrix a = random_matrix(rng, 50, 50);
  PowerIterationOptions o;
  o.max_iters = 20000;
  o.tol = 1e-15;
  const double sigma = oracles::spectral_norm(a);
  EXPECT_NEAR(power_iteration(a, o), sigma, 1e-6 * sigma);
}

TEST(PowerIteration, ZeroMatrixGivesZero) {
  EXPECT_EQ(power_iteration(Matrix(4, 3)), 0.0);
}

TEST(PowerIteration, OnesVectorInNullSpaceFallsBack) {
  // A 1 = 0, so the default start carries no signal.
  const Matrix a(2, 2, {1, -1, 2, -2});
  EXPECT_NEAR(power_iteration(a), oracles::spectral_norm(a), 1e-9);
}

TEST(PowerIteration, RejectsNonFinite) {
  Matrix a = Matrix::identity(2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(power_iteration(a), std::invalid_argument);
}

TEST(SolveSpd, IdentitySystemReturnsRhs) {
  Rng rng(1);
  const Matrix b = random_matrix(rng, 4, 3);
  EXPECT_EQ(solve_spd(Matrix::identity(4), b), b);
}

TEST(SolveSpd, ScalarSystem) {
  const Matrix x = solve_spd(2.0 * Matrix::identity(3), Matrix::identity(3));
  EXPECT_LT(frobenius_norm(x - 0.5 * Matrix::identity(3)), 1e-15);
}

TEST(SolveSpd, Random20Residual) {
  Rng rng(3);
  const Matrix a = oracles::random_spd(rng, 20);
  const Matrix b = random_matrix(rng, 20, 5);
  const Matrix x = solve_spd(a, b);
  EXPECT_LT(frobenius_norm(kernels::serial::matmul(a, x) - b), 1e-10);
  EXPECT_LT(frobenius_norm(x - oracles::solve(a, b)), 1e-9);
}

TEST(SolveSpd, RejectsAsymmetricAndIndefinite) {
  EXPECT_THROW(solve_spd(Matrix(2, 2, {2, 1, 0, 2}), Matrix(2, 1, 1.0)), std::invalid_argument);
  EXPECT_THROW(solve_spd(Matrix(2, 2, {1, 0, 0, -1}), Matrix(2, 1, 1.0)), std::invalid_argument);
  EXPECT_THROW(solve_spd(Matrix::identity(2), Matrix(3, 1)), std::invalid_argument);
}

TEST(SymmetricEigenRange, MatchesDenseSolver) {
  Rng rng(11);
  for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
    const Matrix g = random_matrix(rng, n, n + 3);
    const Matrix a = kernels::serial::gram(g) * (1.0 / 7.0);
    const auto got = symmetric_eigen_range(a);
    const auto ref = oracles::eigen_range(a);
    EXPECT_NEAR(got.max, ref.max, 1e-10 * std::max(1.0, ref.max)) << n;
    EXPECT_NEAR(got.min, ref.min, 1e-10 * std::max(1.0, ref.max)) << n;
  }
}

TEST(SymmetricEigenRange, IndefiniteMatrix) {
  const auto r = symmetric_eigen_range(Matrix(2, 2, {0, 2, 2, 0}));
  EXPECT_NEAR(r.min, -2.0, 1e-12);
  EXPECT_NEAR(r.max, 2.0, 1e-12);
}

TEST(GaussianSample, ZeroVarianceGivesZeros) {
  Rng rng(5);
  EXPECT_EQ(gaussian_sample(rng, 3, 4, 0.0), Matrix(3, 4));
  EXPECT_EQ(rng.position(), 0u);
}

TEST(GaussianSample, NegativeVarianceThrows) {
  Rng rng(5);
  EXPECT_THROW(gaussian_sample(rng, 1, 1, -1.0), std::invalid_argument);
}

TEST(GaussianSample, MomentsMatchAtMillionDraws) {
  Rng rng(2024);
  const Matrix s = gaussian_sample(rng, 1000, 1000, 4.0);
  double sum = 0.0, sum2 = 0.0;
  for (double v : s.values()) {
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(s.size());
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  EXPECT_NEAR(var, 4.0, 0.02 * 4.0);
  // z-test at 4 sigma: sd of the mean is 2 / sqrt(n)
  EXPECT_LT(std::abs(mean), 4.0 * 2.0 / std::sqrt(n));
}

TEST(GaussianSample, ColumnsUncorrelated) {
  Rng rng(99);
  const Matrix s = gaussian_sample(rng, 200000, 2, 1.0);
  double c = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) c += s(i, 0) * s(i, 1);
  c /= static_cast<double>(s.rows());
  EXPECT_LT(std::abs(c), 4.0 / std::sqrt(static_cast<double>(s.rows())));
}

TEST(GaussianSample, SameSeedSameMatrix) {
  Rng a(17), b(17);
  EXPECT_EQ(gaussian_sample(a, 5, 6, 0.3), gaussian_sample(b, 5, 6, 0.3));
}

TEST(Rng, ResumeAtPositionReplays) {
  Rng a(42);
  for (int i = 0; i < 37; ++i) a();
  Rng b = Rng::at(42, a.position());
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(DeriveSeed, DistinctLabelsAndIndices) {
  std::set<std::uint64_t> seen;
  for (const char* label : {"init", "noise", "batches", "split", "generate"}) {
    seen.insert(derive_seed(1, label));
  }
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(1, i));
  EXPECT_EQ(seen.size(), 1005u);
  EXPECT_EQ(derive_seed(9, "noise"), derive_seed(9, "noise"));
  EXPECT_NE(derive_seed(9, "noise"), derive_seed(10, "noise"));
}

TEST(FdGradient, QuadraticIsExact) {
  Rng rng(8);
  const Matrix theta = random_matrix(rng, 3, 4);
  const auto f = [](const Matrix& t) { return 0.5 * frobenius_norm_squared(t); };
  EXPECT_LT(frobenius_norm(fd_gradient(f, theta, 1e-3) - theta), 1e-10);
}

TEST(FdGradient, ConstantGivesZero) {
  const auto f = [](const Matrix&) { return 3.5; };
  EXPECT_EQ(fd_gradient(f, Matrix(2, 2, 1.0), 1e-4), Matrix(2, 2));
}

TEST(FdGradient, NonFiniteValueThrows) {
  const auto f = [](const Matrix& t) { return std::log(t(0, 0)); };
  EXPECT_THROW(fd_gradient(f, Matrix(1, 1, 0.0), 1e-3), std::domain_error);
}

}  // namespace
}  // namespace dpsbcd::numerics
