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

#ifndef DPSBCD_NUMERICS_HPP_
#define DPSBCD_NUMERICS_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <string_view>

#include "dpsbcd/matrix.hpp"

namespace dpsbcd::numerics {

// Seeded 64-bit generator that counts the raw draws it hands out, so a stream
// can be checkpointed as (seed, position) and replayed bit-exactly.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}
  // Resumes the stream `seed` after `position` raw draws.
  static Rng at(std::uint64_t seed, std::uint64_t position);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() {
    ++position_;
    return engine_();
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return position_; }

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a parent seed and a label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct PowerIterationOptions {
  int max_iters = 1000;
  double tol = 1e-9;  // stop once the relative change in the estimate drops below
  std::uint64_t fallback_seed = 0x5eedULL;
};

// Estimate of the largest singular value of `a`.
//
// Iterates v <- A^T A v from the normalized all-ones vector. If that start lies
// (numerically) in the null space of A, a seeded Gaussian start is used
// instead. Returns 0 for a zero matrix; rejects non-finite entries.
double power_iteration(const Matrix& a, const PowerIterationOptions& options = {});
// Same, starting from `start` when it has a.cols() entries and is not in the
// null space. On return `start` holds the final right singular vector estimate,
// so repeated calls on slowly changing matrices converge in a few steps.
double power_iteration(const Matrix& a, std::vector<double>& start,
                       const PowerIterationOptions& options = {});

// Solves A X = B for symmetric positive-definite A via Cholesky. Rejects
// asymmetric or indefinite A with std::invalid_argument.
Matrix solve_spd(const Matrix& a, const Matrix& b);

struct EigenRange {
  double min = 0.0;
  double max = 0.0;
};

// Smallest and largest eigenvalues of a symmetric matrix (Householder
// tridiagonalization followed by Sturm-sequence bisection).
EigenRange symmetric_eigen_range(const Matrix& a);

// rows x cols matrix of i.i.d. N(0, variance) draws from `rng`.
Matrix gaussian_sample(Rng& rng, std::size_t rows, std::size_t cols, double variance);

using ScalarFunction = std::function<double(const Matrix&)>;

// Entrywise central difference (f(x + h e) - f(x - h e)) / 2h.
Matrix fd_gradient(const ScalarFunction& f, const Matrix& at, double h);

}  // namespace dpsbcd::numerics

#endif  // DPSBCD_NUMERICS_HPP_
