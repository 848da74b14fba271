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

// Dense kernels behind the training loop.
//
// The top-level functions are cache-blocked and parallelized with OpenMP over
// disjoint output rows (or right-hand-side column slabs), so every output entry
// is accumulated in the same order no matter how many threads run: results are
// bit-identical across thread counts. The `serial` namespace holds plain loop
// reference versions used by the tests and the benchmark.

#ifndef DPSBCD_KERNELS_HPP_
#define DPSBCD_KERNELS_HPP_

#include "dpsbcd/matrix.hpp"

namespace dpsbcd::kernels {

// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a * a^T
Matrix gram(const Matrix& a);

// Lower Cholesky factor of a symmetric positive-definite matrix. Throws
// std::invalid_argument on a non-positive pivot.
Matrix cholesky(const Matrix& a);
// Overwrites b with X solving (L L^T) X = b.
void cholesky_solve_inplace(const Matrix& lower, Matrix& b);

int max_threads() noexcept;

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix gram(const Matrix& a);
void cholesky_solve_inplace(const Matrix& lower, Matrix& b);

}  // namespace serial

}  // namespace dpsbcd::kernels

#endif  // DPSBCD_KERNELS_HPP_
