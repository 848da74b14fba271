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

#include "dpsbcd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dpsbcd::kernels {
namespace {

constexpr std::size_t kTileRows = 4;
constexpr std::size_t kTileCols = 8;
constexpr std::size_t kBlockCols = 256;
constexpr std::size_t kBlockDepth = 128;
constexpr std::size_t kSolveSlab = 128;

void check_inner(const Matrix& a, const Matrix& b, std::size_t a_inner, std::size_t b_inner,
                 const char* what) {
  if (a_inner != b_inner) {
    throw std::invalid_argument(std::string(what) + ": inner dimensions " +
                                std::to_string(a_inner) + " and " + std::to_string(b_inner) +
                                " differ (" + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()) + ")");
  }
}

// Four-wide double vector; lowers to AVX registers when available.
using Vec4 = double __attribute__((vector_size(32)));

inline Vec4 load4(const double* p) {
  Vec4 v;
  __builtin_memcpy(&v, p, sizeof(v));
  return v;
}

inline void store4(double* p, Vec4 v) { __builtin_memcpy(p, &v, sizeof(v)); }

// c[0:4, 0:8] += a[0:4, p0:p1] * b[p0:p1, 0:8]
inline void micro_tile(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                       double* c, std::size_t ldc, std::size_t p0, std::size_t p1) {
  Vec4 c00 = load4(c), c01 = load4(c + 4);
  Vec4 c10 = load4(c + ldc), c11 = load4(c + ldc + 4);
  Vec4 c20 = load4(c + 2 * ldc), c21 = load4(c + 2 * ldc + 4);
  Vec4 c30 = load4(c + 3 * ldc), c31 = load4(c + 3 * ldc + 4);
  for (std::size_t p = p0; p < p1; ++p) {
    const Vec4 b0 = load4(b + p * ldb);
    const Vec4 b1 = load4(b + p * ldb + 4);
    const double a0 = a[p], a1 = a[lda + p], a2 = a[2 * lda + p], a3 = a[3 * lda + p];
    c00 += a0 * b0;
    c01 += a0 * b1;
    c10 += a1 * b0;
    c11 += a1 * b1;
    c20 += a2 * b0;
    c21 += a2 * b1;
    c30 += a3 * b0;
    c31 += a3 * b1;
  }
  store4(c, c00);
  store4(c + 4, c01);
  store4(c + ldc, c10);
  store4(c + ldc + 4, c11);
  store4(c + 2 * ldc, c20);
  store4(c + 2 * ldc + 4, c21);
  store4(c + 3 * ldc, c30);
  store4(c + 3 * ldc + 4, c31);
}

// Scalar edge path with the same per-entry accumulation order as micro_tile.
inline void edge_tile(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                      double* c, std::size_t ldc, std::size_t rows, std::size_t cols,
                      std::size_t p0, std::size_t p1) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t s = 0; s < cols; ++s) {
      double acc = c[r * ldc + s];
      for (std::size_t p = p0; p < p1; ++p) acc += a[r * lda + p] * b[p * ldb + s];
      c[r * ldc + s] = acc;
    }
  }
}

}  // namespace

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a, b, a.cols(), b.rows(), "matmul");
  const std::size_t m = a.rows();
  const std::size_t n = b.cols();
  const std::size_t k = a.cols();
  Matrix c(m, n);
  if (m == 0 || n == 0 || k == 0) return c;

  const double* ad = a.data();
  const double* bd = b.data();
  double* cd = c.data();
  const auto row_tiles = static_cast<long>((m + kTileRows - 1) / kTileRows);

  for (std::size_t jb = 0; jb < n; jb += kBlockCols) {
    const std::size_t je = std::min(n, jb + kBlockCols);
    for (std::size_t pb = 0; pb < k; pb += kBlockDepth) {
      const std::size_t pe = std::min(k, pb + kBlockDepth);
#pragma omp parallel for schedule(static)
      for (long t = 0; t < row_tiles; ++t) {
        const std::size_t i = static_cast<std::size_t>(t) * kTileRows;
        const std::size_t rows = std::min(kTileRows, m - i);
        std::size_t j = jb;
        if (rows == kTileRows) {
          for (; j + kTileCols <= je; j += kTileCols) {
            micro_tile(ad + i * k, k, bd + j, n, cd + i * n + j, n, pb, pe);
          }
        }
        if (j < je) edge_tile(ad + i * k, k, bd + j, n, cd + i * n + j, n, rows, je - j, pb, pe);
      }
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_inner(a, b, a.rows(), b.rows(), "matmul_tn");
  return matmul(a.transposed(), b);
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_inner(a, b, a.cols(), b.cols(), "matmul_nt");
  return matmul(a, b.transposed());
}

Matrix gram(const Matrix& a) { return matmul(a, a.transposed()); }

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    const auto lj = l.row(j);
    for (std::size_t p = 0; p < j; ++p) d -= lj[p] * lj[p];
    if (!(d > 0.0)) {
      throw std::invalid_argument("cholesky: matrix is not positive definite (pivot " +
                                  std::to_string(j) + " = " + std::to_string(d) + ")");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = l.row(i);
      double s = a(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= li[p] * lj[p];
      li[j] = s / ljj;
    }
  }
  return l;
}

void cholesky_solve_inplace(const Matrix& lower, Matrix& b) {
  const std::size_t n = lower.rows();
  if (lower.cols() != n || b.rows() != n) {
    throw std::invalid_argument("cholesky_solve: dimension mismatch");
  }
  const std::size_t cols = b.cols();
  const auto slabs = static_cast<long>((cols + kSolveSlab - 1) / kSolveSlab);
  double* bd = b.data();

#pragma omp parallel for schedule(static)
  for (long s = 0; s < slabs; ++s) {
    const std::size_t c0 = static_cast<std::size_t>(s) * kSolveSlab;
    const std::size_t c1 = std::min(cols, c0 + kSolveSlab);
    // L y = b
    for (std::size_t i = 0; i < n; ++i) {
      double* yi = bd + i * cols;
      for (std::size_t p = 0; p < i; ++p) {
        const double lip = lower(i, p);
        const double* yp = bd + p * cols;
        for (std::size_t c = c0; c < c1; ++c) yi[c] -= lip * yp[c];
      }
      const double inv = 1.0 / lower(i, i);
      for (std::size_t c = c0; c < c1; ++c) yi[c] *= inv;
    }
    // L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
      double* xi = bd + ii * cols;
      for (std::size_t p = ii + 1; p < n; ++p) {
        const double lpi = lower(p, ii);
        const double* xp = bd + p * cols;
        for (std::size_t c = c0; c < c1; ++c) xi[c] -= lpi * xp[c];
      }
      const double inv = 1.0 / lower(ii, ii);
      for (std::size_t c = c0; c < c1; ++c) xi[c] *= inv;
    }
  }
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_inner(a, b, a.cols(), b.rows(), "serial::matmul");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      c(i, j) = s;
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_inner(a, b, a.rows(), b.rows(), "serial::matmul_tn");
  Matrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.rows(); ++p) s += a(p, i) * b(p, j);
      c(i, j) = s;
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_inner(a, b, a.cols(), b.cols(), "serial::matmul_nt");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(j, p);
      c(i, j) = s;
    }
  }
  return c;
}

Matrix gram(const Matrix& a) { return matmul_nt(a, a); }

void cholesky_solve_inplace(const Matrix& lower, Matrix& b) {
  const std::size_t n = lower.rows();
  if (lower.cols() != n || b.rows() != n) {
    throw std::invalid_argument("serial::cholesky_solve: dimension mismatch");
  }
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = b(i, c);
      for (std::size_t p = 0; p < i; ++p) s -= lower(i, p) * b(p, c);
      b(i, c) = s / lower(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = b(i, c);
      for (std::size_t p = i + 1; p < n; ++p) s -= lower(p, i) * b(p, c);
      b(i, c) = s / lower(i, i);
    }
  }
}

}  // namespace serial
}  // namespace dpsbcd::kernels
