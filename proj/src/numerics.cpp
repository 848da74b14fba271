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

#include "dpsbcd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpsbcd/kernels.hpp"

namespace dpsbcd::numerics {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// u = A v
void apply(const Matrix& a, const std::vector<double>& v, std::vector<double>& u) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * v[j];
    u[i] = s;
  }
}

// v = A^T u
void apply_transposed(const Matrix& a, const std::vector<double>& u, std::vector<double>& v) {
  std::fill(v.begin(), v.end(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    const double ui = u[i];
    for (std::size_t j = 0; j < a.cols(); ++j) v[j] += r[j] * ui;
  }
}

// Number of eigenvalues of the symmetric tridiagonal (diag, off) below x.
std::size_t sturm_count(const std::vector<double>& diag, const std::vector<double>& off,
                        double x) {
  constexpr double kTiny = std::numeric_limits<double>::min();
  std::size_t count = 0;
  double q = diag[0] - x;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    if (q == 0.0) q = kTiny;
    q = diag[i] - x - off[i - 1] * off[i - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

// Smallest x such that at least `k` eigenvalues lie below or at x.
double bisect_eigenvalue(const std::vector<double>& diag, const std::vector<double>& off,
                         std::size_t k, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(diag, off, mid) >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Rng Rng::at(std::uint64_t seed, std::uint64_t position) {
  Rng rng(seed);
  rng.engine_.discard(position);
  rng.position_ = position;
  return rng;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  // FNV-1a over the label, mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double power_iteration(const Matrix& a, const PowerIterationOptions& options) {
  std::vector<double> start;
  return power_iteration(a, start, options);
}

double power_iteration(const Matrix& a, std::vector<double>& start,
                       const PowerIterationOptions& options) {
  if (a.empty()) throw std::invalid_argument("power_iteration: empty matrix");
  if (options.max_iters < 1) throw std::invalid_argument("power_iteration: max_iters < 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("power_iteration: tol must be > 0");
  if (!a.all_finite()) throw std::invalid_argument("power_iteration: non-finite entries");
  const double scale = frobenius_norm(a);
  if (scale == 0.0) return 0.0;

  const std::size_t n = a.cols();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  if (start.size() == n && norm2(start) > 0.0 && std::isfinite(norm2(start))) {
    const double ns = norm2(start);
    for (std::size_t i = 0; i < n; ++i) v[i] = start[i] / ns;
  }
  std::vector<double> u(a.rows());
  apply(a, v, u);
  if (norm2(u) <= 1e-12 * scale) {
    Rng rng(options.fallback_seed);
    std::normal_distribution<double> normal;
    for (double& x : v) x = normal(rng);
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
    apply(a, v, u);
  }

  double estimate = norm2(u);
  for (int it = 0; it < options.max_iters; ++it) {
    apply_transposed(a, u, v);
    const double nv = norm2(v);
    if (nv == 0.0) break;
    for (double& x : v) x /= nv;
    apply(a, v, u);
    const double next = norm2(u);
    const bool converged = std::abs(next - estimate) < options.tol * next;
    estimate = next;
    if (converged) break;
  }
  start = v;
  return estimate;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols()) throw std::invalid_argument("solve_spd: matrix is not square");
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("solve_spd: right-hand side has " + std::to_string(b.rows()) +
                                " rows, expected " + std::to_string(a.rows()));
  }
  if (!a.all_finite() || !b.all_finite()) {
    throw std::invalid_argument("solve_spd: non-finite entries");
  }
  const double tol = 1e-12 * std::max(1.0, max_abs(a));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > tol) {
        throw std::invalid_argument("solve_spd: matrix is not symmetric at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
  const Matrix lower = kernels::cholesky(a);
  Matrix x = b;
  kernels::cholesky_solve_inplace(lower, x);
  return x;
}

EigenRange symmetric_eigen_range(const Matrix& input) {
  if (input.rows() != input.cols() || input.empty()) {
    throw std::invalid_argument("symmetric_eigen_range: matrix must be square and non-empty");
  }
  const std::size_t n = input.rows();
  Matrix a = input;
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0, 0.0);
  std::vector<double> v(n), w(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    double alpha = 0.0;
    for (std::size_t i = 0; i < m; ++i) alpha += a(k + 1 + i, k) * a(k + 1 + i, k);
    alpha = std::sqrt(alpha);
    const double x0 = a(k + 1, k);
    if (alpha == 0.0) {
      off[k] = 0.0;
      continue;
    }
    if (x0 > 0.0) alpha = -alpha;
    for (std::size_t i = 0; i < m; ++i) v[i] = a(k + 1 + i, k);
    v[0] -= alpha;
    double vn = 0.0;
    for (std::size_t i = 0; i < m; ++i) vn += v[i] * v[i];
    vn = std::sqrt(vn);
    off[k] = alpha;
    if (vn == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i) v[i] /= vn;
    // p = A_sub v, w = p - (v^T p) v, A_sub -= 2 (v w^T + w v^T)
    double kdot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = a.row(k + 1 + i);
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += r[k + 1 + j] * v[j];
      w[i] = s;
      kdot += v[i] * s;
    }
    for (std::size_t i = 0; i < m; ++i) w[i] -= kdot * v[i];
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = a.row(k + 1 + i);
      const double vi = v[i];
      const double wi = w[i];
      for (std::size_t j = 0; j < m; ++j) r[k + 1 + j] -= 2.0 * (vi * w[j] + wi * v[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
  if (n >= 2) off[n - 2] = a(n - 1, n - 2);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(off[i - 1]);
    if (i + 1 < n) radius += std::abs(off[i]);
    lo = std::min(lo, diag[i] - radius);
    hi = std::max(hi, diag[i] + radius);
  }
  const double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
  lo -= pad;
  hi += pad;
  return {bisect_eigenvalue(diag, off, 1, lo, hi), bisect_eigenvalue(diag, off, n, lo, hi)};
}

Matrix gaussian_sample(Rng& rng, std::size_t rows, std::size_t cols, double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw std::invalid_argument("gaussian_sample: variance must be finite and >= 0, got " +
                                std::to_string(variance));
  }
  Matrix out(rows, cols);
  if (variance == 0.0) return out;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance));
  for (double& x : out.values()) x = normal(rng);
  return out;
}

Matrix fd_gradient(const ScalarFunction& f, const Matrix& at, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be > 0");
  Matrix probe = at;
  Matrix grad(at.rows(), at.cols());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double x = probe.values()[i];
    probe.values()[i] = x + h;
    const double up = f(probe);
    probe.values()[i] = x - h;
    const double down = f(probe);
    probe.values()[i] = x;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::domain_error("fd_gradient: function returned a non-finite value");
    }
    grad.values()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace dpsbcd::numerics
