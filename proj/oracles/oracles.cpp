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

#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dpsbcd::oracles {
namespace {

using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Real = boost::multiprecision::cpp_bin_float_50;

Dense to_eigen(const Matrix& m) {
  Dense out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

Matrix from_eigen(const Dense& d) {
  Matrix out(static_cast<std::size_t>(d.rows()), static_cast<std::size_t>(d.cols()));
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = d(i, j);
    }
  }
  return out;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }

// o(t') with epochs past the budget reusing the last epoch, as the table does.
double noise_at(const PrivacyConfig& cfg, std::int64_t t) {
  const auto m = static_cast<std::int64_t>(cfg.n / cfg.b);
  const std::int64_t k = std::min(t / m, std::max<std::int64_t>(cfg.K - 1, 0));
  return eval_schedule(cfg.schedule, cfg.eta, k, t % m);
}

// c(t) for every t in [0, (K + 1) m] by direct double summation.
std::vector<Real> lsi_table_mp(const PrivacyConfig& cfg) {
  const auto m = static_cast<std::int64_t>(cfg.n / cfg.b);
  const std::int64_t T = (cfg.K + 1) * m;
  const Real q = Real(cfg.L_F) * Real(cfg.L_T) * Real(cfg.L_F) * Real(cfg.L_T);
  std::vector<Real> qpow(static_cast<std::size_t>(T + 1));
  qpow[0] = 1;
  for (std::int64_t i = 1; i <= T; ++i) qpow[static_cast<std::size_t>(i)] = qpow[static_cast<std::size_t>(i - 1)] * q;
  std::vector<Real> o(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) o[static_cast<std::size_t>(t)] = noise_at(cfg, t);
  const Real pre = Real(2) * Real(cfg.eta) * Real(cfg.L_T) * Real(cfg.L_T);
  std::vector<Real> c(static_cast<std::size_t>(T + 1));
  c[0] = Real(cfg.c0);
  for (std::int64_t t = 1; t <= T; ++t) {
    Real s = 0;
    for (std::int64_t tp = 0; tp < t; ++tp) {
      s += o[static_cast<std::size_t>(tp)] * qpow[static_cast<std::size_t>(t - tp - 1)];
    }
    c[static_cast<std::size_t>(t)] = Real(1) / (pre * s);
  }
  return c;
}

}  // namespace

double spectral_norm(const Matrix& a) {
  if (a.empty()) return 0.0;
  Eigen::JacobiSVD<Dense> svd(to_eigen(a));
  return svd.singularValues()(0);
}

numerics::EigenRange eigen_range(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Dense> es(to_eigen(a), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

Matrix solve(const Matrix& a, const Matrix& b) {
  return from_eigen(to_eigen(a).partialPivLu().solve(to_eigen(b)));
}

double minimize_1d(const std::function<double(double)>& f, double lo, double hi, int grid) {
  if (!(hi > lo) || grid < 3) throw std::invalid_argument("minimize_1d: bad bracket");
  const double step = (hi - lo) / (grid - 1);
  int best = 0;
  double best_val = f(lo);
  for (int i = 1; i < grid; ++i) {
    const double v = f(lo + step * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, grid - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double brute_force_U(double z, double a) {
  const auto f = [z, a](double u) {
    const double r = a - relu(u);
    return r * r + (u - z) * (u - z);
  };
  const double lo = std::min(z, -std::abs(a)) - 1.0;
  const double hi = std::max(z, std::abs(a)) + 1.0;
  return minimize_1d(f, lo, hi);
}

double numerical_prox(const std::function<double(double)>& r, double eta, double v) {
  const auto f = [&](double t) { return r(t) + (t - v) * (t - v) / (2.0 * eta); };
  const double span = std::abs(v) + 2.0 * eta + 1.0;
  return minimize_1d(f, v - span, v + span);
}

std::vector<Matrix> naive_forward(const std::vector<Matrix>& weights, const Matrix& inputs) {
  std::vector<Matrix> xs{inputs};
  for (std::size_t d = 0; d + 1 < weights.size(); ++d) {
    const Matrix& t = weights[d];
    const Matrix& x = xs.back();
    Matrix next(t.rows(), x.cols());
    for (std::size_t i = 0; i < t.rows(); ++i) {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        double s = 0.0;
        for (std::size_t p = 0; p < t.cols(); ++p) s += t(i, p) * x(p, c);
        next(i, c) = relu(s);
      }
    }
    xs.push_back(std::move(next));
  }
  return xs;
}

Matrix gd_prox_loss(const Matrix& theta, const Matrix& v, const Matrix& targets, double gamma,
                    double tol) {
  const Dense t = to_eigen(theta);
  const Dense vv = to_eigen(v);
  const Dense y = to_eigen(targets);
  Eigen::JacobiSVD<Dense> svd(t);
  const double L = svd.singularValues()(0) * svd.singularValues()(0) + gamma;
  Dense x = vv;
  for (int it = 0; it < 1000000; ++it) {
    const Dense g = t.transpose() * (t * x - y) + gamma * (x - vv);
    if (g.norm() < tol) break;
    x -= g / L;
  }
  return from_eigen(x);
}

double naive_lagrangian(const std::vector<Matrix>& weights, const SplitState& state,
                        const Matrix& targets) {
  const std::size_t D = weights.size() - 1;
  const double b = static_cast<double>(state.x[0].cols());
  auto product = [](const Matrix& t, const Matrix& x, std::size_t i, std::size_t c) {
    double s = 0.0;
    for (std::size_t p = 0; p < t.cols(); ++p) s += t(i, p) * x(p, c);
    return s;
  };
  double total = 0.0;
  for (std::size_t i = 0; i < weights[D].rows(); ++i) {
    for (std::size_t c = 0; c < targets.cols(); ++c) {
      const double r = product(weights[D], state.x[D], i, c) - targets(i, c);
      total += 0.5 * r * r / b;
    }
  }
  for (std::size_t d = 0; d < D; ++d) {
    for (std::size_t i = 0; i < weights[d].rows(); ++i) {
      for (std::size_t c = 0; c < state.x[0].cols(); ++c) {
        const double r1 = state.x[d + 1](i, c) - relu(state.U[d](i, c));
        const double r2 = state.U[d](i, c) - product(weights[d], state.x[d], i, c);
        total += 0.5 * state.gamma * (r1 * r1 + r2 * r2) / b;
      }
    }
  }
  return total;
}

double naive_lsi(const PrivacyConfig& cfg, std::int64_t k, std::int64_t j) {
  const auto m = static_cast<std::int64_t>(cfg.n / cfg.b);
  const std::int64_t t = k * m + j;
  if (t == 0) return cfg.c0;
  const Real q = Real(cfg.L_F) * Real(cfg.L_T) * Real(cfg.L_F) * Real(cfg.L_T);
  Real s = 0;
  // Direct double sum: whole earlier epochs, then earlier batches of epoch k.
  for (std::int64_t kp = 0; kp < k; ++kp) {
    for (std::int64_t jp = 0; jp < m; ++jp) {
      s += Real(noise_at(cfg, kp * m + jp)) * pow(q, (k - kp) * m - jp + j - 1);
    }
  }
  for (std::int64_t jp = 0; jp < j; ++jp) {
    s += Real(noise_at(cfg, k * m + jp)) * pow(q, j - jp - 1);
  }
  const Real c = Real(1) / (Real(2) * Real(cfg.eta) * Real(cfg.L_T) * Real(cfg.L_T) * s);
  return static_cast<double>(c);
}

EpsilonJ0 naive_epsilon_j0(const PrivacyConfig& cfg, std::int64_t j0) {
  const auto m = static_cast<std::int64_t>(cfg.n / cfg.b);
  const std::int64_t K = cfg.K;
  const auto c = lsi_table_mp(cfg);
  auto at = [&](std::int64_t k, std::int64_t j) { return c[static_cast<std::size_t>(k * m + j)]; };
  const Real inv_q = Real(1) / (Real(cfg.L_F) * Real(cfg.L_T) * Real(cfg.L_F) * Real(cfg.L_T));
  const Real b = Real(static_cast<double>(cfg.b));
  const Real pre = Real(cfg.alpha) * Real(cfg.eta) * Real(cfg.sensitivity) *
                   Real(cfg.sensitivity) / (Real(4) * b * b);
  EpsilonJ0 out;
  Real total = 0;
  for (std::int64_t k = 0; k < K; ++k) {
    Real prod = 1;
    for (std::int64_t l = k; l <= K; ++l) prod *= at(l, j0 + 1) / at(l, j0);
    const Real ratio = at(k, j0 + 1) / at(K, m - 1) * pow(inv_q, (m - 1) * (K - k) - j0) * prod;
    const Real decay = pow(ratio, Real(-1) / (Real(cfg.L_T) * Real(cfg.L_T)));
    const Real term = pre / Real(eval_schedule(cfg.schedule, cfg.eta, k, j0)) * decay;
    out.contributions.push_back(static_cast<double>(term));
    total += term;
  }
  out.epsilon = static_cast<double>(total);
  return out;
}

Matrix random_matrix(numerics::Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = normal(rng);
  return m;
}

Matrix random_spd(numerics::Rng& rng, std::size_t n) {
  const Matrix g = random_matrix(rng, n, n);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < n; ++p) s += g(p, i) * g(p, j);
      a(i, j) = s;
    }
    a(i, i) += 1.0;
  }
  return a;
}

}  // namespace dpsbcd::oracles
