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

#include "selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "dpsbcd/accountant.hpp"
#include "dpsbcd/kernels.hpp"
#include "dpsbcd/network.hpp"
#include "dpsbcd/numerics.hpp"
#include "oracles.hpp"

namespace dpsbcd::oracles {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

struct Instance {
  LipschitzMLP model;
  SplitState state;
  Matrix targets;
};

// Small random network with an arbitrary (not necessarily feasible) state.
Instance random_instance(numerics::Rng& rng) {
  std::uniform_int_distribution<int> depth(1, 3), width(1, 7), batch(1, 6);
  const int D = depth(rng);
  std::vector<std::size_t> widths;
  for (int i = 0; i <= D + 1; ++i) widths.push_back(static_cast<std::size_t>(width(rng)));
  const auto b = static_cast<std::size_t>(batch(rng));
  Instance in;
  for (int d = 0; d <= D; ++d) {
    in.model.weights.push_back(random_matrix(rng, widths[d + 1], widths[d], 0.7));
    in.model.caps.push_back(1.0);
  }
  std::uniform_real_distribution<double> g(0.5, 2.0);
  in.state.gamma = g(rng);
  for (int d = 0; d <= D; ++d) in.state.x.push_back(random_matrix(rng, widths[d], b));
  for (int d = 0; d < D; ++d) in.state.U.push_back(random_matrix(rng, widths[d + 1], b));
  in.targets = random_matrix(rng, widths[D + 1], b);
  return in;
}

template <class F>
SuiteResult timed(const std::string& name, F&& body) {
  const auto t0 = Clock::now();
  SuiteResult r;
  r.name = name;
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

double rel_err(const Matrix& a, const Matrix& ref) {
  const double denom = std::max(frobenius_norm(ref), 1e-300);
  return frobenius_norm(a - ref) / denom;
}

}  // namespace

SuiteResult check_update_U(int pairs, std::uint64_t seed) {
  return timed("update_U closed form vs 1-D search", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    std::uniform_real_distribution<double> zdist(-3.0, 3.0), adist(0.0, 3.0);
    double worst = 0.0;
    int failures = 0;
    for (int i = 0; i < pairs; ++i) {
      const double z = zdist(rng), a = adist(rng);
      const double err = std::abs(update_U_scalar(z, a) - brute_force_U(z, a));
      worst = std::max(worst, err);
      failures += err > 1e-6;
    }
    r.passed = failures == 0;
    r.detail = fmt("%.0f pairs, max |closed - search| = %.3g, failures %.0f", pairs, worst,
                   failures);
  });
}

SuiteResult check_update_x(int instances, std::uint64_t seed) {
  return timed("update_x stationarity", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    double worst = 0.0;
    int blocks = 0;
    for (int i = 0; i < instances; ++i) {
      Instance in = random_instance(rng);
      for (std::size_t d = 1; d <= in.model.depth(); ++d) {
        in.state.x[d] = update_x(d, in.model, in.state, in.targets);
        SplitState probe = in.state;
        const auto f = [&](const Matrix& xd) {
          probe.x[d] = xd;
          return naive_lagrangian(in.model.weights, probe, in.targets);
        };
        const Matrix g = numerics::fd_gradient(f, in.state.x[d], 1e-3);
        worst = std::max(worst, frobenius_norm(g));
        ++blocks;
      }
    }
    r.passed = worst < 1e-8;
    r.detail = fmt("%.0f layer blocks, max ||dL/dx_d|| = %.3g", blocks, worst);
  });
}

SuiteResult check_grad_theta(int instances, std::uint64_t seed) {
  return timed("grad_theta vs finite differences", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    double worst = 0.0;
    int blocks = 0;
    for (int i = 0; i < instances; ++i) {
      Instance in = random_instance(rng);
      for (std::size_t d = 0; d <= in.model.depth(); ++d) {
        const Matrix g = grad_theta(d, in.model, in.state, in.targets);
        auto weights = in.model.weights;
        const auto f = [&](const Matrix& t) {
          weights[d] = t;
          return naive_lagrangian(weights, in.state, in.targets);
        };
        const Matrix fd = numerics::fd_gradient(f, in.model.weights[d], 1e-4);
        const double scale = std::max(frobenius_norm(fd), 1e-8);
        worst = std::max(worst, frobenius_norm(g - fd) / scale);
        ++blocks;
      }
    }
    r.passed = worst < 1e-5;
    r.detail = fmt("%.0f layer blocks, max relative error = %.3g", blocks, worst);
  });
}

SuiteResult check_gram_bound(int batches, std::uint64_t seed) {
  return timed("Gram lambda_max vs gamma X_d", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    std::uniform_int_distribution<int> width(1, 30), batch(1, 60);
    std::uniform_real_distribution<double> gdist(0.5, 2.0);
    double worst_ratio = 0.0, worst_eig = 0.0;
    for (int i = 0; i < batches; ++i) {
      const auto w = static_cast<std::size_t>(width(rng));
      const auto b = static_cast<std::size_t>(batch(rng));
      // Alternate raw Gaussian batches and ReLU activations of a normalized layer.
      Matrix x = random_matrix(rng, w, b);
      if (i % 2) x = relu(kernels::matmul(normalize_layer(random_matrix(rng, w, w), 0.99), x));
      const double gamma = gdist(rng);
      const auto rep = smoothness_from_activations(0, x, gamma);
      if (rep.X > 0.0) worst_ratio = std::max(worst_ratio, rep.beta / (gamma * rep.X));
      Matrix gram = kernels::serial::gram(x);
      gram *= 1.0 / static_cast<double>(b);
      const auto ev = eigen_range(gram);
      const double scale = std::max(1.0, std::abs(ev.max));
      worst_eig = std::max(worst_eig, std::abs(rep.beta / gamma - std::max(0.0, ev.max)) / scale);
      worst_eig = std::max(worst_eig,
                           std::abs(rep.omega / gamma - std::max(0.0, ev.min)) / scale);
    }
    r.passed = worst_ratio <= 1.0 + 1e-12 && worst_eig < 1e-10;
    r.detail = fmt("%.0f batches, max beta/(gamma X) = %.12g, eigensolver gap %.3g", batches,
                   worst_ratio, worst_eig);
  });
}

SuiteResult check_contraction(int pairs_per_config, std::uint64_t seed) {
  return timed("gradient map contraction bound", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    struct Cfg {
      std::size_t in, out, b;
      double eta, scale;
      bool last;
    };
    const Cfg configs[] = {
        {5, 4, 50, 0.01, 1.0, false},  // omega > 0, small step
        {5, 4, 50, 0.9, 1.5, false},   // eta beta > 1
        {12, 6, 8, 0.3, 1.0, false},   // b < width, omega = 0
        {6, 5, 40, 0.2, 1.0, true},    // output layer
        {20, 200, 96, 0.01, 0.3, false},
    };
    double worst = -1e300;
    int checked = 0;
    for (const auto& c : configs) {
      SplitState s;
      s.gamma = 1.0;
      s.x = {random_matrix(rng, c.in, c.b, c.scale), random_matrix(rng, c.out, c.b)};
      s.U = {random_matrix(rng, c.out, c.b)};
      const Matrix targets = random_matrix(rng, c.out, c.b);
      const std::size_t d = c.last ? 1 : 0;
      if (c.last) {
        s.x = {random_matrix(rng, c.in, c.b), random_matrix(rng, c.in, c.b, c.scale)};
        s.U = {random_matrix(rng, c.in, c.b)};
      }
      const auto rep = smoothness_constants(d, s);
      const double lf = lipschitz_F(c.eta, rep.beta, rep.omega);
      const auto map = [&](const Matrix& theta) {
        Matrix g = grad_theta_from_product(d, kernels::matmul(theta, s.x[d]), s, targets);
        return theta - g * c.eta;
      };
      for (int p = 0; p < pairs_per_config; ++p) {
        const Matrix t1 = random_matrix(rng, c.out, c.in);
        const Matrix t2 = random_matrix(rng, c.out, c.in);
        const double lhs = frobenius_norm(map(t1) - map(t2));
        const double rhs = lf * frobenius_norm(t1 - t2) + 1e-8;
        worst = std::max(worst, lhs - rhs);
        ++checked;
      }
    }
    r.passed = worst <= 0.0;
    r.detail = fmt("%.0f pairs, max (lhs - bound) = %.3g", checked, worst);
  });
}

SuiteResult check_prox(int pairs, std::uint64_t seed, const ProxFunction& prox_fn) {
  return timed("prox catalog vs numerical argmin", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    std::uniform_real_distribution<double> vdist(-5.0, 5.0), edist(0.01, 2.0);
    const std::pair<ProxKind, std::function<double(double)>> kinds[] = {
        {ProxKind::kNone, [](double) { return 0.0; }},
        {ProxKind::kL2, [](double t) { return 0.5 * t * t; }},
        {ProxKind::kL1, [](double t) { return std::abs(t); }},
    };
    double worst_err = 0.0, worst_lip = 0.0;
    for (const auto& [kind, reg] : kinds) {
      for (int i = 0; i < pairs; ++i) {
        const double eta = edist(rng), v = vdist(rng), w = vdist(rng);
        const double p = prox_fn(kind, eta, v);
        worst_err = std::max(worst_err, std::abs(p - numerical_prox(reg, eta, v)));
        if (v != w) {
          worst_lip = std::max(worst_lip, std::abs(p - prox_fn(kind, eta, w)) / std::abs(v - w));
        }
      }
    }
    r.passed = worst_err <= 1e-6 && worst_lip <= 1.0 + 1e-12;
    r.detail = fmt("%.0f pairs per map, max argmin error %.3g, max Lipschitz ratio %.12g", pairs,
                   worst_err, worst_lip);
  });
}

SuiteResult check_accountant(int configs, std::uint64_t seed) {
  return timed("accountant vs 50-digit direct summation", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    std::uniform_int_distribution<int> kdist(1, 50), mdist(1, 30), bdist(1, 200), kind(0, 3);
    std::uniform_real_distribution<double> lf(0.9, 1.0), lt(1.0, 1.1), odist(1e-3, 5e-2),
        c0dist(1.0, 1e4);
    double worst = 0.0;
    for (int i = 0; i < configs; ++i) {
      PrivacyConfig cfg;
      cfg.K = kdist(rng);
      const int m = mdist(rng);
      cfg.b = static_cast<std::size_t>(bdist(rng));
      cfg.n = cfg.b * static_cast<std::size_t>(m);
      cfg.L_F = lf(rng);
      cfg.L_T = i % 3 == 0 ? lt(rng) : 1.0;
      cfg.c0 = c0dist(rng);
      cfg.alpha = 2.0 + 100.0 * lf(rng);
      cfg.sensitivity = 0.5 + lf(rng);
      switch (kind(rng)) {
        case 0: cfg.schedule = ConstantSchedule{odist(rng)}; break;
        case 1: cfg.schedule = LinearDecaySchedule{0.05, odist(rng) / 10.0, 1e-3}; break;
        case 2: cfg.schedule = LinearIncreaseSchedule{odist(rng), odist(rng) / 10.0}; break;
        default: {
          PiecewiseSchedule pw;
          for (std::int64_t k = 0; k < cfg.K; ++k) {
            pw.segments.push_back({k, k == cfg.K - 1 ? std::numeric_limits<std::int64_t>::max()
                                                     : k + 1,
                                   ConstantSchedule{odist(rng)}});
          }
          cfg.schedule = pw;
        }
      }
      const LsiTable table(cfg);
      std::uniform_int_distribution<std::int64_t> kk(0, cfg.K), jj(0, m - 1);
      for (int s = 0; s < 8; ++s) {
        const auto k = kk(rng), j = jj(rng);
        const double ref = naive_lsi(cfg, k, j);
        worst = std::max(worst, std::abs(table.c(k, j) - ref) / ref);
      }
      const std::int64_t j0 = jj(rng);
      const auto got = epsilon_j0(cfg, table, j0);
      const auto ref = naive_epsilon_j0(cfg, j0);
      worst = std::max(worst, std::abs(got.epsilon - ref.epsilon) / ref.epsilon);
      for (std::size_t k = 0; k < ref.contributions.size(); ++k) {
        worst = std::max(worst,
                         std::abs(got.contributions[k] - ref.contributions[k]) / ref.epsilon);
      }
    }
    r.passed = worst <= 1e-10;
    r.detail = fmt("%.0f random configs, max relative error %.3g", configs, worst);
  });
}

SuiteResult check_spectral(int instances, std::uint64_t seed) {
  return timed("power iteration, normalization and SPD solve", [&](SuiteResult& r) {
    numerics::Rng rng(seed);
    std::uniform_int_distribution<int> dim(1, 40);
    double worst_pi = 0.0, worst_norm = 0.0, worst_solve = 0.0;
    for (int i = 0; i < instances; ++i) {
      // Matrices with a clear leading singular value, as the estimate assumes.
      const auto rows = static_cast<std::size_t>(dim(rng));
      const auto cols = static_cast<std::size_t>(dim(rng));
      Matrix a = random_matrix(rng, rows, cols);
      const double sigma = spectral_norm(a);
      const double est = numerics::power_iteration(a);
      const double svd_gap = std::abs(est - sigma) / sigma;
      worst_pi = std::max(worst_pi, svd_gap);
      const Matrix t = normalize_layer(a, 0.99);
      worst_norm = std::max(worst_norm, spectral_norm(t) / 0.99 - 1.0);
      const Matrix spd = random_spd(rng, cols);
      const Matrix bm = random_matrix(rng, cols, 3);
      const Matrix x = numerics::solve_spd(spd, bm);
      worst_solve = std::max(worst_solve, rel_err(kernels::serial::matmul(spd, x), bm));
    }
    r.passed = worst_pi <= 1e-4 && worst_norm <= 1e-4 && worst_solve <= 1e-10;
    r.detail = fmt("max |pi - svd|/svd %.3g, max sigma(normalized)/rho - 1 %.3g, max solve "
                   "residual %.3g",
                   worst_pi, worst_norm, worst_solve);
  });
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& o) {
  std::vector<SuiteResult> out;
  out.push_back(check_update_U(10000, numerics::derive_seed(o.seed, "U")));
  out.push_back(check_update_x(100, numerics::derive_seed(o.seed, "x")));
  out.push_back(check_grad_theta(100, numerics::derive_seed(o.seed, "grad")));
  out.push_back(check_gram_bound(200, numerics::derive_seed(o.seed, "gram")));
  out.push_back(check_contraction(1000, numerics::derive_seed(o.seed, "contraction")));
  out.push_back(check_prox(10000, numerics::derive_seed(o.seed, "prox"), o.prox));
  out.push_back(check_accountant(20, numerics::derive_seed(o.seed, "accountant")));
  out.push_back(check_spectral(50, numerics::derive_seed(o.seed, "spectral")));
  return out;
}

std::string format_result(const SuiteResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), " (%.2fs)", r.seconds);
  return std::string(r.passed ? "PASS " : "FAIL ") + r.name + ": " + r.detail + buf;
}

}  // namespace dpsbcd::oracles
