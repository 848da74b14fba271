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

#include "dpsbcd/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "dpsbcd/kernels.hpp"

namespace dpsbcd {
namespace {

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void require_finite_nonneg(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string("estimate_sensitivity: ") + what + " = " + num(v) +
                                " is not an established bound");
  }
}

}  // namespace

void PrivacyConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("privacy config: ") + name + " must be > 0, got " +
                                  num(v));
    }
  };
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("privacy config: alpha must be > 1, got " + num(alpha));
  }
  positive(sensitivity, "sensitivity");
  positive(L_F, "L_F");
  positive(L_T, "L_T");
  positive(c0, "c0");
  positive(eta, "eta");
  positive(gamma, "gamma");
  if (b == 0 || n == 0 || n % b != 0) {
    throw std::invalid_argument("privacy config: b = " + std::to_string(b) +
                                " must divide n = " + std::to_string(n));
  }
  if (K < 0) throw std::invalid_argument("privacy config: K must be >= 0");
}

LsiTable::LsiTable(const PrivacyConfig& cfg)
    : K_(cfg.K), m_(static_cast<std::int64_t>(cfg.batches())) {
  cfg.validate();
  log_c0_ = std::log(cfg.c0);
  log_prefactor_ = -std::log(2.0 * cfg.eta * cfg.L_T * cfg.L_T);
  const double log_q = 2.0 * std::log(cfg.L_F * cfg.L_T);
  const std::int64_t last_epoch = std::max<std::int64_t>(K_ - 1, 0);
  const std::int64_t T = (K_ + 1) * m_;
  o_.resize(static_cast<std::size_t>(T));
  log_S_.assign(static_cast<std::size_t>(T + 1), -std::numeric_limits<double>::infinity());
  for (std::int64_t t = 0; t < T; ++t) {
    const std::int64_t k = std::min(t / m_, last_epoch);
    o_[static_cast<std::size_t>(t)] = eval_schedule(cfg.schedule, cfg.eta, k, t % m_);
    log_S_[static_cast<std::size_t>(t + 1)] =
        log_add_exp(log_q + log_S_[static_cast<std::size_t>(t)],
                    std::log(o_[static_cast<std::size_t>(t)]));
  }
}

double LsiTable::log_c(std::int64_t k, std::int64_t j) const {
  const std::int64_t t = k * m_ + j;
  if (k < 0 || j < 0 || j > m_ || t > (K_ + 1) * m_) {
    throw std::out_of_range("LsiTable: position (" + std::to_string(k) + ", " +
                            std::to_string(j) + ") outside the table");
  }
  if (t == 0) return log_c0_;
  return log_prefactor_ - log_S_[static_cast<std::size_t>(t)];
}

double LsiTable::c(std::int64_t k, std::int64_t j) const { return std::exp(log_c(k, j)); }

double LsiTable::noise(std::int64_t k, std::int64_t j) const {
  const std::int64_t t = k * m_ + j;
  if (k < 0 || j < 0 || j >= m_ || t >= static_cast<std::int64_t>(o_.size())) {
    throw std::out_of_range("LsiTable: noise index outside the table");
  }
  return o_[static_cast<std::size_t>(t)];
}

LsiTable lsi_constants(const PrivacyConfig& cfg) { return LsiTable(cfg); }

EpsilonJ0 epsilon_j0(const PrivacyConfig& cfg, const LsiTable& table, std::int64_t j0) {
  const std::int64_t m = table.batches();
  const std::int64_t K = table.epochs();
  if (j0 < 0 || j0 >= m) {
    throw std::invalid_argument("epsilon_j0: j0 = " + std::to_string(j0) + " outside [0, " +
                                std::to_string(m) + ")");
  }
  const double log_q = 2.0 * std::log(cfg.L_F * cfg.L_T);
  const double inv_LT2 = 1.0 / (cfg.L_T * cfg.L_T);
  const double bd = static_cast<double>(cfg.b);
  const double prefactor = cfg.alpha * cfg.eta * cfg.sensitivity * cfg.sensitivity / (4.0 * bd * bd);

  // suffix[k] = sum_{l=k}^{K} log c(l, j0+1) - log c(l, j0)
  std::vector<double> suffix(static_cast<std::size_t>(K + 2), 0.0);
  for (std::int64_t l = K; l >= 0; --l) {
    suffix[static_cast<std::size_t>(l)] = suffix[static_cast<std::size_t>(l + 1)] +
                                          table.log_c(l, j0 + 1) - table.log_c(l, j0);
  }
  const double log_c_end = table.log_c(K, m - 1);

  EpsilonJ0 out;
  out.contributions.resize(static_cast<std::size_t>(K));
  for (std::int64_t k = 0; k < K; ++k) {
    const double exponent = static_cast<double>((m - 1) * (K - k) - j0);
    const double log_ratio = table.log_c(k, j0 + 1) - log_c_end - log_q * exponent +
                             suffix[static_cast<std::size_t>(k)];
    const double log_decay = -inv_LT2 * log_ratio;
    const double term = prefactor / table.noise(k, j0) * std::exp(log_decay);
    out.contributions[static_cast<std::size_t>(k)] = term;
    out.epsilon += term;
  }
  return out;
}

EpsilonJ0 epsilon_j0(const PrivacyConfig& cfg, std::int64_t j0) {
  return epsilon_j0(cfg, LsiTable(cfg), j0);
}

double log_mean_exp_mixture(const std::vector<double>& eps, double alpha) {
  if (eps.empty()) throw std::invalid_argument("log_mean_exp_mixture: no terms");
  if (!(alpha > 1.0)) throw std::invalid_argument("log_mean_exp_mixture: alpha must be > 1");
  const double a = alpha - 1.0;
  const double hi = *std::max_element(eps.begin(), eps.end());
  double s = 0.0;
  for (double e : eps) s += std::exp(a * (e - hi));
  const double mixed = hi + std::log(s / static_cast<double>(eps.size())) / a;
  // Rounding can push a constant mixture a hair outside [min, max].
  const double lo = *std::min_element(eps.begin(), eps.end());
  return std::clamp(mixed, lo, hi);
}

double epsilon_total(const PrivacyConfig& cfg) {
  const LsiTable table(cfg);
  std::vector<double> eps;
  for (std::int64_t j0 = 0; j0 < table.batches(); ++j0) {
    eps.push_back(epsilon_j0(cfg, table, j0).epsilon);
  }
  return log_mean_exp_mixture(eps, cfg.alpha);
}

double per_layer_total(const std::vector<PrivacyConfig>& layers) {
  if (layers.empty()) throw std::invalid_argument("per_layer_total: no layers");
  double total = 0.0;
  for (const auto& cfg : layers) {
    if (cfg.alpha != layers.front().alpha) {
      throw std::invalid_argument("per_layer_total: layers use different alpha (" +
                                  num(layers.front().alpha) + " vs " + num(cfg.alpha) + ")");
    }
    total += epsilon_total(cfg);
  }
  return total;
}

double composition_baseline(const PrivacyConfig& cfg) {
  cfg.validate();
  const auto m = static_cast<std::int64_t>(cfg.batches());
  const double bd = static_cast<double>(cfg.b);
  const double prefactor = cfg.alpha * cfg.eta * cfg.sensitivity * cfg.sensitivity / (4.0 * bd * bd);
  const std::int64_t last_epoch = std::max<std::int64_t>(cfg.K - 1, 0);
  std::vector<double> eps(static_cast<std::size_t>(m), 0.0);
  for (std::int64_t j0 = 0; j0 < m; ++j0) {
    for (std::int64_t k = 0; k < cfg.K; ++k) {
      eps[static_cast<std::size_t>(j0)] +=
          prefactor / eval_schedule(cfg.schedule, cfg.eta, std::min(k, last_epoch), j0);
    }
  }
  return log_mean_exp_mixture(eps, cfg.alpha);
}

PrivacyLedger build_ledger(const PrivacyConfig& cfg) {
  const LsiTable table(cfg);
  PrivacyLedger ledger;
  ledger.cfg = cfg;
  for (std::int64_t j0 = 0; j0 < table.batches(); ++j0) {
    auto e = epsilon_j0(cfg, table, j0);
    ledger.eps_per_j0.push_back(e.epsilon);
    ledger.contributions.push_back(std::move(e.contributions));
  }
  for (std::int64_t k = 0; k <= table.epochs(); ++k) {
    std::vector<double> row;
    for (std::int64_t j = 0; j < table.batches(); ++j) row.push_back(table.c(k, j));
    ledger.lsi.push_back(std::move(row));
  }
  ledger.eps_final = log_mean_exp_mixture(ledger.eps_per_j0, cfg.alpha);
  ledger.eps_composition = composition_baseline(cfg);
  return ledger;
}

double u_bound(double rho, double X_d, double X_next) {
  const double z = rho * std::sqrt(X_d);
  return std::max(z, 0.5 * (z + std::sqrt(X_next)));
}

double analytic_sensitivity(double rho, double X_d, double u, double gamma) {
  return 2.0 * gamma * (rho * std::sqrt(X_d) + u) * std::sqrt(X_d);
}

std::vector<double> estimate_sensitivity(const std::vector<double>& rho,
                                         const std::vector<double>& X, double gamma,
                                         double target_norm) {
  if (rho.empty() || rho.size() != X.size()) {
    throw std::invalid_argument("estimate_sensitivity: need one rho and one X per layer");
  }
  require_finite_nonneg(gamma, "gamma");
  require_finite_nonneg(target_norm, "target_norm");
  for (std::size_t d = 0; d < X.size(); ++d) {
    require_finite_nonneg(X[d], ("X_" + std::to_string(d)).c_str());
    require_finite_nonneg(rho[d], ("rho_" + std::to_string(d)).c_str());
  }
  std::vector<double> out(X.size());
  const std::size_t D = X.size() - 1;
  for (std::size_t d = 0; d < D; ++d) {
    out[d] = analytic_sensitivity(rho[d], X[d], u_bound(rho[d], X[d], X[d + 1]), gamma);
  }
  out[D] = analytic_sensitivity(rho[D], X[D], target_norm, 1.0);
  return out;
}

double empirical_sensitivity(std::size_t d, const LipschitzMLP& model, const SplitState& state,
                             const Matrix& targets, std::size_t pairs, numerics::Rng& rng) {
  state.validate(model);
  const std::size_t D = model.depth();
  if (d > D) throw std::invalid_argument("empirical_sensitivity: layer out of range");
  Matrix r = kernels::matmul(model.weights[d], state.x[d]);
  double coeff = 1.0;
  if (d < D) {
    r -= state.U[d];
    coeff = state.gamma;
  } else {
    r -= targets;
  }
  const Matrix& x = state.x[d];
  const std::size_t b = x.cols();
  if (b < 2) return 0.0;
  auto dot_cols = [](const Matrix& a, std::size_t i, const Matrix& c, std::size_t j) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.rows(); ++p) s += a(p, i) * c(p, j);
    return s;
  };
  std::vector<double> rr(b), xx(b);
  for (std::size_t i = 0; i < b; ++i) {
    rr[i] = dot_cols(r, i, r, i);
    xx[i] = dot_cols(x, i, x, i);
  }
  std::uniform_int_distribution<std::size_t> pick(0, b - 1);
  double best = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (i == j) j = (j + 1) % b;
    const double sq = rr[i] * xx[i] + rr[j] * xx[j] -
                      2.0 * dot_cols(r, i, r, j) * dot_cols(x, i, x, j);
    best = std::max(best, std::sqrt(std::max(0.0, sq)));
  }
  return coeff * best;
}

void write_ledger_csv(std::ostream& out, const std::vector<PrivacyLedger>& layers) {
  out << "layer,j0,k,contribution,c_kj,eps_cumulative\n";
  for (std::size_t layer = 0; layer < layers.size(); ++layer) {
    const auto& led = layers[layer];
    for (std::size_t j0 = 0; j0 < led.contributions.size(); ++j0) {
      double cum = 0.0;
      for (std::size_t k = 0; k < led.contributions[j0].size(); ++k) {
        cum += led.contributions[j0][k];
        out << layer << ',' << j0 << ',' << k << ',' << num(led.contributions[j0][k]) << ','
            << num(led.lsi[k][j0]) << ',' << num(cum) << '\n';
      }
    }
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "K,alpha,eps_hidden_state,eps_composition\n";
  for (const auto& r : rows) {
    out << r.K << ',' << num(r.alpha) << ',' << num(r.eps_hidden_state) << ','
        << num(r.eps_composition) << '\n';
  }
}

}  // namespace dpsbcd
