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

// Renyi privacy accounting under the hidden-state threat model.
//
// Iterations are flattened as t = k m + j with m = n / b batches per epoch.
// With q = (L_F L_T)^2 and S(t) = sum_{t' < t} o(t') q^(t - t' - 1), the LSI
// constant after t noisy steps is c(t) = 1 / (2 eta L_T^2 S(t)), and c(0) = c0.
// Everything is carried in log space.

#ifndef DPSBCD_ACCOUNTANT_HPP_
#define DPSBCD_ACCOUNTANT_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dpsbcd/network.hpp"
#include "dpsbcd/numerics.hpp"
#include "dpsbcd/schedule.hpp"
#include "dpsbcd/splitting.hpp"

namespace dpsbcd {

struct PrivacyConfig {
  double alpha = 100.0;
  double sensitivity = 1.0;  // S_g
  double L_F = 1.0;
  double L_T = 1.0;
  double c0 = 100.0;
  double eta = 0.01;
  double gamma = 1.0;
  std::size_t b = 100;
  std::size_t n = 2100;
  std::int64_t K = 30;
  NoiseSchedule schedule = ConstantSchedule{0.01};

  std::size_t batches() const noexcept { return b == 0 ? 0 : n / b; }
  // Throws std::invalid_argument.
  void validate() const;
};

// log c(k, j) for epochs k = 0..K. j may equal m, meaning the first position
// of epoch k + 1. Epochs at or past K reuse the schedule's epoch K - 1 values.
class LsiTable {
 public:
  explicit LsiTable(const PrivacyConfig& cfg);

  double log_c(std::int64_t k, std::int64_t j) const;
  double c(std::int64_t k, std::int64_t j) const;
  // o(eta, k, j) as used by the table, with the same extrapolation.
  double noise(std::int64_t k, std::int64_t j) const;
  std::int64_t epochs() const noexcept { return K_; }
  std::int64_t batches() const noexcept { return m_; }

 private:
  std::int64_t K_;
  std::int64_t m_;
  double log_c0_;
  double log_prefactor_;          // -log(2 eta L_T^2)
  std::vector<double> log_S_;     // t = 0..(K + 1) m
  std::vector<double> o_;         // o at t = 0..(K + 1) m - 1
};

LsiTable lsi_constants(const PrivacyConfig& cfg);

struct EpsilonJ0 {
  double epsilon = 0.0;
  std::vector<double> contributions;  // summand of epoch k, k = 0..K-1
};

// Hidden-state bound for a differing instance in batch j0.
EpsilonJ0 epsilon_j0(const PrivacyConfig& cfg, std::int64_t j0);
EpsilonJ0 epsilon_j0(const PrivacyConfig& cfg, const LsiTable& table, std::int64_t j0);

// (1 / (alpha - 1)) log mean_j0 exp((alpha - 1) eps_j0), max-shifted.
double log_mean_exp_mixture(const std::vector<double>& eps, double alpha);

double epsilon_total(const PrivacyConfig& cfg);
// Sum of epsilon_total over per-layer configs; rejects differing alpha.
double per_layer_total(const std::vector<PrivacyConfig>& layers);
// Same mixture with every decay factor set to 1.
double composition_baseline(const PrivacyConfig& cfg);

struct PrivacyLedger {
  PrivacyConfig cfg;
  std::vector<std::vector<double>> contributions;  // [j0][k]
  std::vector<std::vector<double>> lsi;            // c_k^j, [k][j], k = 0..K
  std::vector<double> eps_per_j0;
  double eps_final = 0.0;
  double eps_composition = 0.0;
};

PrivacyLedger build_ledger(const PrivacyConfig& cfg);

// max(rho sqrt(X_d), (rho sqrt(X_d) + sqrt(X_{d+1})) / 2)
double u_bound(double rho, double X_d, double X_next);
// 2 gamma (rho sqrt(X_d) + u) sqrt(X_d)
double analytic_sensitivity(double rho, double X_d, double u, double gamma);

// Per-layer analytic S_g. X has one entry per layer input x_0..x_D; the output
// layer pairs with a target norm bound instead of a U bound and carries no
// gamma. Throws std::invalid_argument on negative or non-finite bounds.
std::vector<double> estimate_sensitivity(const std::vector<double>& rho,
                                         const std::vector<double>& X, double gamma,
                                         double target_norm = 1.0);

// Diagnostic: largest ||g_i - g_i'||_F over `pairs` random column pairs of
// per-sample theta_d gradients at the current model and state.
double empirical_sensitivity(std::size_t d, const LipschitzMLP& model, const SplitState& state,
                             const Matrix& targets, std::size_t pairs, numerics::Rng& rng);

// Columns: layer,j0,k,contribution,c_kj,eps_cumulative
void write_ledger_csv(std::ostream& out, const std::vector<PrivacyLedger>& layers);

struct SummaryRow {
  std::int64_t K = 0;
  double alpha = 0.0;
  double eps_hidden_state = 0.0;
  double eps_composition = 0.0;
};
// Columns: K,alpha,eps_hidden_state,eps_composition
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace dpsbcd

#endif  // DPSBCD_ACCOUNTANT_HPP_
