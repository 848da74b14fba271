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

// Oracle suites: each compares a library operation against an independent
// reference over randomized instances and reports one verdict.

#ifndef DPSBCD_SELFTEST_HPP_
#define DPSBCD_SELFTEST_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dpsbcd/splitting.hpp"

namespace dpsbcd::oracles {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

using ProxFunction = std::function<double(ProxKind, double eta, double v)>;

// Closed-form U update vs 1-D search over `pairs` random (z, a >= 0).
SuiteResult check_update_U(int pairs, std::uint64_t seed);
// x update leaves a finite-difference x-gradient below 1e-8.
SuiteResult check_update_x(int instances, std::uint64_t seed);
// grad_theta vs central differences of an independently summed Lagrangian.
SuiteResult check_grad_theta(int instances, std::uint64_t seed);
// Gram lambda_max <= gamma X_d and agreement with a dense eigensolver.
SuiteResult check_gram_bound(int batches, std::uint64_t seed);
// ||F(theta) - F(theta')|| <= L_F ||theta - theta'|| + 1e-8 for the gradient map.
SuiteResult check_contraction(int pairs_per_config, std::uint64_t seed);
// Prox maps vs numerical argmin, and their Lipschitz ratio.
SuiteResult check_prox(int pairs, std::uint64_t seed, const ProxFunction& prox);
// Log-space LSI table and eps(alpha, j0) vs 50-digit direct summation.
SuiteResult check_accountant(int configs, std::uint64_t seed);
// power_iteration and normalize_layer vs full SVD; solve_spd residuals.
SuiteResult check_spectral(int instances, std::uint64_t seed);

struct SelftestOptions {
  std::uint64_t seed = 2026;
  ProxFunction prox = prox_scalar;
};

std::vector<SuiteResult> run_selftest(const SelftestOptions& options);

std::string format_result(const SuiteResult& r);

}  // namespace dpsbcd::oracles

#endif  // DPSBCD_SELFTEST_HPP_
