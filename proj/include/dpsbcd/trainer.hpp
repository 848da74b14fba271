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

// Stochastic block coordinate descent over the split objective, with the
// optional noisy proximal theta step. Per batch j and layer d = 0..D the order
// is: x_d update (d >= 1), U_d update (d < D), spectral normalization of
// theta_d, then
//
//   theta_d <- prox(theta_d - eta grad + N(0, 2 eta o(eta, k, j) I)).
//
// Noise for step (k, j, d) is drawn from its own stream derived from the seed,
// so the draws never depend on evaluation order or thread count.

#ifndef DPSBCD_TRAINER_HPP_
#define DPSBCD_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dpsbcd/data.hpp"
#include "dpsbcd/network.hpp"
#include "dpsbcd/numerics.hpp"
#include "dpsbcd/schedule.hpp"
#include "dpsbcd/splitting.hpp"

namespace dpsbcd {

struct TrainConfig {
  std::int64_t epochs = 50;
  std::size_t batch_size = 960;
  double eta = 0.01;
  double gamma = 1.0;
  double rho = 3.0;
  std::vector<double> rho_per_layer;  // overrides rho when non-empty
  std::vector<std::size_t> hidden = {200, 200, 200, 200};
  ProxKind prox = ProxKind::kNone;
  NoiseSchedule schedule = ConstantSchedule{0.01};
  bool dp_enabled = true;
  double init_variance = 0.01;
  bool final_normalization = true;
  std::uint64_t seed = 1;
  numerics::PowerIterationOptions power;

  std::vector<double> caps(std::size_t layers) const;
  // Throws ConfigError.
  void validate() const;
};

// Worst-case constants of one layer over a run.
struct LayerStats {
  double lipschitz_F = 0.0;  // max over steps
  double beta = 0.0;         // max over steps
  double omega_min = 0.0;    // min over steps
  double X = 0.0;            // max squared column norm of x_d
  double beta_bound = 0.0;
  double beta_bound_squared = 0.0;
  double max_abs_U = 0.0;    // largest |U_d| entry seen (hidden layers)
  std::uint64_t steps = 0;

  void absorb(const SmoothnessReport& r, double lf);
};

struct EpochRecord {
  std::int64_t epoch = 0;
  double objective = 0.0;  // train-split squared loss of the current model
  double train_acc = 0.0;
  double test_acc = 0.0;
  std::vector<double> grad_norms;     // per layer, mean over batches
  std::vector<double> lipschitz_F;    // per layer, max over batches
  std::vector<double> noise;          // o(eta, k, j) per batch, empty without DP
};

struct TrainTrace {
  std::vector<EpochRecord> epochs;
  std::vector<LayerStats> layers;
  double final_train_acc = 0.0;
  double final_test_acc = 0.0;
  std::size_t n_train = 0;
  std::size_t batches = 0;
};

struct StepRecord {
  SmoothnessReport smoothness;
  double lipschitz_F = 0.0;
  double grad_norm = 0.0;
  double noise_variance = 0.0;  // 2 eta o, zero without DP
  double scale = 1.0;           // normalization factor applied to theta_d
};

// Normalizes theta_d, then takes the noisy proximal step. `state` must already
// hold this iteration's x and U. `product`, when given, is theta_d x_d formed
// before normalization and is reused for the gradient. `spectral`, when given,
// warm-starts the power iteration and receives the updated singular vector.
StepRecord dp_layer_step(std::size_t d, LipschitzMLP& model, const SplitState& state,
                         const Matrix& targets, const TrainConfig& cfg, std::int64_t k,
                         std::int64_t j, std::size_t batches, const Matrix* product = nullptr,
                         std::vector<double>* spectral = nullptr);

// Raw noise stream of step (k, j, d).
numerics::Rng noise_stream(std::uint64_t seed, std::int64_t k, std::int64_t j, std::size_t d,
                           std::size_t batches, std::size_t layers);

class Trainer {
 public:
  Trainer(const TrainConfig& cfg, const BatchedData& data);

  // One pass over every fixed batch. Throws NumericError on non-finite state.
  EpochRecord run_epoch(std::int64_t k);
  // Full x/U/theta sweep over the layers of batch j.
  void batch_iteration(std::int64_t k, std::size_t j);

  const LipschitzMLP& model() const noexcept { return model_; }
  LipschitzMLP& model() noexcept { return model_; }
  const std::vector<SplitState>& states() const noexcept { return states_; }
  const std::vector<LayerStats>& layer_stats() const noexcept { return stats_; }

 private:
  TrainConfig cfg_;
  const BatchedData& data_;
  LipschitzMLP model_;
  std::vector<SplitState> states_;
  std::vector<LayerStats> stats_;
  std::vector<double> grad_acc_;
  std::vector<double> lf_epoch_;
  std::vector<std::vector<double>> spectral_;
};

struct TrainResult {
  LipschitzMLP model;
  TrainTrace trace;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train(const TrainConfig& cfg, const BatchedData& data,
                  const EpochCallback& on_epoch = {});

}  // namespace dpsbcd

#endif  // DPSBCD_TRAINER_HPP_
