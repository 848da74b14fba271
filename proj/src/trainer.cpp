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

#include "dpsbcd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dpsbcd/errors.hpp"
#include "dpsbcd/kernels.hpp"

namespace dpsbcd {
namespace {

struct Evaluation {
  double loss = 0.0;
  double acc = 0.0;
};

Evaluation evaluate(const LipschitzMLP& model, const Matrix& inputs,
                    const std::vector<int>& labels) {
  Evaluation ev;
  if (labels.empty()) return ev;
  const auto xs = forward(model, inputs);
  const Matrix scores = kernels::matmul(model.weights.back(), xs.back());
  std::size_t hits = 0;
  double sq = 0.0;
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    std::size_t best = 0;
    for (std::size_t r = 0; r < scores.rows(); ++r) {
      if (scores(r, c) > scores(best, c)) best = r;
      const double t = static_cast<std::size_t>(labels[c]) == r ? 1.0 : 0.0;
      sq += (scores(r, c) - t) * (scores(r, c) - t);
    }
    hits += static_cast<int>(best) == labels[c];
  }
  ev.loss = 0.5 * sq / static_cast<double>(labels.size());
  ev.acc = static_cast<double>(hits) / static_cast<double>(labels.size());
  return ev;
}

bool model_finite(const LipschitzMLP& m) {
  return std::all_of(m.weights.begin(), m.weights.end(),
                     [](const Matrix& t) { return t.all_finite(); });
}

}  // namespace

std::vector<double> TrainConfig::caps(std::size_t layers) const {
  if (!rho_per_layer.empty()) {
    if (rho_per_layer.size() != layers) {
      throw ConfigError("rho_per_layer has " + std::to_string(rho_per_layer.size()) +
                        " entries for " + std::to_string(layers) + " layers");
    }
    return rho_per_layer;
  }
  return std::vector<double>(layers, rho);
}

void TrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size == 0) throw ConfigError("batch_size must be > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be > 0");
  if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
  for (double r : rho_per_layer) {
    if (!(r > 0.0)) throw ConfigError("rho_per_layer entries must be > 0");
  }
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("hidden widths must be > 0");
  }
  if (!(init_variance > 0.0)) throw ConfigError("init_variance must be > 0");
  if (dp_enabled) {
    // Every scheduled value the run will use must be positive.
    for (std::int64_t k = 0; k < epochs; ++k) {
      try {
        (void)eval_schedule(schedule, eta, k, 0);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
  }
}

void LayerStats::absorb(const SmoothnessReport& r, double lf) {
  omega_min = steps == 0 ? r.omega : std::min(omega_min, r.omega);
  lipschitz_F = std::max(lipschitz_F, lf);
  beta = std::max(beta, r.beta);
  X = std::max(X, r.X);
  beta_bound = std::max(beta_bound, r.beta_bound);
  beta_bound_squared = std::max(beta_bound_squared, r.beta_bound_squared);
  ++steps;
}

numerics::Rng noise_stream(std::uint64_t seed, std::int64_t k, std::int64_t j, std::size_t d,
                           std::size_t batches, std::size_t layers) {
  const auto step = (static_cast<std::uint64_t>(k) * batches + static_cast<std::uint64_t>(j)) *
                        layers +
                    d;
  return numerics::Rng(numerics::derive_seed(numerics::derive_seed(seed, "noise"), step));
}

StepRecord dp_layer_step(std::size_t d, LipschitzMLP& model, const SplitState& state,
                         const Matrix& targets, const TrainConfig& cfg, std::int64_t k,
                         std::int64_t j, std::size_t batches, const Matrix* product,
                         std::vector<double>* spectral) {
  StepRecord rec;
  Matrix& theta = model.weights.at(d);
  std::vector<double> cold;
  rec.scale = normalization_scale(theta, model.caps.at(d), spectral ? *spectral : cold, cfg.power);
  if (rec.scale != 1.0) theta *= rec.scale;
  Matrix z = product ? *product : kernels::matmul(theta, state.x[d]);
  if (product && rec.scale != 1.0) z *= rec.scale;

  rec.smoothness = smoothness_constants(d, state);
  rec.lipschitz_F = lipschitz_F(cfg.eta, rec.smoothness.beta, rec.smoothness.omega);

  Matrix g = grad_theta_from_product(d, z, state, targets);
  rec.grad_norm = frobenius_norm(g);
  g *= -cfg.eta;
  g += theta;
  if (cfg.dp_enabled) {
    const double o = eval_schedule(cfg.schedule, cfg.eta, k, j);
    rec.noise_variance = 2.0 * cfg.eta * o;
    auto rng = noise_stream(cfg.seed, k, j, d, batches, model.num_layers());
    g += numerics::gaussian_sample(rng, theta.rows(), theta.cols(), rec.noise_variance);
  }
  theta = prox(cfg.prox, cfg.eta, g);
  return rec;
}

Trainer::Trainer(const TrainConfig& cfg, const BatchedData& data) : cfg_(cfg), data_(data) {
  cfg_.validate();
  if (data.batches.empty()) throw ConfigError("no training batches");
  if (data.batches.front().inputs.cols() != cfg_.batch_size) {
    throw ConfigError("data was batched with b = " +
                      std::to_string(data.batches.front().inputs.cols()) +
                      " but the config says " + std::to_string(cfg_.batch_size));
  }
  std::vector<std::size_t> widths;
  widths.push_back(data.train_inputs.rows());
  widths.insert(widths.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  widths.push_back(data.classes);
  numerics::Rng init(numerics::derive_seed(cfg_.seed, "init"));
  model_ = make_mlp(widths, cfg_.caps(widths.size() - 1), init, cfg_.init_variance);
  for (const auto& batch : data.batches) {
    states_.push_back(init_state(model_, batch.inputs, cfg_.gamma));
  }
  stats_.resize(model_.num_layers());
  spectral_.resize(model_.num_layers());
}

void Trainer::batch_iteration(std::int64_t k, std::size_t j) {
  SplitState& s = states_[j];
  const Matrix& y = data_.batches[j].targets;
  const std::size_t D = model_.depth();
  for (std::size_t d = 0; d <= D; ++d) {
    if (d >= 1) s.x[d] = update_x(d, model_, s, y);
    Matrix z = kernels::matmul(model_.weights[d], s.x[d]);
    if (d < D) {
      s.U[d] = update_U_from_product(z, s.x[d + 1]);
      stats_[d].max_abs_U = std::max(stats_[d].max_abs_U, max_abs(s.U[d]));
    }
    const StepRecord rec = dp_layer_step(d, model_, s, y, cfg_, k, static_cast<std::int64_t>(j),
                                         states_.size(), &z, &spectral_[d]);
    stats_[d].absorb(rec.smoothness, rec.lipschitz_F);
    if (!grad_acc_.empty()) {
      grad_acc_[d] += rec.grad_norm;
      lf_epoch_[d] = std::max(lf_epoch_[d], rec.lipschitz_F);
    }
  }
}

EpochRecord Trainer::run_epoch(std::int64_t k) {
  const std::size_t layers = model_.num_layers();
  grad_acc_.assign(layers, 0.0);
  lf_epoch_.assign(layers, 0.0);
  EpochRecord rec;
  rec.epoch = k;
  for (std::size_t j = 0; j < states_.size(); ++j) {
    try {
      batch_iteration(k, j);
    } catch (const std::invalid_argument& e) {
      // Solvers and power iteration reject non-finite input; report it as a
      // numeric failure rather than a usage error.
      if (model_finite(model_) && states_[j].all_finite()) throw;
      throw NumericError(std::string("epoch ") + std::to_string(k) + ", batch " +
                             std::to_string(j) + ": " + e.what(),
                         static_cast<int>(k) - 1);
    }
    if (cfg_.dp_enabled) {
      rec.noise.push_back(eval_schedule(cfg_.schedule, cfg_.eta, k, static_cast<std::int64_t>(j)));
    }
  }
  for (double& g : grad_acc_) g /= static_cast<double>(states_.size());
  rec.grad_norms = grad_acc_;
  rec.lipschitz_F = lf_epoch_;
  grad_acc_.clear();
  lf_epoch_.clear();

  const bool finite_state = std::all_of(states_.begin(), states_.end(),
                                        [](const SplitState& s) { return s.all_finite(); });
  if (!finite_state || !model_finite(model_)) {
    throw NumericError("non-finite " + std::string(finite_state ? "weights" : "split state") +
                           " after epoch " + std::to_string(k),
                       static_cast<int>(k) - 1);
  }
  const auto tr = evaluate(model_, data_.train_inputs, data_.train_labels);
  const auto te = evaluate(model_, data_.test_inputs, data_.test_labels);
  if (!std::isfinite(tr.loss)) {
    throw NumericError("non-finite objective after epoch " + std::to_string(k),
                       static_cast<int>(k) - 1);
  }
  rec.objective = tr.loss;
  rec.train_acc = tr.acc;
  rec.test_acc = te.acc;
  return rec;
}

TrainResult train(const TrainConfig& cfg, const BatchedData& data, const EpochCallback& on_epoch) {
  Trainer trainer(cfg, data);
  TrainResult result;
  for (std::int64_t k = 0; k < cfg.epochs; ++k) {
    result.trace.epochs.push_back(trainer.run_epoch(k));
    if (on_epoch) on_epoch(result.trace.epochs.back());
  }
  result.model = trainer.model();
  // Release-time normalization is post-processing of the last iterate.
  if (cfg.final_normalization && cfg.epochs > 0) {
    for (std::size_t d = 0; d < result.model.num_layers(); ++d) {
      result.model.weights[d] =
          normalize_layer(result.model.weights[d], result.model.caps[d], cfg.power);
    }
  }
  result.trace.layers = trainer.layer_stats();
  result.trace.n_train = data.train_labels.size();
  result.trace.batches = data.batches.size();
  result.trace.final_train_acc =
      evaluate(result.model, data.train_inputs, data.train_labels).acc;
  result.trace.final_test_acc =
      evaluate(result.model, data.test_inputs, data.test_labels).acc;
  return result;
}

}  // namespace dpsbcd
