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

#ifndef DPSBCD_NETWORK_HPP_
#define DPSBCD_NETWORK_HPP_

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "dpsbcd/matrix.hpp"
#include "dpsbcd/numerics.hpp"

namespace dpsbcd {

enum class Activation { kRelu, kIdentity };

// Bias-free MLP x_{d+1} = relu(theta_d x_d) for d < D, output theta_D x_D.
// Weight d maps width d to width d + 1; caps[d] is the spectral cap rho_d.
struct LipschitzMLP {
  std::vector<Matrix> weights;
  std::vector<double> caps;

  // D, the index of the last (linear) layer.
  std::size_t depth() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
  std::size_t num_layers() const noexcept { return weights.size(); }
  std::vector<std::size_t> widths() const;
  Activation activation(std::size_t d) const noexcept {
    return d + 1 < weights.size() ? Activation::kRelu : Activation::kIdentity;
  }
  // Throws std::invalid_argument on incompatible shapes or bad caps.
  void validate() const;
};

// Gaussian N(0, init_variance) weights for the given widths (at least two).
LipschitzMLP make_mlp(const std::vector<std::size_t>& widths, const std::vector<double>& caps,
                      numerics::Rng& rng, double init_variance);

struct LabeledBatch {
  Matrix inputs;   // features x b
  Matrix targets;  // classes x b, one-hot
  std::vector<std::size_t> indices;
};

Matrix relu(const Matrix& z);

// Activations x_0..x_D; x_0 is a copy of `inputs`.
std::vector<Matrix> forward(const LipschitzMLP& model, const Matrix& inputs);
// theta_D x_D, one score column per sample.
Matrix output_scores(const LipschitzMLP& model, const Matrix& inputs);

// min(rho / lambda, 1) with lambda from power_iteration.
double normalization_scale(const Matrix& theta, double rho,
                           const numerics::PowerIterationOptions& options = {});
// Warm-started variant; see numerics::power_iteration.
double normalization_scale(const Matrix& theta, double rho, std::vector<double>& start,
                           const numerics::PowerIterationOptions& options = {});
Matrix normalize_layer(const Matrix& theta, double rho,
                       const numerics::PowerIterationOptions& options = {});

// (1/2b) ||theta_D x_D - targets||_F^2 over the b batch columns.
double loss(const Matrix& theta_d, const Matrix& x_d, const Matrix& targets);

// argmin_x loss(theta_D, x, y) + (gamma/2b) ||x - v||^2, which is the solution of
// (theta^T theta + gamma I) x = theta^T y + gamma v.
Matrix prox_loss_in_xD(const Matrix& theta_d, const Matrix& v, const Matrix& targets,
                       double gamma);

Matrix one_hot(const std::vector<int>& labels, std::size_t classes);
std::vector<int> predict(const LipschitzMLP& model, const Matrix& inputs);
// Fraction of columns whose argmax score equals the label.
double accuracy(const LipschitzMLP& model, const Matrix& inputs, const std::vector<int>& labels);

inline constexpr std::string_view kModelMagic = "DPSBCD-MODEL-v1";

void save_model(const LipschitzMLP& model, const std::filesystem::path& path);
LipschitzMLP load_model(const std::filesystem::path& path);

}  // namespace dpsbcd

#endif  // DPSBCD_NETWORK_HPP_
