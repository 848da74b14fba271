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

#include "dpsbcd/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dpsbcd/errors.hpp"
#include "dpsbcd/kernels.hpp"

namespace dpsbcd {
namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::size_t> LipschitzMLP::widths() const {
  std::vector<std::size_t> w;
  if (weights.empty()) return w;
  w.push_back(weights.front().cols());
  for (const Matrix& t : weights) w.push_back(t.rows());
  return w;
}

void LipschitzMLP::validate() const {
  if (weights.empty()) throw std::invalid_argument("LipschitzMLP: no layers");
  if (caps.size() != weights.size()) {
    throw std::invalid_argument("LipschitzMLP: " + std::to_string(caps.size()) + " caps for " +
                                std::to_string(weights.size()) + " layers");
  }
  for (std::size_t d = 0; d < weights.size(); ++d) {
    if (weights[d].empty()) {
      throw std::invalid_argument("LipschitzMLP: layer " + std::to_string(d) + " is empty");
    }
    if (d > 0 && weights[d].cols() != weights[d - 1].rows()) {
      throw std::invalid_argument("LipschitzMLP: layer " + std::to_string(d) + " is " +
                                  shape(weights[d]) + " but layer " + std::to_string(d - 1) +
                                  " outputs " + std::to_string(weights[d - 1].rows()));
    }
    if (!(caps[d] > 0.0) || !std::isfinite(caps[d])) {
      throw std::invalid_argument("LipschitzMLP: cap of layer " + std::to_string(d) +
                                  " must be positive");
    }
  }
}

LipschitzMLP make_mlp(const std::vector<std::size_t>& widths, const std::vector<double>& caps,
                      numerics::Rng& rng, double init_variance) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least two widths");
  LipschitzMLP model;
  for (std::size_t d = 0; d + 1 < widths.size(); ++d) {
    model.weights.push_back(numerics::gaussian_sample(rng, widths[d + 1], widths[d], init_variance));
  }
  model.caps = caps;
  model.validate();
  return model;
}

Matrix relu(const Matrix& z) {
  Matrix out = z;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

std::vector<Matrix> forward(const LipschitzMLP& model, const Matrix& inputs) {
  model.validate();
  if (inputs.rows() != model.weights.front().cols()) {
    throw std::invalid_argument("forward: input has " + std::to_string(inputs.rows()) +
                                " features, model expects " +
                                std::to_string(model.weights.front().cols()));
  }
  std::vector<Matrix> xs;
  xs.reserve(model.num_layers());
  xs.push_back(inputs);
  for (std::size_t d = 0; d < model.depth(); ++d) {
    xs.push_back(relu(kernels::matmul(model.weights[d], xs.back())));
  }
  return xs;
}

Matrix output_scores(const LipschitzMLP& model, const Matrix& inputs) {
  const auto xs = forward(model, inputs);
  return kernels::matmul(model.weights.back(), xs.back());
}

double normalization_scale(const Matrix& theta, double rho,
                           const numerics::PowerIterationOptions& options) {
  std::vector<double> start;
  return normalization_scale(theta, rho, start, options);
}

double normalization_scale(const Matrix& theta, double rho, std::vector<double>& start,
                           const numerics::PowerIterationOptions& options) {
  if (!(rho > 0.0)) throw std::invalid_argument("normalize_layer: rho must be > 0");
  const double lambda = numerics::power_iteration(theta, start, options);
  return lambda > rho ? rho / lambda : 1.0;
}

Matrix normalize_layer(const Matrix& theta, double rho,
                       const numerics::PowerIterationOptions& options) {
  const double s = normalization_scale(theta, rho, options);
  if (s == 1.0) return theta;
  return theta * s;
}

double loss(const Matrix& theta_d, const Matrix& x_d, const Matrix& targets) {
  Matrix r = kernels::matmul(theta_d, x_d);
  check_same_shape(r, targets, "loss");
  if (r.cols() == 0) throw std::invalid_argument("loss: empty batch");
  r -= targets;
  return 0.5 * frobenius_norm_squared(r) / static_cast<double>(r.cols());
}

Matrix prox_loss_in_xD(const Matrix& theta_d, const Matrix& v, const Matrix& targets,
                       double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox_loss_in_xD: gamma must be > 0");
  if (v.rows() != theta_d.cols() || targets.rows() != theta_d.rows() ||
      v.cols() != targets.cols()) {
    throw std::invalid_argument("prox_loss_in_xD: shapes theta " + shape(theta_d) + ", v " +
                                shape(v) + ", targets " + shape(targets));
  }
  Matrix a = kernels::matmul_tn(theta_d, theta_d);
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += gamma;
  Matrix rhs = kernels::matmul_tn(theta_d, targets);
  rhs += v * gamma;
  return numerics::solve_spd(a, rhs);
}

Matrix one_hot(const std::vector<int>& labels, std::size_t classes) {
  Matrix y(classes, labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) {
      throw std::invalid_argument("one_hot: label " + std::to_string(labels[i]) +
                                  " out of range");
    }
    y(static_cast<std::size_t>(labels[i]), i) = 1.0;
  }
  return y;
}

std::vector<int> predict(const LipschitzMLP& model, const Matrix& inputs) {
  const Matrix scores = output_scores(model, inputs);
  std::vector<int> out(scores.cols(), 0);
  for (std::size_t c = 0; c < scores.cols(); ++c) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < scores.rows(); ++r) {
      if (scores(r, c) > scores(best, c)) best = r;
    }
    out[c] = static_cast<int>(best);
  }
  return out;
}

double accuracy(const LipschitzMLP& model, const Matrix& inputs, const std::vector<int>& labels) {
  if (labels.size() != inputs.cols()) {
    throw std::invalid_argument("accuracy: label count does not match sample count");
  }
  if (labels.empty()) return 0.0;
  const auto pred = predict(model, inputs);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

// Text container: magic line, "layers D+1", "widths ...", "caps ...", then one
// line per weight row. %.17g round-trips doubles exactly.
void save_model(const LipschitzMLP& model, const std::filesystem::path& path) {
  model.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
  out << kModelMagic << '\n' << "layers " << model.num_layers() << '\n' << "widths";
  for (std::size_t w : model.widths()) out << ' ' << w;
  out << '\n' << "caps";
  for (double c : model.caps) out << ' ' << format_double(c);
  out << '\n';
  for (const Matrix& t : model.weights) {
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const auto r = t.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) out << (j ? " " : "") << format_double(r[j]);
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("save_model: write failed for " + path.string());
}

LipschitzMLP load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("load_model: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kModelMagic) {
    throw FormatError("load_model: " + path.string() + " does not start with " +
                      std::string(kModelMagic));
  }
  auto expect = [&](const char* key) {
    std::string word;
    if (!(in >> word) || word != key) {
      throw FormatError(std::string("load_model: expected '") + key + "' in " + path.string());
    }
  };
  std::size_t layers = 0;
  expect("layers");
  if (!(in >> layers) || layers == 0 || layers > 4096) {
    throw FormatError("load_model: bad layer count");
  }
  std::vector<std::size_t> widths(layers + 1);
  expect("widths");
  for (auto& w : widths) {
    if (!(in >> w) || w == 0) throw FormatError("load_model: bad width");
  }
  LipschitzMLP model;
  model.caps.resize(layers);
  expect("caps");
  for (double& c : model.caps) {
    if (!(in >> c)) throw FormatError("load_model: bad cap");
  }
  for (std::size_t d = 0; d < layers; ++d) {
    Matrix t(widths[d + 1], widths[d]);
    for (double& v : t.values()) {
      if (!(in >> v)) throw FormatError("load_model: truncated weights in layer " +
                                        std::to_string(d));
    }
    model.weights.push_back(std::move(t));
  }
  std::string rest;
  if (in >> rest) throw FormatError("load_model: trailing data in " + path.string());
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("load_model: ") + e.what());
  }
  return model;
}

}  // namespace dpsbcd
