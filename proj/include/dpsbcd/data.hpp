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

#ifndef DPSBCD_DATA_HPP_
#define DPSBCD_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dpsbcd/matrix.hpp"
#include "dpsbcd/network.hpp"

namespace dpsbcd {

enum class Split : std::uint8_t { kTrain, kTest };

struct Dataset {
  Matrix features;  // n x dims, one sample per row
  std::vector<int> labels;
  std::vector<Split> split;
  std::size_t classes = 0;
  double X0 = 0.0;  // max squared row norm

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return features.cols(); }
  std::size_t count(Split s) const noexcept;
  bool operator==(const Dataset&) const = default;
};

// Madelon-style clusters: each class owns `clusters_per_class` Gaussian
// clusters centred on distinct vertices of a hypercube of side 2*separation in
// the informative coordinates. Redundant features are random linear
// combinations of the informative ones, the rest are pure noise. Rows are then
// scaled to unit norm.
struct GeneratorOptions {
  std::size_t n = 6000;
  std::size_t dims = 20;
  std::size_t classes = 5;
  std::size_t informative = 5;
  std::size_t redundant = 5;
  std::size_t clusters_per_class = 2;
  double separation = 2.0;
  double train_frac = 0.8;
};

// Throws std::invalid_argument on degenerate options.
Dataset generate(const GeneratorOptions& options, std::uint64_t seed);

struct BatchedData {
  std::vector<LabeledBatch> batches;  // fixed partition of the train rows
  Matrix train_inputs;                // features x n_train, batch order
  std::vector<int> train_labels;
  Matrix test_inputs;
  std::vector<int> test_labels;
  std::size_t classes = 0;
};

// One seeded shuffle of the train rows, then contiguous slices of size b.
// Throws std::invalid_argument, naming the remainder, unless b divides n_train.
BatchedData split_and_batch(const Dataset& ds, std::size_t b, std::uint64_t seed);

// Header f0,...,f{dims-1},label,split; %.17g features. `trailer` (when not
// empty) is appended verbatim as the last line.
void save_csv(const Dataset& ds, const std::filesystem::path& path,
              const std::string& trailer = {});
// Lines starting with '#' are skipped. Throws FormatError naming the line.
Dataset load_csv(const std::filesystem::path& path);

}  // namespace dpsbcd

#endif  // DPSBCD_DATA_HPP_
