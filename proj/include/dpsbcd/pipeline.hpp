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

// Glue between a finished training run and the accountant: every layer is a
// separate noisy sub-problem with its own L_F and S_g, and the per-layer
// losses add up.

#ifndef DPSBCD_PIPELINE_HPP_
#define DPSBCD_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpsbcd/accountant.hpp"
#include "dpsbcd/config.hpp"
#include "dpsbcd/trainer.hpp"

namespace dpsbcd {

struct RunPrivacyOptions {
  double alpha = 100.0;
  double L_T = 1.0;
  double c0 = 100.0;
  std::optional<double> lipschitz_F;  // default: per-layer worst case of the run
  std::optional<double> sensitivity;  // default: per-layer analytic bound
  double target_norm = 1.0;           // one-hot targets
};

struct RunPrivacy {
  std::vector<PrivacyConfig> layers;
  std::vector<PrivacyLedger> ledgers;
  double eps_hidden_state = 0.0;  // sum over layers
  double eps_composition = 0.0;   // sum over layers
};

// Throws std::invalid_argument when the run used no noise.
RunPrivacy account_run(const TrainConfig& cfg, const TrainTrace& trace,
                       const RunPrivacyOptions& options);

RunPrivacyOptions privacy_options(const RunConfig& cfg);

// data.path if set, otherwise the generator at data_seed().
Dataset load_or_generate(const RunConfig& cfg);

// One (K, schedule, repeat) cell of a sweep. Cells are ordered K-major, then
// schedule, then repeat.
struct SweepCell {
  std::int64_t K = 0;
  NamedSchedule schedule;
  int repeat = 0;
  std::uint64_t seed = 0;  // run seed xor hash of the cell id
};

struct CellResult {
  double train_acc = 0.0;
  double test_acc = 0.0;
  double eps_hidden_state = 0.0;
  double eps_composition = 0.0;
};

// sweep.schedules, or train.schedule under the name "train" when none is set.
std::vector<NamedSchedule> sweep_schedules(const RunConfig& cfg);
std::vector<SweepCell> sweep_cells(const RunConfig& cfg);

// Trains and accounts one cell on `ds`. Propagates NumericError.
CellResult run_cell(const RunConfig& cfg, const Dataset& ds, const SweepCell& cell);

struct TableRow {
  std::int64_t K = 0;
  std::string schedule;
  int repeats = 0;
  double mean_test_acc = 0.0;
  std::optional<double> ci95;  // half-width; empty for a single repeat
  double mean_train_acc = 0.0;
  double eps_hidden_state = 0.0;  // mean over repeats
  double eps_composition = 0.0;
};

// Groups cell results (same order as sweep_cells) into one row per (K, schedule).
std::vector<TableRow> summarize_sweep(const std::vector<SweepCell>& cells,
                                      const std::vector<CellResult>& results);

}  // namespace dpsbcd

#endif  // DPSBCD_PIPELINE_HPP_
