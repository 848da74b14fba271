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

#include "dpsbcd/pipeline.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

#include "dpsbcd/schedule.hpp"

namespace dpsbcd {

RunPrivacy account_run(const TrainConfig& cfg, const TrainTrace& trace,
                       const RunPrivacyOptions& options) {
  if (!cfg.dp_enabled) throw std::invalid_argument("account_run: the run added no noise");
  const std::size_t layers = trace.layers.size();
  if (layers == 0) throw std::invalid_argument("account_run: trace has no layer statistics");

  std::vector<double> X(layers);
  for (std::size_t d = 0; d < layers; ++d) X[d] = trace.layers[d].X;
  const auto caps = cfg.caps(layers);
  const auto analytic = estimate_sensitivity(caps, X, cfg.gamma, options.target_norm);

  RunPrivacy out;
  for (std::size_t d = 0; d < layers; ++d) {
    PrivacyConfig p;
    p.alpha = options.alpha;
    p.sensitivity = options.sensitivity.value_or(analytic[d]);
    p.L_F = options.lipschitz_F.value_or(trace.layers[d].lipschitz_F);
    p.L_T = options.L_T;
    p.c0 = options.c0;
    p.eta = cfg.eta;
    p.gamma = cfg.gamma;
    p.b = cfg.batch_size;
    p.n = trace.n_train;
    p.K = cfg.epochs;
    p.schedule = cfg.schedule;
    out.ledgers.push_back(build_ledger(p));
    out.eps_hidden_state += out.ledgers.back().eps_final;
    out.eps_composition += out.ledgers.back().eps_composition;
    out.layers.push_back(p);
  }
  return out;
}

RunPrivacyOptions privacy_options(const RunConfig& cfg) {
  RunPrivacyOptions o;
  o.alpha = cfg.privacy.alpha;
  o.L_T = cfg.privacy.L_T;
  o.c0 = cfg.c0();
  o.lipschitz_F = cfg.privacy.lipschitz_F;
  o.sensitivity = cfg.privacy.sensitivity;
  return o;
}

Dataset load_or_generate(const RunConfig& cfg) {
  if (!cfg.data.path.empty()) return load_csv(cfg.data.path);
  return generate(cfg.data.generator, cfg.data_seed());
}

std::vector<NamedSchedule> sweep_schedules(const RunConfig& cfg) {
  if (!cfg.sweep.schedules.empty()) return cfg.sweep.schedules;
  return {{"train", cfg.train_schedule}};
}

std::vector<SweepCell> sweep_cells(const RunConfig& cfg) {
  std::vector<SweepCell> cells;
  for (std::int64_t K : cfg.sweep.epochs) {
    for (const auto& s : sweep_schedules(cfg)) {
      for (int r = 0; r < cfg.sweep.repeats; ++r) {
        const std::string id =
            "K=" + std::to_string(K) + ";schedule=" + s.name + ";repeat=" + std::to_string(r);
        cells.push_back({K, s, r, cfg.seed ^ fnv1a64(id)});
      }
    }
  }
  return cells;
}

CellResult run_cell(const RunConfig& cfg, const Dataset& ds, const SweepCell& cell) {
  TrainConfig tc = cfg.train;
  tc.epochs = cell.K;
  tc.schedule = parse_schedule(cell.schedule.text, std::max<std::int64_t>(cell.K, 1));
  tc.seed = cell.seed;
  const BatchedData data = split_and_batch(ds, tc.batch_size, cell.seed);
  const TrainResult run = train(tc, data);
  CellResult out;
  out.train_acc = run.trace.final_train_acc;
  out.test_acc = run.trace.final_test_acc;
  if (tc.dp_enabled && cell.K > 0) {
    const RunPrivacy p = account_run(tc, run.trace, privacy_options(cfg));
    out.eps_hidden_state = p.eps_hidden_state;
    out.eps_composition = p.eps_composition;
  }
  return out;
}

std::vector<TableRow> summarize_sweep(const std::vector<SweepCell>& cells,
                                      const std::vector<CellResult>& results) {
  if (cells.size() != results.size()) {
    throw std::invalid_argument("summarize_sweep: cells and results differ in length");
  }
  std::vector<TableRow> rows;
  std::vector<std::vector<double>> accs;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (rows.empty() || rows.back().K != c.K || rows.back().schedule != c.schedule.name) {
      rows.push_back({});
      rows.back().K = c.K;
      rows.back().schedule = c.schedule.name;
      accs.emplace_back();
    }
    TableRow& row = rows.back();
    ++row.repeats;
    row.mean_test_acc += results[i].test_acc;
    row.mean_train_acc += results[i].train_acc;
    row.eps_hidden_state += results[i].eps_hidden_state;
    row.eps_composition += results[i].eps_composition;
    accs.back().push_back(results[i].test_acc);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    TableRow& row = rows[r];
    const double R = row.repeats;
    row.mean_test_acc /= R;
    row.mean_train_acc /= R;
    row.eps_hidden_state /= R;
    row.eps_composition /= R;
    if (row.repeats < 2) continue;
    double ss = 0.0;
    for (double a : accs[r]) ss += (a - row.mean_test_acc) * (a - row.mean_test_acc);
    const double sd = std::sqrt(ss / (R - 1.0));
    const boost::math::students_t t(R - 1.0);
    row.ci95 = boost::math::quantile(boost::math::complement(t, 0.025)) * sd / std::sqrt(R);
  }
  return rows;
}

}  // namespace dpsbcd
