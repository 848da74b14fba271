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

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dpsbcd/pipeline.hpp"

namespace dpsbcd {
namespace {

RunConfig small_run() {
  ConfigMap m = ConfigMap::parse(
      "seed = 3\n"
      "data.n = 500\n"
      "train.hidden = 12\n"
      "train.batch_size = 100\n"
      "train.epochs = 2\n"
      "sweep.epochs = 0,2\n"
      "sweep.repeats = 3\n"
      "sweep.schedule.c = constant(0.01)\n"
      "sweep.schedule.d = decay_to(0.0075, 0.0008)\n",
      "t");
  return resolve_config(m);
}

TEST(AccountRun, OneLedgerPerLayerAndSums) {
  const RunConfig cfg = small_run();
  const Dataset ds = load_or_generate(cfg);
  const BatchedData data = split_and_batch(ds, 100, 1);
  const TrainResult r = train(cfg.train, data);
  const RunPrivacy p = account_run(cfg.train, r.trace, privacy_options(cfg));
  ASSERT_EQ(p.ledgers.size(), 2u);
  EXPECT_DOUBLE_EQ(p.eps_hidden_state, p.ledgers[0].eps_final + p.ledgers[1].eps_final);
  EXPECT_DOUBLE_EQ(p.layers[0].c0, 100.0);
  EXPECT_EQ(p.layers[1].n, 400u);
  EXPECT_EQ(p.layers[1].L_F, r.trace.layers[1].lipschitz_F);
  EXPECT_LT(p.eps_hidden_state, p.eps_composition);

  RunPrivacyOptions fixed = privacy_options(cfg);
  fixed.lipschitz_F = 0.9;
  fixed.sensitivity = 2.0;
  const RunPrivacy q = account_run(cfg.train, r.trace, fixed);
  EXPECT_EQ(q.layers[0].L_F, 0.9);
  EXPECT_EQ(q.layers[1].sensitivity, 2.0);

  TrainConfig nodp = cfg.train;
  nodp.dp_enabled = false;
  EXPECT_THROW(account_run(nodp, r.trace, fixed), std::invalid_argument);
}

TEST(Sweep, CellsOrderedAndSeeded) {
  const RunConfig cfg = small_run();
  const auto cells = sweep_cells(cfg);
  ASSERT_EQ(cells.size(), 2u * 2u * 3u);
  EXPECT_EQ(cells[0].K, 0);
  EXPECT_EQ(cells[3].schedule.name, "d");
  EXPECT_EQ(cells[6].K, 2);
  std::set<std::uint64_t> seeds;
  for (const auto& c : cells) seeds.insert(c.seed);
  EXPECT_EQ(seeds.size(), cells.size());
}

TEST(Sweep, ZeroEpochCellHasNoPrivacyLoss) {
  const RunConfig cfg = small_run();
  const Dataset ds = load_or_generate(cfg);
  const auto cells = sweep_cells(cfg);
  const CellResult r = run_cell(cfg, ds, cells[0]);
  EXPECT_EQ(r.eps_hidden_state, 0.0);
  const CellResult again = run_cell(cfg, ds, cells[7]);
  EXPECT_GT(again.eps_hidden_state, 0.0);
  EXPECT_EQ(run_cell(cfg, ds, cells[7]).test_acc, again.test_acc);
}

TEST(Sweep, SummaryIntervals) {
  std::vector<SweepCell> cells(4);
  for (int i = 0; i < 4; ++i) {
    cells[i].K = 10;
    cells[i].schedule.name = i < 3 ? "a" : "b";
    cells[i].repeat = i;
  }
  std::vector<CellResult> res(4);
  res[0].test_acc = 0.8;
  res[1].test_acc = 0.9;
  res[2].test_acc = 1.0;
  res[3].test_acc = 0.5;
  const auto rows = summarize_sweep(cells, res);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].mean_test_acc, 0.9, 1e-15);
  // t_{0.975, 2} = 4.302653, sd = 0.1
  ASSERT_TRUE(rows[0].ci95.has_value());
  EXPECT_NEAR(*rows[0].ci95, 4.302652729749464 * 0.1 / std::sqrt(3.0), 1e-9);
  EXPECT_FALSE(rows[1].ci95.has_value());
  EXPECT_THROW(summarize_sweep(cells, {}), std::invalid_argument);
}

}  // namespace
}  // namespace dpsbcd
