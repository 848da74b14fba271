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

#include "commands.hpp"

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "dpsbcd/accountant.hpp"
#include "dpsbcd/csv.hpp"
#include "dpsbcd/data.hpp"
#include "dpsbcd/errors.hpp"
#include "dpsbcd/network.hpp"
#include "dpsbcd/pipeline.hpp"
#include "dpsbcd/schedule.hpp"
#include "dpsbcd/trainer.hpp"
#include "selftest.hpp"

namespace dpsbcd::cli {
namespace {

namespace fs = std::filesystem;

std::string num(double v) { return format_real(v); }

class Output {
 public:
  Output(const RunConfig& cfg, bool force) : cfg_(cfg), force_(force) {
    fs::create_directories(cfg.out_dir);
  }

  fs::path path(const std::string& name) const { return cfg_.out_dir / name; }

  // Refuses to clobber before any work starts, so a long run is not wasted.
  void reserve(const std::string& name) const {
    if (!force_ && fs::exists(path(name))) {
      throw std::runtime_error("refusing to overwrite " + path(name).string() +
                               " (pass --force)");
    }
  }

  void csv(const std::string& name, const std::string& body) const {
    write_text_file(path(name), body + manifest_line(cfg_.seed, cfg_.hash) + "\n", force_);
  }

 private:
  const RunConfig& cfg_;
  bool force_;
};

std::string trace_csv(const TrainTrace& trace) {
  std::ostringstream os;
  os << "epoch,objective,train_acc,test_acc\n";
  for (const auto& e : trace.epochs) {
    os << e.epoch << ',' << num(e.objective) << ',' << num(e.train_acc) << ','
       << num(e.test_acc) << '\n';
  }
  return os.str();
}

std::string layers_csv(const TrainTrace& trace, const RunPrivacy* privacy) {
  std::ostringstream os;
  os << "layer,lipschitz_F,beta,omega_min,X,beta_bound,max_abs_U,steps,sensitivity\n";
  for (std::size_t d = 0; d < trace.layers.size(); ++d) {
    const auto& l = trace.layers[d];
    os << d << ',' << num(l.lipschitz_F) << ',' << num(l.beta) << ',' << num(l.omega_min) << ','
       << num(l.X) << ',' << num(l.beta_bound) << ',' << num(l.max_abs_U) << ',' << l.steps << ',';
    if (privacy) os << num(privacy->layers[d].sensitivity);
    os << '\n';
  }
  return os.str();
}

void print_numeric_failure(const NumericError& e) {
  std::fprintf(stderr, "numeric failure: %s (last good epoch %d)\n", e.what(),
               e.last_good_epoch());
}

}  // namespace

int cmd_generate(const RunConfig& cfg, const CommandOptions& o) {
  Output out(cfg, o.force);
  out.reserve("dataset.csv");
  out.reserve("dataset.manifest");
  const Dataset ds = generate(cfg.data.generator, cfg.data_seed());
  save_csv(ds, out.path("dataset.csv"), manifest_line(cfg.seed, cfg.hash));

  const auto& g = cfg.data.generator;
  std::ostringstream m;
  m << "seed = " << cfg.data_seed() << "\nn = " << g.n << "\ndims = " << g.dims
    << "\nclasses = " << g.classes << "\ninformative = " << g.informative
    << "\nredundant = " << g.redundant << "\nclusters_per_class = " << g.clusters_per_class
    << "\nseparation = " << num(g.separation) << "\ntrain_frac = " << num(g.train_frac)
    << "\ntrain_rows = " << ds.count(Split::kTrain) << "\ntest_rows = " << ds.count(Split::kTest)
    << '\n';
  write_text_file(out.path("dataset.manifest"), m.str(), o.force);
  std::printf("wrote %zu rows to %s\n", ds.size(), out.path("dataset.csv").c_str());
  return kExitOk;
}

int cmd_train(const RunConfig& cfg, const CommandOptions& o) {
  Output out(cfg, o.force);
  for (const char* f : {"trace.csv", "layers.csv", "ledger.csv", "summary.csv",
                        "layer_privacy.csv", "model.bin"}) {
    out.reserve(f);
  }
  const Dataset ds = load_or_generate(cfg);
  const BatchedData data = split_and_batch(ds, cfg.train.batch_size, cfg.seed);

  TrainResult run;
  try {
    run = train(cfg.train, data, [](const EpochRecord& e) {
      std::fprintf(stderr, "epoch %lld objective %.6g train_acc %.4f test_acc %.4f\n",
                   static_cast<long long>(e.epoch), e.objective, e.train_acc, e.test_acc);
    });
  } catch (const NumericError& e) {
    print_numeric_failure(e);
    return kExitNumeric;
  }

  const bool accounted = cfg.train.dp_enabled && cfg.train.epochs > 0;
  RunPrivacy privacy;
  if (accounted) privacy = account_run(cfg.train, run.trace, privacy_options(cfg));

  out.csv("trace.csv", trace_csv(run.trace));
  out.csv("layers.csv", layers_csv(run.trace, accounted ? &privacy : nullptr));

  std::ostringstream ledger, summary, per_layer;
  if (accounted) {
    write_ledger_csv(ledger, privacy.ledgers);
    write_summary_csv(summary, {{cfg.train.epochs, cfg.privacy.alpha, privacy.eps_hidden_state,
                                 privacy.eps_composition}});
  } else {
    ledger << "layer,j0,k,contribution,c_kj,eps_cumulative\n";
    summary << "K,alpha,eps_hidden_state,eps_composition\n";
    // Without noise there is nothing to account; K = 0 releases only the
    // data-independent initialization.
    const char* eps = cfg.train.dp_enabled ? "0" : "n/a";
    summary << cfg.train.epochs << ',' << num(cfg.privacy.alpha) << ',' << eps << ',' << eps
            << '\n';
  }
  per_layer << "layer,lipschitz_F,sensitivity,c0,eps_hidden_state,eps_composition\n";
  for (std::size_t d = 0; d < privacy.ledgers.size(); ++d) {
    const auto& l = privacy.ledgers[d];
    per_layer << d << ',' << num(l.cfg.L_F) << ',' << num(l.cfg.sensitivity) << ','
              << num(l.cfg.c0) << ',' << num(l.eps_final) << ',' << num(l.eps_composition)
              << '\n';
  }
  out.csv("ledger.csv", ledger.str());
  out.csv("summary.csv", summary.str());
  out.csv("layer_privacy.csv", per_layer.str());
  save_model(run.model, out.path("model.bin"));

  std::printf("train_acc %.4f test_acc %.4f\n", run.trace.final_train_acc,
              run.trace.final_test_acc);
  if (!cfg.train.dp_enabled) {
    std::printf("eps_hidden_state n/a eps_composition n/a (dp disabled)\n");
  } else {
    std::printf("eps_hidden_state %.6g eps_composition %.6g (alpha %g)\n",
                privacy.eps_hidden_state, privacy.eps_composition, cfg.privacy.alpha);
  }
  return kExitOk;
}

int cmd_account(const RunConfig& cfg, const CommandOptions& o) {
  if (!cfg.privacy.lipschitz_F) {
    throw ConfigError("account needs privacy.lipschitz_F (no training run to derive it from)");
  }
  if (!cfg.privacy.sensitivity) {
    throw ConfigError("account needs privacy.sensitivity (no training run to derive it from)");
  }
  std::vector<NamedSchedule> schedules = cfg.account.schedules;
  if (schedules.empty()) schedules.push_back({"train", cfg.train_schedule});

  Output out(cfg, o.force);
  out.reserve("curves.csv");
  out.reserve("contributions.csv");
  for (const auto& s : schedules) {
    out.reserve("ledger_" + s.name + ".csv");
    out.reserve("summary_" + s.name + ".csv");
  }

  const auto make = [&](const NamedSchedule& s, std::int64_t K) {
    PrivacyConfig p;
    p.alpha = cfg.privacy.alpha;
    p.sensitivity = *cfg.privacy.sensitivity;
    p.L_F = *cfg.privacy.lipschitz_F;
    p.L_T = cfg.privacy.L_T;
    p.c0 = cfg.c0();
    p.eta = cfg.account.eta;
    p.gamma = cfg.train.gamma;
    p.b = cfg.account.b;
    p.n = cfg.account.n;
    p.K = K;
    p.schedule = parse_schedule(s.text, K);
    return p;
  };

  std::int64_t K_max = 0;
  for (std::int64_t K : cfg.account.epochs) K_max = std::max(K_max, K);
  const auto m = static_cast<std::int64_t>(cfg.account.n / cfg.account.b);
  std::vector<std::int64_t> j0s = cfg.account.j0;
  if (j0s.empty()) {
    for (std::int64_t j = 0; j < m; ++j) j0s.push_back(j);
  }

  // rows[i][s]: summary of schedule s at the i-th K
  std::vector<std::vector<SummaryRow>> rows(cfg.account.epochs.size());
  std::vector<PrivacyLedger> final_ledgers;
  for (const auto& s : schedules) {
    std::vector<SummaryRow> mine;
    for (std::size_t i = 0; i < cfg.account.epochs.size(); ++i) {
      const std::int64_t K = cfg.account.epochs[i];
      const PrivacyLedger ledger = build_ledger(make(s, K));
      const SummaryRow row{K, cfg.privacy.alpha, ledger.eps_final, ledger.eps_composition};
      rows[i].push_back(row);
      mine.push_back(row);
    }
    final_ledgers.push_back(build_ledger(make(s, K_max)));
    std::ostringstream summary;
    write_summary_csv(summary, mine);
    out.csv("summary_" + s.name + ".csv", summary.str());
  }

  for (std::size_t si = 0; si < schedules.size(); ++si) {
    std::ostringstream ledger;
    write_ledger_csv(ledger, {final_ledgers[si]});
    out.csv("ledger_" + schedules[si].name + ".csv", ledger.str());
  }

  std::ostringstream curves;
  curves << "K";
  for (const auto& s : schedules) curves << ",eps_" << s.name << ",composition_" << s.name;
  curves << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    curves << cfg.account.epochs[i];
    for (const auto& r : rows[i]) curves << ',' << num(r.eps_hidden_state) << ','
                                         << num(r.eps_composition);
    curves << '\n';
  }
  out.csv("curves.csv", curves.str());

  // One column per (schedule, j0) at the largest K. Column age counts the epochs
  // that follow epoch k, so reading by increasing age walks back in time.
  std::ostringstream contrib;
  contrib << "k,age";
  for (const auto& s : schedules) {
    for (std::int64_t j : j0s) contrib << ',' << s.name << "_j0_" << j;
  }
  contrib << '\n';
  for (std::int64_t k = 0; k < K_max; ++k) {
    contrib << k << ',' << (K_max - 1 - k);
    for (const auto& l : final_ledgers) {
      for (std::int64_t j : j0s) {
        contrib << ',' << num(l.contributions[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
      }
    }
    contrib << '\n';
  }
  out.csv("contributions.csv", contrib.str());

  for (std::size_t si = 0; si < schedules.size(); ++si) {
    std::printf("%s: K=%lld eps_hidden_state %.6g eps_composition %.6g\n",
                schedules[si].name.c_str(), static_cast<long long>(K_max),
                final_ledgers[si].eps_final, final_ledgers[si].eps_composition);
  }
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& o) {
  Output out(cfg, o.force);
  out.reserve("table.csv");
  out.reserve("runs.csv");
  const Dataset ds = load_or_generate(cfg);
  const std::vector<SweepCell> cells = sweep_cells(cfg);
  std::vector<CellResult> results(cells.size());

  // Each cell owns its seed, so scheduling order cannot change any value.
  bool failed = false;
  std::string failure;
  int last_good = -1;
  const auto n = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) if (cfg.sweep.parallel_cells)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    try {
      results[static_cast<std::size_t>(i)] = run_cell(cfg, ds, c);
#pragma omp critical
      std::fprintf(stderr, "cell K=%lld %s repeat %d: test_acc %.4f eps %.6g\n",
                   static_cast<long long>(c.K), c.schedule.name.c_str(), c.repeat,
                   results[static_cast<std::size_t>(i)].test_acc,
                   results[static_cast<std::size_t>(i)].eps_hidden_state);
    } catch (const NumericError& e) {
#pragma omp critical
      {
        if (!failed) {
          failed = true;
          failure = "cell K=" + std::to_string(c.K) + " " + c.schedule.name + " repeat " +
                    std::to_string(c.repeat) + ": " + e.what();
          last_good = e.last_good_epoch();
        }
      }
    }
  }
  if (failed) {
    print_numeric_failure(NumericError(failure, last_good));
    return kExitNumeric;
  }

  std::ostringstream runs;
  runs << "K,schedule,repeat,seed,train_acc,test_acc,eps_hidden_state,eps_composition\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    const auto& r = results[i];
    runs << c.K << ',' << c.schedule.name << ',' << c.repeat << ',' << c.seed << ','
         << num(r.train_acc) << ',' << num(r.test_acc) << ',' << num(r.eps_hidden_state) << ','
         << num(r.eps_composition) << '\n';
  }
  out.csv("runs.csv", runs.str());

  const auto rows = summarize_sweep(cells, results);
  std::ostringstream table;
  table << "K,schedule,repeats,mean_test_acc,ci95,mean_train_acc,eps_hidden_state,"
           "eps_composition\n";
  for (const auto& r : rows) {
    table << r.K << ',' << r.schedule << ',' << r.repeats << ',' << num(r.mean_test_acc) << ','
          << (r.ci95 ? num(*r.ci95) : std::string()) << ',' << num(r.mean_train_acc) << ','
          << num(r.eps_hidden_state) << ',' << num(r.eps_composition) << '\n';
    std::printf("K=%-4lld %-12s acc %.4f", static_cast<long long>(r.K), r.schedule.c_str(),
                r.mean_test_acc);
    if (r.ci95) std::printf(" +- %.4f", *r.ci95);
    std::printf("  eps %.6g (composition %.6g)\n", r.eps_hidden_state, r.eps_composition);
  }
  out.csv("table.csv", table.str());
  return kExitOk;
}

int cmd_selftest(const RunConfig& cfg, const CommandOptions& o) {
  oracles::SelftestOptions opts;
  opts.seed = cfg.seed;
  if (o.corrupt_prox) {
    opts.prox = [](ProxKind kind, double eta, double v) {
      const double p = prox_scalar(kind, eta, v);
      return kind == ProxKind::kL2 ? p * 1.001 : p;
    };
  }
  bool ok = true;
  for (const auto& r : oracles::run_selftest(opts)) {
    std::printf("%s\n", oracles::format_result(r).c_str());
    std::fflush(stdout);
    ok = ok && r.passed;
  }
  std::printf("%s\n", ok ? "selftest: all suites passed" : "selftest: FAILED");
  return ok ? kExitOk : kExitFailure;
}

}  // namespace dpsbcd::cli
