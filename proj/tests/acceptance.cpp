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

// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance                 run all ten
//   acceptance --criterion N   run one (ctest registers each separately)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dpsbcd/accountant.hpp"
#include "dpsbcd/config.hpp"
#include "dpsbcd/pipeline.hpp"
#include "dpsbcd/schedule.hpp"
#include "selftest.hpp"

namespace {

using namespace dpsbcd;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Verdict from_suites(const std::vector<oracles::SuiteResult>& suites, double budget, double took) {
  Verdict v{true, ""};
  for (const auto& s : suites) {
    v.pass = v.pass && s.passed;
    v.detail += (v.detail.empty() ? "" : "; ") + s.detail;
  }
  if (budget > 0) {
    v.pass = v.pass && took < budget;
    v.detail += fmt("; %.2fs (budget %.0fs)", took, budget);
  }
  return v;
}

PrivacyConfig demo_config(const NoiseSchedule& s, std::int64_t K) {
  PrivacyConfig c;
  c.alpha = 100;
  c.sensitivity = 1;
  c.L_F = 0.99;  // layer cap rho = 0.99
  c.L_T = 1;
  c.c0 = 100;
  c.eta = 0.01;
  c.b = 100;
  c.n = 2100;
  c.K = K;
  c.schedule = s;
  return c;
}

const std::map<std::string, std::string>& regime_schedules() {
  static const std::map<std::string, std::string> s = {
      {"decay", "linear_decay(0.001, 0.0003, 1e-6)"},
      {"constant", "constant(0.0005)"},
      {"increase", "linear_increase(0.0001, 0.0003)"},
      {"decrease_constant",
       "piecewise(0:10=linear_decay(0.0005, 0.00003); 10:=constant(0.0002))"},
  };
  return s;
}

// eps_K for K = 1..30, index K - 1.
std::vector<double> regime_curve(const std::string& text) {
  std::vector<double> e;
  for (std::int64_t K = 1; K <= 30; ++K) e.push_back(epsilon_total(demo_config(parse_schedule(text, K), K)));
  return e;
}

// The MLP sweep setup with the two noise strategies; values mirror configs/mlp_sweep.conf.
RunConfig mlp_config() {
  ConfigMap m = ConfigMap::parse(
      "seed = 1\n"
      "out = acceptance_out\n"
      "data.n = 6000\n"
      "data.dims = 20\n"
      "data.classes = 5\n"
      "data.train_frac = 0.8\n"
      "train.hidden = 200,200,200,200\n"
      "train.rho = 3\n"
      "train.eta = 0.01\n"
      "train.batch_size = 960\n"
      "privacy.alpha = 100\n"
      "sweep.epochs = 30,40,50\n"
      "sweep.repeats = 5\n"
      "sweep.schedule.constant = constant(0.01)\n"
      "sweep.schedule.decrease = decay_to(0.0075, 0.0008)\n",
      "acceptance");
  return resolve_config(m);
}

Verdict criterion1() {
  const auto t0 = Clock::now();
  auto u = oracles::check_update_U(10000, 101);
  auto x = oracles::check_update_x(100, 102);
  return from_suites({u, x}, 10.0, seconds_since(t0));
}

Verdict criterion2() {
  return from_suites({oracles::check_grad_theta(100, 201), oracles::check_gram_bound(500, 202)}, 0,
                     0);
}

Verdict criterion3() { return from_suites({oracles::check_contraction(1000, 301)}, 0, 0); }

Verdict criterion4() {
  auto r = oracles::check_prox(10000, 401, prox_scalar);
  return from_suites({r}, 0, 0);
}

Verdict criterion5() { return from_suites({oracles::check_accountant(60, 501)}, 0, 0); }

Verdict criterion6() {
  const auto t0 = Clock::now();
  const PrivacyConfig cfg = demo_config(ConstantSchedule{0.01}, 30);
  const LsiTable table(cfg);
  Verdict v{true, ""};
  for (std::int64_t j0 : {0, 10, 20}) {
    const auto e = epsilon_j0(cfg, table, j0);
    // Walk the contributions by the number of epochs since that epoch's release.
    std::vector<double> by_age(e.contributions.rbegin(), e.contributions.rend());
    bool decreasing = true;
    for (std::size_t a = 1; a < by_age.size(); ++a) decreasing &= by_age[a] < by_age[a - 1];
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(by_age.size());
    for (std::size_t a = 0; a < by_age.size(); ++a) {
      const double x = static_cast<double>(a), y = std::log(by_age[a]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
    }
    const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
    const double r2 = cov * cov / (vx * vy);
    v.pass = v.pass && decreasing && r2 >= 0.9;
    v.detail += fmt("j0=%.0f decreasing=%.0f R2=%.4f; ", static_cast<double>(j0), decreasing, r2);
  }
  const double took = seconds_since(t0);
  v.pass = v.pass && took < 5.0;
  v.detail += fmt("%.3fs (budget 5s)", took);
  return v;
}

Verdict criterion7() {
  const auto t0 = Clock::now();
  std::map<std::string, std::vector<double>> eps;
  for (const auto& [name, text] : regime_schedules()) eps[name] = regime_curve(text);
  auto inc = [&](const std::string& s, std::int64_t K) { return eps[s][K - 1] - eps[s][K - 2]; };

  // The decay schedule reaches its floor after four epochs, so its growth is
  // read while the caption's formula is still positive.
  bool decay = true;
  for (std::int64_t K = 3; K <= 5; ++K) decay &= inc("decay", K) > inc("decay", K - 1);

  bool constant = true;
  for (std::int64_t K = 3; K <= 30; ++K) constant &= inc("constant", K) < inc("constant", K - 1);

  const auto& e_inc = eps["increase"];
  bool increase = e_inc[29] < *std::max_element(e_inc.begin(), e_inc.end());
  for (std::int64_t K = 21; K <= 30; ++K) increase &= inc("increase", K) < 0.0;

  // inc(K) is what epoch K - 1 adds, so inc(11) is the first constant-noise epoch.
  const double d10 = inc("decrease_constant", 11);
  bool dc = d10 > 0.0;
  for (std::int64_t K = 12; K <= 30; ++K) dc &= inc("decrease_constant", K) < d10;
  for (std::int64_t K = 21; K <= 30; ++K) {
    dc &= std::abs(inc("decrease_constant", K)) < std::abs(inc("decrease_constant", K - 1));
  }
  dc &= std::abs(inc("decrease_constant", 30)) < 0.01 * d10;

  Verdict v;
  const double took = seconds_since(t0);
  v.pass = decay && constant && increase && dc && took < 10.0;
  v.detail = fmt("decay increments grow=%.0f, constant increments shrink=%.0f, "
                 "increase eventually decreasing=%.0f, ",
                 decay, constant, increase) +
             fmt("decrease-constant increments shrink after epoch 10=%.0f; %.3fs (budget 10s)",
                 dc, took);
  return v;
}

Verdict criterion8() {
  struct Case {
    std::string name;
    PrivacyConfig cfg;
  };
  std::vector<Case> cases;
  cases.push_back({"contributions", demo_config(ConstantSchedule{0.01}, 30)});
  for (const auto& [name, text] : regime_schedules()) {
    for (std::int64_t K = 1; K <= 30; ++K) {
      cases.push_back(
          {"schedules " + name + " K=" + std::to_string(K), demo_config(parse_schedule(text, K), K)});
    }
  }
  // The MLP sweep at the accountant level: n = 4800 training rows, b = 960, the
  // analytic first-layer sensitivity for rho = 3 and unit inputs, worst-case L_F = 1.
  const RunConfig s5 = mlp_config();
  const double sg = estimate_sensitivity({3.0, 3.0}, {1.0, 1.0}, 1.0)[0];
  for (const auto& s : s5.sweep.schedules) {
    for (std::int64_t K = 10; K <= 50; K += 10) {
      PrivacyConfig c;
      c.alpha = 100;
      c.sensitivity = sg;
      c.L_F = 1.0;
      c.c0 = s5.c0();
      c.eta = 0.01;
      c.b = 960;
      c.n = 4800;
      c.K = K;
      c.schedule = parse_schedule(s.text, K);
      cases.push_back({"mlp " + s.name + " K=" + std::to_string(K), c});
    }
  }
  Verdict v{true, ""};
  int failures = 0;
  std::string failed;
  for (const auto& c : cases) {
    const double hs = epsilon_total(c.cfg), comp = composition_baseline(c.cfg);
    if (!(hs < comp)) {
      ++failures;
      if (failures <= 4) failed += " " + c.name + fmt(" (%.4g vs %.4g)", hs, comp);
    }
  }
  v.pass = failures == 0;
  v.detail = fmt("%.0f configs, %.0f where hidden-state >= composition", cases.size(), failures);
  if (failures) v.detail += ":" + failed + (failures > 4 ? " ..." : "");
  return v;
}

Verdict criterion9() {
  const auto t0 = Clock::now();
  const RunConfig cfg = mlp_config();
  const Dataset ds = load_or_generate(cfg);
  const auto cells = sweep_cells(cfg);
  std::vector<CellResult> results;
  for (const auto& c : cells) {
    results.push_back(run_cell(cfg, ds, c));
    std::fprintf(stderr, "  K=%lld %s repeat %d: test_acc %.4f eps %.6g\n",
                 static_cast<long long>(c.K), c.schedule.name.c_str(), c.repeat,
                 results.back().test_acc, results.back().eps_hidden_state);
  }
  const auto rows = summarize_sweep(cells, results);
  std::map<std::pair<std::int64_t, std::string>, TableRow> by;
  for (const auto& r : rows) by[{r.K, r.schedule}] = r;

  const double acc50 = by[{50, "decrease"}].mean_test_acc;
  const bool a = acc50 >= 0.85;
  bool b = true, c = true;
  std::string detail = fmt("(a) decrease K=50 mean acc %.4f (need >= 0.85); (b)", acc50);
  for (std::int64_t K : {30, 40, 50}) {
    const auto& d = by[{K, "decrease"}];
    const auto& k = by[{K, "constant"}];
    b &= d.mean_test_acc >= k.mean_test_acc;
    const double ratio = d.eps_hidden_state / k.eps_hidden_state;
    c &= std::abs(ratio - 1.0) <= 0.05;
    detail += fmt(" K=%.0f %.4f vs %.4f", static_cast<double>(K), d.mean_test_acc, k.mean_test_acc);
  }
  detail += "; (c) eps ratio decrease/constant";
  for (std::int64_t K : {30, 40, 50}) {
    detail += fmt(" K=%.0f %.3f", static_cast<double>(K),
                  by[{K, "decrease"}].eps_hidden_state / by[{K, "constant"}].eps_hidden_state);
  }
  const double took = seconds_since(t0);
  detail += fmt("; a=%.0f b=%.0f c=%.0f; %.0fs (budget 900s)", a, b, c, took);
  return {a && b && c && took < 900.0, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict criterion10() {
  const fs::path root = fs::temp_directory_path() / "dpsbcd_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path conf = root / "run.conf";
  std::ofstream(conf) << "seed = 5\n"
                         "data.n = 1000\n"
                         "train.hidden = 16,16\n"
                         "train.batch_size = 100\n"
                         "train.epochs = 3\n"
                         "privacy.lipschitz_F = 0.99\n"
                         "privacy.sensitivity = 1\n"
                         "account.n = 2100\n"
                         "account.b = 100\n"
                         "account.epochs = 1:10\n"
                         "account.schedule.c = constant(0.01)\n"
                         "account.schedule.d = linear_decay(0.01, 0.0005)\n"
                         "sweep.epochs = 1,2\n"
                         "sweep.repeats = 2\n"
                         "sweep.schedule.c = constant(0.01)\n"
                         "sweep.schedule.d = decay_to(0.0075, 0.0008)\n";
  int compared = 0, differing = 0, failed_runs = 0;
  std::string which;
  for (const char* cmd : {"generate", "train", "account", "sweep", "selftest"}) {
    for (const char* rep : {"a", "b"}) {
      const std::string line = std::string(DPSBCD_CLI_PATH) + " " + cmd + " --config " +
                               conf.string() + " --out " + (root / cmd / rep).string() +
                               " > " + (root / (std::string(cmd) + rep + ".log")).string() +
                               " 2>&1";
      const int status = std::system(line.c_str());
      failed_runs += !(WIFEXITED(status) && WEXITSTATUS(status) == 0);
    }
    if (!fs::exists(root / cmd / "a")) continue;
    for (const auto& f : fs::directory_iterator(root / cmd / "a")) {
      const fs::path other = root / cmd / "b" / f.path().filename();
      ++compared;
      if (!fs::exists(other) || slurp(f.path()) != slurp(other)) {
        ++differing;
        which += " " + std::string(cmd) + "/" + f.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  Verdict v;
  v.pass = failed_runs == 0 && differing == 0 && compared > 0;
  v.detail = fmt("%.0f output files compared across repeated runs, %.0f differ, %.0f failed runs",
                 compared, differing, failed_runs) + which;
  return v;
}

const char* kTitles[] = {
    "",
    "block-update oracle equivalence",
    "gradient and smoothness checks",
    "contraction bound",
    "prox catalog",
    "accountant cross-check",
    "per-epoch contribution curves",
    "epsilon-vs-K schedule shapes",
    "composition domination",
    "end-to-end accuracy and matched privacy",
    "determinism",
};

}  // namespace

int main(int argc, char** argv) {
  const std::function<Verdict()> checks[] = {nullptr,     criterion1, criterion2, criterion3,
                                             criterion4,  criterion5, criterion6, criterion7,
                                             criterion8,  criterion9, criterion10};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion N]...\n");
      return 2;
    }
  }
  if (which.empty()) {
    for (int c = 1; c <= 10; ++c) which.push_back(c);
  }
  bool all = true;
  for (int c : which) {
    if (c < 1 || c > 10) {
      std::fprintf(stderr, "no criterion %d\n", c);
      return 2;
    }
    Verdict v;
    try {
      v = checks[c]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c, kTitles[c],
                v.detail.c_str());
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
