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

// dpsbcd generate|train|account|sweep|selftest --config <path> [--set key=value ...]
//        [--seed N] [--out DIR] [--force]

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "dpsbcd/config.hpp"
#include "dpsbcd/errors.hpp"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  dpsbcd::cli::CommandOptions options;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("--config", a.config, "key = value config file");
  sub->add_option("--set", a.sets, "override, key=value (repeatable)")->take_all();
  sub->add_option("--seed", a.seed, "run seed");
  sub->add_option("--out", a.out, "output directory");
  sub->add_flag("--force", a.options.force, "overwrite existing outputs");
}

dpsbcd::RunConfig build_config(const Args& a) {
  dpsbcd::ConfigMap map;
  if (!a.config.empty()) map = dpsbcd::ConfigMap::load(a.config);
  for (const auto& s : a.sets) map.set_assignment(s, "--set");
  if (a.seed) map.set("seed", std::to_string(*a.seed), "--seed");
  if (a.out) map.set("out", *a.out, "--out");
  return dpsbcd::resolve_config(map);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dpsbcd::cli;
  CLI::App app{"DP-SBCD training and hidden-state privacy accounting"};
  app.require_subcommand(1);
  Args args;
  using Command = int (*)(const dpsbcd::RunConfig&, const CommandOptions&);
  const std::pair<const char*, Command> commands[] = {
      {"generate", cmd_generate}, {"train", cmd_train}, {"account", cmd_account},
      {"sweep", cmd_sweep},       {"selftest", cmd_selftest},
  };
  const char* help[] = {"write a synthetic dataset CSV", "train one DP-SBCD run and account it",
                        "evaluate the accountant over K and schedules",
                        "train a (K, schedule, repeat) grid", "run the oracle suites"};
  Command chosen = nullptr;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
    add_common(sub, args);
    if (std::string(commands[i].first) == "selftest") {
      sub->add_flag("--corrupt-prox", args.options.corrupt_prox)->group("");
    }
    sub->callback([&chosen, c = commands[i].second] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    return chosen(build_config(args), args.options);
  } catch (const dpsbcd::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const dpsbcd::FormatError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return kExitConfig;
  } catch (const dpsbcd::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s (last good epoch %d)\n", e.what(),
                 e.last_good_epoch());
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailure;
  }
}
