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

// Run configuration: `key = value` lines, `#` comments, dotted section keys.
// Unknown keys are errors. See configs/*.conf for every recognised key.

#ifndef DPSBCD_CONFIG_HPP_
#define DPSBCD_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpsbcd/data.hpp"
#include "dpsbcd/trainer.hpp"

namespace dpsbcd {

struct ConfigEntry {
  std::string value;
  std::string origin;  // "file:line" or "--set"
};

class ConfigMap {
 public:
  static ConfigMap parse(std::string_view text, const std::string& source);
  static ConfigMap load(const std::filesystem::path& path);

  // Adds or replaces a key. Throws ConfigError on an empty key.
  void set(const std::string& key, const std::string& value, const std::string& origin);
  // Parses "key=value".
  void set_assignment(std::string_view assignment, const std::string& origin);

  const std::map<std::string, ConfigEntry>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, ConfigEntry> entries_;
};

struct NamedSchedule {
  std::string name;
  std::string text;  // parsed per epoch budget, since decay_to depends on it
};

struct DataSettings {
  GeneratorOptions generator;
  std::optional<std::uint64_t> seed;  // defaults to the run seed
  std::filesystem::path path;         // empty: generate in memory
};

struct PrivacySettings {
  double alpha = 100.0;
  double L_T = 1.0;
  std::optional<double> c0;            // default 1 / train.init_variance
  std::optional<double> lipschitz_F;   // default: derived from the run
  std::optional<double> sensitivity;   // default: analytic bound from the run
};

struct AccountSettings {
  std::size_t n = 2100;
  std::size_t b = 100;
  double eta = 0.01;
  std::vector<std::int64_t> epochs = {30};
  std::vector<NamedSchedule> schedules;
  std::vector<std::int64_t> j0;  // empty: every batch index
};

struct SweepSettings {
  std::vector<std::int64_t> epochs = {10, 20, 30, 40, 50};
  std::vector<NamedSchedule> schedules;
  int repeats = 5;
  bool parallel_cells = false;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  DataSettings data;
  TrainConfig train;
  std::string train_schedule = "constant(0.01)";
  PrivacySettings privacy;
  AccountSettings account;
  SweepSettings sweep;
  std::uint64_t hash = 0;  // over the canonical resolved key set

  std::uint64_t data_seed() const noexcept { return data.seed.value_or(seed); }
  double c0() const noexcept { return privacy.c0.value_or(1.0 / train.init_variance); }
};

// Validates keys and values and fills in defaults. Throws ConfigError naming
// the key and where it was set.
RunConfig resolve_config(const ConfigMap& map);

std::uint64_t fnv1a64(std::string_view text);
// Parses "a,b,c", "first:last" or "first:last:step" (inclusive).
std::vector<std::int64_t> parse_int_list(std::string_view text);

}  // namespace dpsbcd

#endif  // DPSBCD_CONFIG_HPP_
