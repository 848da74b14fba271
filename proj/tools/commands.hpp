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

#ifndef DPSBCD_TOOLS_COMMANDS_HPP_
#define DPSBCD_TOOLS_COMMANDS_HPP_

#include "dpsbcd/config.hpp"

namespace dpsbcd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct CommandOptions {
  bool force = false;
  bool corrupt_prox = false;  // selftest negative control
};

int cmd_generate(const RunConfig& cfg, const CommandOptions& o);
int cmd_train(const RunConfig& cfg, const CommandOptions& o);
int cmd_account(const RunConfig& cfg, const CommandOptions& o);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& o);
int cmd_selftest(const RunConfig& cfg, const CommandOptions& o);

}  // namespace dpsbcd::cli

#endif  // DPSBCD_TOOLS_COMMANDS_HPP_
