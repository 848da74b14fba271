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

#include "dpsbcd/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dpsbcd {

std::string manifest_line(std::uint64_t seed, std::uint64_t config_hash) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# dpsbcd v1 seed=%" PRIu64 " config_hash=%016" PRIx64, seed,
                config_hash);
  return buf;
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& body, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw std::runtime_error(path.string() + " already exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << body;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace dpsbcd
