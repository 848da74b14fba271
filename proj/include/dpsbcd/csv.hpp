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

#ifndef DPSBCD_CSV_HPP_
#define DPSBCD_CSV_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

namespace dpsbcd {

// "# dpsbcd v1 seed=<seed> config_hash=<16 hex digits>"
std::string manifest_line(std::uint64_t seed, std::uint64_t config_hash);

// Shortest-round-trip-safe decimal (%.17g).
std::string format_real(double v);

// Writes `body` verbatim. Refuses to replace an existing file unless `force`;
// throws std::runtime_error on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& body, bool force);

}  // namespace dpsbcd

#endif  // DPSBCD_CSV_HPP_
