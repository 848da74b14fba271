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

#ifndef DPSBCD_ERRORS_HPP_
#define DPSBCD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace dpsbcd {

// Bad configuration values or files; the CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed on-disk data (dataset CSV, model checkpoint).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values during training; the CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int last_good_epoch)
      : std::runtime_error(what), last_good_epoch_(last_good_epoch) {}
  // -1 when no epoch completed.
  int last_good_epoch() const noexcept { return last_good_epoch_; }

 private:
  int last_good_epoch_;
};

}  // namespace dpsbcd

#endif  // DPSBCD_ERRORS_HPP_
