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

// Noise control functions o(eta, k, j): the variance scale of the Gaussian
// perturbation at epoch k, batch j.

#ifndef DPSBCD_SCHEDULE_HPP_
#define DPSBCD_SCHEDULE_HPP_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dpsbcd {

struct ConstantSchedule {
  double o0 = 0.0;
};

// max(floor, o0 - slope * k)
struct LinearDecaySchedule {
  double o0 = 0.0;
  double slope = 0.0;
  double floor = 1e-6;
};

// o0 + slope * k
struct LinearIncreaseSchedule {
  double o0 = 0.0;
  double slope = 0.0;
};

using BasicSchedule = std::variant<ConstantSchedule, LinearDecaySchedule, LinearIncreaseSchedule>;

// Epochs [begin, end) follow `schedule`, evaluated at the absolute epoch k.
struct ScheduleSegment {
  std::int64_t begin = 0;
  std::int64_t end = std::numeric_limits<std::int64_t>::max();
  BasicSchedule schedule;
};

struct PiecewiseSchedule {
  std::vector<ScheduleSegment> segments;
};

using NoiseSchedule = std::variant<ConstantSchedule, LinearDecaySchedule, LinearIncreaseSchedule,
                                   PiecewiseSchedule>;

// Throws std::domain_error when the value is not strictly positive and finite,
// std::invalid_argument for negative indices or an epoch no segment covers.
double eval_schedule(const NoiseSchedule& s, double eta, std::int64_t k, std::int64_t j);

// Text forms (whitespace ignored):
//   constant(o0)
//   linear_decay(o0, slope[, floor])       floor defaults to 1e-6
//   linear_increase(o0, slope)
//   decay_to(final, slope)                 o(k) = final + slope (K - 1 - k)
//   piecewise(B:E=<basic>; B:=<basic>; ...)
// decay_to depends on the epoch budget, hence `epochs`. Throws
// std::invalid_argument with the offending text on malformed input.
NoiseSchedule parse_schedule(std::string_view text, std::int64_t epochs);
std::string schedule_to_string(const NoiseSchedule& s);

}  // namespace dpsbcd

#endif  // DPSBCD_SCHEDULE_HPP_
