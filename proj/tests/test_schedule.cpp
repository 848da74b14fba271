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

#include <stdexcept>

#include "dpsbcd/schedule.hpp"

namespace dpsbcd {
namespace {

TEST(Schedule, ConstantEverywhere) {
  const NoiseSchedule s = ConstantSchedule{0.01};
  for (std::int64_t k : {0, 3, 29}) {
    for (std::int64_t j : {0, 20}) EXPECT_EQ(eval_schedule(s, 0.01, k, j), 0.01);
  }
}

TEST(Schedule, LinearDecayArithmetic) {
  const NoiseSchedule s = LinearDecaySchedule{0.01, 0.003, 1e-6};
  EXPECT_NEAR(eval_schedule(s, 0.01, 2, 0), 0.004, 1e-15);
  // past zero the floor takes over
  EXPECT_EQ(eval_schedule(s, 0.01, 10, 0), 1e-6);
}

TEST(Schedule, LinearIncrease) {
  const NoiseSchedule s = LinearIncreaseSchedule{0.0001, 0.0003};
  EXPECT_NEAR(eval_schedule(s, 0.01, 3, 5), 0.001, 1e-15);
}

TEST(Schedule, DecreaseThenConstant) {
  const NoiseSchedule s =
      parse_schedule("piecewise(0:10=linear_decay(0.0005, 0.00003); 10:=constant(0.0002))", 30);
  EXPECT_EQ(eval_schedule(s, 0.01, 15, 0), 0.0002);
  EXPECT_NEAR(eval_schedule(s, 0.01, 9, 0), 0.0005 - 9 * 0.00003, 1e-15);
  EXPECT_EQ(eval_schedule(s, 0.01, 10, 0), 0.0002);
}

TEST(Schedule, PiecewiseGapThrows) {
  const NoiseSchedule s = parse_schedule("piecewise(0:5=constant(0.1); 6:=constant(0.2))", 10);
  EXPECT_THROW(eval_schedule(s, 0.01, 5, 0), std::invalid_argument);
  EXPECT_THROW(eval_schedule(s, 0.01, -1, 0), std::invalid_argument);
}

TEST(Schedule, NonPositiveValueIsDomainError) {
  const NoiseSchedule s = LinearDecaySchedule{0.01, 0.01, 0.0};
  EXPECT_THROW(eval_schedule(s, 0.01, 1, 0), std::domain_error);
  EXPECT_THROW(eval_schedule(ConstantSchedule{0.0}, 0.01, 0, 0), std::domain_error);
}

TEST(Schedule, DecayToEndsAtFinalValue) {
  const NoiseSchedule s = parse_schedule("decay_to(0.0075, 0.0008)", 30);
  EXPECT_NEAR(eval_schedule(s, 0.01, 29, 0), 0.0075, 1e-15);
  EXPECT_NEAR(eval_schedule(s, 0.01, 0, 0), 0.0075 + 29 * 0.0008, 1e-15);
}

TEST(Schedule, ParseErrors) {
  for (const char* bad : {"", "constant", "constant()", "constant(x)", "wobble(1)",
                          "linear_decay(1)", "piecewise()", "piecewise(a:b=constant(1))"}) {
    EXPECT_THROW(parse_schedule(bad, 10), std::invalid_argument) << bad;
  }
}

TEST(Schedule, ToStringRoundTrips) {
  for (const char* text :
       {"constant(0.01)", "linear_decay(0.001, 0.0003, 1e-06)", "linear_increase(0.0001, 0.0003)",
        "piecewise(0:10=linear_decay(0.0005, 3e-05); 10:=constant(0.0002))"}) {
    const NoiseSchedule s = parse_schedule(text, 30);
    const NoiseSchedule back = parse_schedule(schedule_to_string(s), 30);
    for (std::int64_t k = 0; k < 30; ++k) {
      EXPECT_EQ(eval_schedule(s, 0.01, k, 0), eval_schedule(back, 0.01, k, 0)) << text;
    }
  }
}

}  // namespace
}  // namespace dpsbcd
