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

#include <cmath>
#include <stdexcept>

#include "dpsbcd/matrix.hpp"

namespace dpsbcd {
namespace {

TEST(Matrix, LiteralIsRowMajor) {
  const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(a(0, 2), 3.0);
  EXPECT_EQ(a(1, 0), 4.0);
  EXPECT_EQ(a.row(1)[2], 6.0);
  EXPECT_EQ(a.column(1), (std::vector<double>{2, 5}));
}

TEST(Matrix, LiteralSizeMismatchThrows) {
  EXPECT_THROW(Matrix(2, 2, {1, 2, 3}), std::invalid_argument);
}

TEST(Matrix, TransposeAndArithmetic) {
  const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
  const Matrix t = a.transposed();
  EXPECT_EQ(t.rows(), 3u);
  EXPECT_EQ(t(2, 1), 6.0);
  EXPECT_EQ(a + a, a * 2.0);
  EXPECT_EQ(a - a, Matrix(2, 3));
  EXPECT_EQ(0.5 * (a + a), a);
  EXPECT_THROW(a + t, std::invalid_argument);
}

TEST(Matrix, Norms) {
  const Matrix a(2, 2, {3, 0, -4, 1});
  EXPECT_DOUBLE_EQ(frobenius_norm_squared(a), 26.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(a), std::sqrt(26.0));
  EXPECT_DOUBLE_EQ(max_abs(a), 4.0);
  // columns (3, -4) and (0, 1)
  EXPECT_DOUBLE_EQ(max_column_norm_squared(a), 25.0);
}

TEST(Matrix, IdentityAndDiagonal) {
  const double d[] = {3.0, 1.0};
  EXPECT_EQ(Matrix::diagonal(d), Matrix(2, 2, {3, 0, 0, 1}));
  EXPECT_EQ(Matrix::identity(2), Matrix(2, 2, {1, 0, 0, 1}));
}

TEST(Matrix, FiniteCheck) {
  Matrix a(2, 2, 1.0);
  EXPECT_TRUE(a.all_finite());
  a(1, 1) = std::nan("");
  EXPECT_FALSE(a.all_finite());
  a(1, 1) = INFINITY;
  EXPECT_FALSE(a.all_finite());
}

}  // namespace
}  // namespace dpsbcd
