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

// Serial reference vs OpenMP kernels at the shapes the trainer sees: 200-wide
// hidden layers, 960-sample batches.

#include <benchmark/benchmark.h>

#include "dpsbcd/kernels.hpp"
#include "dpsbcd/numerics.hpp"

namespace {

using dpsbcd::Matrix;
namespace k = dpsbcd::kernels;

Matrix sample(std::size_t r, std::size_t c, std::uint64_t seed) {
  dpsbcd::numerics::Rng rng(seed);
  return dpsbcd::numerics::gaussian_sample(rng, r, c, 1.0);
}

template <Matrix (*F)(const Matrix&, const Matrix&)>
void BM_matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  const Matrix a = sample(n, n, 1), x = sample(n, b, 2);
  for (auto _ : state) benchmark::DoNotOptimize(F(a, x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * b));
}

template <Matrix (*F)(const Matrix&)>
void BM_gram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  const Matrix x = sample(n, b, 3);
  for (auto _ : state) benchmark::DoNotOptimize(F(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * b));
}

template <void (*F)(const Matrix&, Matrix&)>
void BM_solve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto b = static_cast<std::size_t>(state.range(1));
  Matrix spd = k::gram(sample(n, n + 8, 4));
  for (std::size_t i = 0; i < n; ++i) spd(i, i) += 1.0;
  const Matrix lower = k::cholesky(spd);
  const Matrix rhs = sample(n, b, 5);
  for (auto _ : state) {
    Matrix x = rhs;
    F(lower, x);
    benchmark::DoNotOptimize(x);
  }
}

void shapes(benchmark::internal::Benchmark* b) {
  b->Args({20, 960})->Args({200, 960})->Args({200, 120})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_matmul<k::serial::matmul>)->Apply(shapes)->Name("matmul/serial");
BENCHMARK(BM_matmul<k::matmul>)->Apply(shapes)->Name("matmul/omp");
BENCHMARK(BM_gram<k::serial::gram>)->Apply(shapes)->Name("gram/serial");
BENCHMARK(BM_gram<k::gram>)->Apply(shapes)->Name("gram/omp");
BENCHMARK(BM_solve<k::serial::cholesky_solve_inplace>)->Apply(shapes)->Name("solve/serial");
BENCHMARK(BM_solve<k::cholesky_solve_inplace>)->Apply(shapes)->Name("solve/omp");

BENCHMARK_MAIN();
