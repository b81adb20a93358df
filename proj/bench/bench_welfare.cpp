// Copyright 2026 The matrix-mech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel Kronecker sweep against the plain enumeration reference.

#include <benchmark/benchmark.h>

#include <cmath>

#include "matrix_mech/random_scenario.hpp"
#include "matrix_mech/welfare.hpp"

namespace mm = matrix_mech;

namespace {

mm::Scenario make(int agents, int types) {
  mm::RandomScenarioConfig cfg;
  cfg.min_agents = cfg.max_agents = agents;
  cfg.min_types = cfg.max_types = types;
  return mm::random_scenario(17, cfg);
}

std::vector<double> start_table(const mm::Scenario& s) {
  std::vector<double> w(s.state_count());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::cos(0.1 * k);
  return w;
}

void BM_Sweep(benchmark::State& state) {
  const auto s = make(static_cast<int>(state.range(0)),
                      static_cast<int>(state.range(1)));
  const auto w = start_table(s);
  for (auto _ : state) benchmark::DoNotOptimize(mm::bellman_sweep(s, w));
  state.counters["states"] = static_cast<double>(s.state_count());
}

void BM_SweepReference(benchmark::State& state) {
  const auto s = make(static_cast<int>(state.range(0)),
                      static_cast<int>(state.range(1)));
  const auto w = start_table(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(mm::bellman_sweep_reference(s, w));
  }
  state.counters["states"] = static_cast<double>(s.state_count());
}

void BM_Solve(benchmark::State& state) {
  const auto s = make(static_cast<int>(state.range(0)),
                      static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mm::solve_welfare(s));
}

void BM_SolveReference(benchmark::State& state) {
  const auto s = make(static_cast<int>(state.range(0)),
                      static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mm::solve_welfare_reference(s));
}

}  // namespace

BENCHMARK(BM_Sweep)->Args({3, 3})->Args({4, 6})->Args({3, 13})->Args({6, 4})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepReference)->Args({3, 3})->Args({4, 6})->Args({3, 13})
    ->Args({6, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve)->Args({3, 3})->Args({4, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveReference)->Args({3, 3})->Args({4, 5})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
