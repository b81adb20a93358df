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

#pragma once

#include <cstdint>
#include <vector>

#include "matrix_mech/scenario.hpp"

namespace matrix_mech {

struct RandomScenarioConfig {
  int min_agents = 1;
  int max_agents = 3;
  int min_types = 1;
  int max_types = 3;
  /// Each v_i(a, theta_a) depends on theta_i only.
  bool private_values = false;
  double min_delta = 0.3;
  double max_delta = 0.9;
};

/// Valuations uniform in [-1, 1] rounded to 3 decimals, allocation-dependent
/// kernels from normalised uniform draws, delta uniform in the configured
/// range rounded to 2 decimals. Deterministic in `seed`.
Scenario random_scenario(std::uint64_t seed,
                         const RandomScenarioConfig& config = {});

/// `count` scenarios from per-instance seeds derived from `seed`.
std::vector<Scenario> random_suite(std::uint64_t seed, std::size_t count,
                                   const RandomScenarioConfig& config = {});

/// The fixed 100-instance desk-scale suite (n <= 3, |Theta_i| <= 3).
std::vector<Scenario> default_suite();

constexpr std::uint64_t kDefaultSuiteSeed = 20260101;

}  // namespace matrix_mech
