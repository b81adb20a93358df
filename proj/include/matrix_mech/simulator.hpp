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
#include <optional>
#include <span>
#include <vector>

#include "matrix_mech/mechanism.hpp"
#include "matrix_mech/scenario.hpp"
#include "matrix_mech/welfare.hpp"

namespace matrix_mech {

/// Per-agent strategies, optionally active at a single round only (truthful
/// everywhere else).
struct StrategyProfile {
  std::vector<AgentStrategy> agents;
  std::optional<int> active_round;

  static StrategyProfile truthful() { return {}; }
  /// `agent` plays `deviation` at `round` and is truthful otherwise.
  static StrategyProfile single_deviation(int agents, int agent, int round,
                                          AgentStrategy deviation);

  /// Strategies in force at round t (empty span: everyone truthful).
  std::span<const AgentStrategy> at(int t) const {
    if (active_round && *active_round != t) return {};
    return agents;
  }
};

struct Trajectory {
  Profile initial;
  std::vector<RoundOutcome> rounds;
  /// sum_t delta^t * utility_{i,t}, per agent.
  std::vector<double> discounted_utility;
  std::uint64_t seed = 0;
};

struct UtilityEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t episodes = 0;
  int horizon = 0;
  /// delta^T (n M + P_max) / (1 - delta).
  double truncation_bound = 0.0;
};

/// Stream seed for episode `index` under root seed `root`.
std::uint64_t episode_seed(std::uint64_t root, std::uint64_t index);

Trajectory simulate_episode(const Scenario& scenario,
                            const MechanismTables& tables,
                            const MechanismConfig& mechanism,
                            const StrategyProfile& strategies,
                            std::span<const int> initial, int horizon,
                            std::uint64_t seed);

/// W(theta) - W_{-i}(theta_{-i}).
double exact_truthful_utility(const Scenario& scenario,
                              const MechanismTables& tables,
                              std::span<const int> profile, int agent);

/// Closed-form discounted utility of `agent` when it reports `type_report`
/// and `value_report` in the current round and everyone is truthful
/// afterwards (and the others are truthful throughout):
///
///   v_i(a, theta) + sum_{j != i} x_j + delta E[W_{-i} | a, theta_hat]
///   - W_{-i}(theta_{-i}) - g(vhat_i, v_i(a, theta_hat))
///   + delta E[W - W_{-i} | a, theta],         a = a*(theta_hat),
///
/// where x_j = v_j(a, theta) under MATRIX and v_j(a, theta_hat) under the
/// pivot baseline (which has no penalty and ignores `value_report`).
/// Throws std::invalid_argument for the fixed-price baseline, which has no
/// closed form; use evaluated_deviation_utility.
double exact_deviation_utility(const Scenario& scenario,
                               const MechanismTables& tables,
                               std::span<const int> profile, int agent,
                               int type_report, double value_report,
                               const MechanismConfig& mechanism = {});

/// Truthful-play value function of `agent` under any mechanism, by iterating
/// U = r + delta P_{a*} U with plain enumeration over next profiles.
std::vector<double> truthful_value_function(const Scenario& scenario,
                                            const MechanismTables& tables,
                                            const MechanismConfig& mechanism,
                                            int agent, double tol = 1e-12);

/// Deviation utility from a direct round evaluation plus the continuation
/// `truthful_values` (from truthful_value_function).
double evaluated_deviation_utility(const Scenario& scenario,
                                   const MechanismTables& tables,
                                   const MechanismConfig& mechanism,
                                   std::span<const int> profile, int agent,
                                   int type_report, double value_report,
                                   std::span<const double> truthful_values);

/// Largest |payment| over truthful rounds at every profile.
double max_truthful_payment(const Scenario& scenario,
                            const MechanismTables& tables,
                            const MechanismConfig& mechanism);

double truncation_bound(const Scenario& scenario, double max_payment,
                        int horizon);

/// Smallest T with truncation_bound < target.
int default_horizon(const Scenario& scenario, double max_payment,
                    double target = 1e-3);

UtilityEstimate monte_carlo_utility(const Scenario& scenario,
                                    const MechanismTables& tables,
                                    const MechanismConfig& mechanism,
                                    const StrategyProfile& strategies,
                                    std::span<const int> initial, int agent,
                                    int horizon, std::size_t episodes,
                                    std::uint64_t seed);

}  // namespace matrix_mech
