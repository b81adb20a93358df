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

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matrix_mech/allocation.hpp"
#include "matrix_mech/scenario.hpp"
#include "matrix_mech/welfare.hpp"

namespace matrix_mech {

enum class MechanismKind { kMatrix, kDpm, kConst };

std::string_view to_string(MechanismKind kind);
/// "matrix", "dpm" or "const". Throws std::invalid_argument.
MechanismKind parse_mechanism(std::string_view text);

struct MechanismConfig {
  MechanismKind kind = MechanismKind::kMatrix;
  /// MATRIX only: drop the consistency penalty from the payment.
  bool ablate_penalty = false;
};

class StrategyDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Behaviour of one agent in one round. An empty function means truthful.
///
/// The stage-two map sees only the agent's realised valuation and its own
/// stage-one report; reports of other agents are never passed in.
struct AgentStrategy {
  std::function<int(int true_type)> report_type;
  std::function<double(double true_value, int own_report)> report_value;

  bool truthful() const { return !report_type && !report_value; }
};

struct RoundOutcome {
  int t = 0;
  Profile true_profile;
  Profile reported_profile;
  Allocation allocation;
  std::vector<double> true_values;
  std::vector<double> reported_values;
  /// v_i(a, reported profile): the stage-two report that draws no penalty.
  std::vector<double> consistent_values;
  std::vector<double> payments;
  std::vector<double> penalties;
  /// true value + payment.
  std::vector<double> utilities;
  double budget = 0.0;
};

/// Efficient allocation at the reported profile.
Allocation allocate(const Scenario& scenario, const MechanismTables& tables,
                    std::span<const int> type_reports);

/// v_i(a, theta_hat_a); zero when i is not in a.
double consistent_value(const Scenario& scenario, int agent, Allocation a,
                        std::span<const int> type_reports);

/// MATRIX transfers:
///   p_i = sum_{j != i} vhat_j + delta E[W_{-i}(theta'_{-i}) | a*, theta_hat]
///         - W_{-i}(theta_hat_{-i}) - g(vhat_i, consistent_i).
std::vector<double> matrix_payment(const Scenario& scenario,
                                   const MechanismTables& tables,
                                   std::span<const int> type_reports,
                                   std::span<const double> value_reports,
                                   bool ablate_penalty = false);

/// Per-agent penalty term of matrix_payment.
std::vector<double> matrix_penalties(const Scenario& scenario,
                                     const MechanismTables& tables,
                                     std::span<const int> type_reports,
                                     std::span<const double> value_reports);

/// Single-stage pivot payment: as MATRIX, with the value reports of others
/// replaced by their valuations at the reported types and no penalty.
std::vector<double> dpm_payment(const Scenario& scenario,
                                const MechanismTables& tables,
                                std::span<const int> type_reports);

/// Fixed-price baseline: each selected worker receives `price`, the owner
/// pays price per selected worker. Sums to zero.
std::vector<double> const_payment(Allocation a, int agents, int owner,
                                  double price);

/// Runs one round of the chosen mechanism. Strategies may be empty or shorter
/// than the agent count; missing entries are truthful.
RoundOutcome run_round(const Scenario& scenario, const MechanismTables& tables,
                       const MechanismConfig& mechanism,
                       std::span<const int> true_profile,
                       std::span<const AgentStrategy> strategies, int t = 0);

inline RoundOutcome run_round_matrix(const Scenario& scenario,
                                     const MechanismTables& tables,
                                     std::span<const int> true_profile,
                                     std::span<const AgentStrategy> strategies,
                                     int t = 0) {
  return run_round(scenario, tables, MechanismConfig{}, true_profile,
                   strategies, t);
}

}  // namespace matrix_mech
