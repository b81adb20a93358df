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

#include "matrix_mech/mechanism.hpp"

#include <cmath>

namespace matrix_mech {

std::string_view to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kDpm:
      return "dpm";
    case MechanismKind::kConst:
      return "const";
    case MechanismKind::kMatrix:
      break;
  }
  return "matrix";
}

MechanismKind parse_mechanism(std::string_view text) {
  if (text == "matrix") return MechanismKind::kMatrix;
  if (text == "dpm") return MechanismKind::kDpm;
  if (text == "const") return MechanismKind::kConst;
  throw std::invalid_argument("unknown mechanism '" + std::string(text) + "'");
}

Allocation allocate(const Scenario& scenario, const MechanismTables& tables,
                    std::span<const int> type_reports) {
  return tables.allocation_at(scenario.types(), type_reports);
}

double consistent_value(const Scenario& scenario, int agent, Allocation a,
                        std::span<const int> type_reports) {
  return scenario.valuation(agent, a, type_reports);
}

namespace {

/// delta E[W_{-i} | a, theta_hat] - W_{-i}(theta_hat_{-i}).
double pivot_term(const Scenario& scenario, const MechanismTables& tables,
                  int agent, Allocation a, std::span<const int> type_reports) {
  const auto& marginal = tables.marginal[agent];
  return scenario.discount() *
             expected_marginal_welfare(scenario, marginal, type_reports, a) -
         marginal.at(scenario.types(), type_reports);
}

}  // namespace

std::vector<double> matrix_penalties(const Scenario& scenario,
                                     const MechanismTables& tables,
                                     std::span<const int> type_reports,
                                     std::span<const double> value_reports) {
  const Allocation a = allocate(scenario, tables, type_reports);
  std::vector<double> out(static_cast<std::size_t>(scenario.agents()));
  for (int i = 0; i < scenario.agents(); ++i) {
    out[i] = scenario.penalty()(value_reports[i],
                                consistent_value(scenario, i, a, type_reports));
  }
  return out;
}

std::vector<double> matrix_payment(const Scenario& scenario,
                                   const MechanismTables& tables,
                                   std::span<const int> type_reports,
                                   std::span<const double> value_reports,
                                   bool ablate_penalty) {
  const int n = scenario.agents();
  const Allocation a = allocate(scenario, tables, type_reports);
  const auto penalties =
      matrix_penalties(scenario, tables, type_reports, value_reports);

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double others = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) others += value_reports[j];
    }
    out[i] = others + pivot_term(scenario, tables, i, a, type_reports) -
             (ablate_penalty ? 0.0 : penalties[i]);
  }
  return out;
}

std::vector<double> dpm_payment(const Scenario& scenario,
                                const MechanismTables& tables,
                                std::span<const int> type_reports) {
  const int n = scenario.agents();
  const Allocation a = allocate(scenario, tables, type_reports);
  const auto implied = stage_values(scenario, a, type_reports);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double others = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) others += implied[j];
    }
    out[i] = others + pivot_term(scenario, tables, i, a, type_reports);
  }
  return out;
}

std::vector<double> const_payment(Allocation a, int agents, int owner,
                                  double price) {
  std::vector<double> out(static_cast<std::size_t>(agents), 0.0);
  int workers = 0;
  for (int m : a.members()) {
    if (m == owner) continue;
    out[m] = price;
    ++workers;
  }
  out[owner] = -price * workers;
  return out;
}

RoundOutcome run_round(const Scenario& scenario, const MechanismTables& tables,
                       const MechanismConfig& mechanism,
                       std::span<const int> true_profile,
                       std::span<const AgentStrategy> strategies, int t) {
  const int n = scenario.agents();
  auto strategy = [&](int i) -> const AgentStrategy* {
    return static_cast<std::size_t>(i) < strategies.size() ? &strategies[i]
                                                           : nullptr;
  };

  RoundOutcome out;
  out.t = t;
  out.true_profile.assign(true_profile.begin(), true_profile.end());

  // Stage one: type reports, then the allocation.
  out.reported_profile = out.true_profile;
  for (int i = 0; i < n; ++i) {
    const auto* s = strategy(i);
    if (!s || !s->report_type) continue;
    const int report = s->report_type(true_profile[i]);
    if (report < 0 || report >= scenario.types().size(i)) {
      throw StrategyDomainError("agent " + std::to_string(i) +
                                " reported type code " +
                                std::to_string(report) + " outside its space");
    }
    out.reported_profile[i] = report;
  }
  out.allocation = allocate(scenario, tables, out.reported_profile);

  // Valuations are realised at the true types of the selected agents.
  out.true_values = stage_values(scenario, out.allocation, true_profile);
  out.consistent_values =
      stage_values(scenario, out.allocation, out.reported_profile);

  // Stage two: each agent sees its own valuation and its own report only.
  out.reported_values = out.true_values;
  out.penalties.assign(static_cast<std::size_t>(n), 0.0);
  switch (mechanism.kind) {
    case MechanismKind::kMatrix: {
      for (int i = 0; i < n; ++i) {
        const auto* s = strategy(i);
        if (s && s->report_value) {
          out.reported_values[i] =
              s->report_value(out.true_values[i], out.reported_profile[i]);
        }
      }
      out.payments = matrix_payment(scenario, tables, out.reported_profile,
                                    out.reported_values,
                                    mechanism.ablate_penalty);
      if (!mechanism.ablate_penalty) {
        out.penalties = matrix_penalties(
            scenario, tables, out.reported_profile, out.reported_values);
      }
      break;
    }
    case MechanismKind::kDpm:
      out.payments = dpm_payment(scenario, tables, out.reported_profile);
      break;
    case MechanismKind::kConst:
      out.payments = const_payment(out.allocation, n, scenario.owner(),
                                   scenario.const_price());
      break;
  }

  out.utilities.resize(static_cast<std::size_t>(n));
  out.budget = 0.0;
  for (int i = 0; i < n; ++i) {
    out.utilities[i] = out.true_values[i] + out.payments[i];
    out.budget += out.payments[i];
  }
  return out;
}

}  // namespace matrix_mech
