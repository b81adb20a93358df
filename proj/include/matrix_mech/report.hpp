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

#include <iosfwd>
#include <string>
#include <vector>

#include "matrix_mech/scenario.hpp"
#include "matrix_mech/simulator.hpp"
#include "matrix_mech/verifier.hpp"
#include "matrix_mech/welfare.hpp"

// CSV writers and readers. Reals are printed with 17 significant digits so a
// re-read reproduces the in-memory value exactly.

namespace matrix_mech {

std::string format_real(double value);

/// Header `state,value,allocation`; state is the space-separated label tuple.
void write_welfare_csv(std::ostream& os, const Scenario& scenario,
                       const WelfareTable& welfare, const PolicyTable& policy);

/// Header `state,value` over theta_{-i}.
void write_marginal_csv(std::ostream& os, const Scenario& scenario,
                        const MarginalWelfareTable& marginal);

struct WelfareCsv {
  std::vector<double> values;
  std::vector<Allocation> allocations;
};

/// Reads a file written by write_welfare_csv. Rows may come in any order.
WelfareCsv read_welfare_csv(std::istream& is, const Scenario& scenario);
/// Reads a file written by write_marginal_csv for `agent`.
std::vector<double> read_marginal_csv(std::istream& is,
                                      const Scenario& scenario, int agent);

/// Header `table,iterations,residual,error_bound`.
void write_solve_summary(std::ostream& os, const MechanismTables& tables);

void write_trajectory_header(std::ostream& os);
void write_trajectory_rows(std::ostream& os, const Scenario& scenario,
                           const Trajectory& trajectory);

void write_utility_header(std::ostream& os);
void write_utility_row(std::ostream& os, const std::string& scenario_id,
                       MechanismKind mechanism, int agent,
                       const std::string& state, double exact,
                       const UtilityEstimate& estimate);

void write_verdict_header(std::ostream& os);
void write_verdict_row(std::ostream& os, const std::string& scenario_id,
                       const Scenario& scenario, const ViolationReport& report);

void write_budget_header(std::ostream& os);
void write_budget_row(std::ostream& os, const std::string& scenario_id,
                      MechanismKind mechanism, const BudgetSummary& summary);

}  // namespace matrix_mech
