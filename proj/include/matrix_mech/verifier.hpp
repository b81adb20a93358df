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
#include <string>
#include <vector>

#include "matrix_mech/mechanism.hpp"
#include "matrix_mech/random_scenario.hpp"
#include "matrix_mech/scenario.hpp"
#include "matrix_mech/simulator.hpp"
#include "matrix_mech/welfare.hpp"

namespace matrix_mech {

/// A single-agent, single-round deviation and what it earns relative to
/// truthful play.
struct DeviationWitness {
  Profile profile;
  int agent = 0;
  int type_report = 0;
  double value_report = 0.0;
  double value = 0.0;

  std::string describe(const Scenario& scenario) const;
};

struct ViolationReport {
  std::string property;
  std::size_t cases = 0;
  /// Property-specific: max deviation gain (EPIC), max relative gap mismatch
  /// (stage two), min truthful utility (EPIR), max welfare shortfall (EFF).
  double worst_value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::optional<DeviationWitness> witness;
};

struct CheckOptions {
  MechanismConfig mechanism;
  double tol = 1e-7;
  /// Off-best value reports are consistent + k * step for k in
  /// [-grid_steps, grid_steps], step = max(1, M) / grid_steps.
  int grid_steps = 5;
};

/// Offsets k * step, k = -steps..steps (k = 0 included).
std::vector<double> report_grid_offsets(const Scenario& scenario, int steps);

/// Max over (theta, i, theta_hat_i, vhat_i) of deviation minus truthful
/// utility. Passes iff the max is <= tol.
ViolationReport check_epic(const Scenario& scenario,
                           const MechanismTables& tables,
                           const CheckOptions& options = {});

struct StageTwoGap {
  std::size_t state = 0;
  int agent = 0;
  double report = 0.0;
  /// Truthful utility minus utility after misreporting the value.
  double gap = 0.0;
  /// g(report, true value).
  double penalty = 0.0;
};

/// Gaps for every off-diagonal grid value report with truthful stage one.
std::vector<StageTwoGap> stage_two_gaps(const Scenario& scenario,
                                        const MechanismTables& tables,
                                        const CheckOptions& options = {});

/// Every gap must equal g(vhat, v) within `tol` relative and be positive.
/// Default tolerance 1e-9.
ViolationReport check_strict_stage2(const Scenario& scenario,
                                    const MechanismTables& tables,
                                    const CheckOptions& options = {
                                        .mechanism = {},
                                        .tol = 1e-9,
                                        .grid_steps = 5});

/// min over (theta, i) of W(theta) - W_{-i}(theta_{-i}) must be >= -tol.
ViolationReport check_epir(const Scenario& scenario,
                           const MechanismTables& tables, double tol = 1e-7);

/// Mechanism-generic variant: truthful utilities come from policy evaluation
/// for the baselines and from W - W_{-i} for MATRIX.
ViolationReport check_epir(const Scenario& scenario,
                           const MechanismTables& tables,
                           const MechanismConfig& mechanism,
                           double tol = 1e-7);

/// Welfare of the solver policy against the truncated oracle, with a horizon
/// whose tail is below tol.
ViolationReport check_efficiency(const Scenario& scenario,
                                 const MechanismTables& tables,
                                 double tol = 1e-7);

struct DpmSearchConfig {
  std::uint64_t seed = 7;
  std::size_t instances = 1000;
  RandomScenarioConfig generator{2, 3, 2, 2, false, 0.3, 0.9};
  double dpm_threshold = 1e-6;
  double matrix_tol = 1e-7;
  SolverOptions solver;
};

struct DpmCounterexample {
  std::size_t instance = 0;
  Scenario scenario;
  MechanismTables tables;
  /// Best DPM deviation on this instance.
  DeviationWitness dpm;
  double matrix_worst_gain = 0.0;
};

/// First generated instance where the pivot baseline admits a profitable
/// deviation (gain > dpm_threshold) while MATRIX does not (gain <=
/// matrix_tol). std::nullopt when the instance budget runs out.
std::optional<DpmCounterexample> find_dpm_counterexample(
    const DpmSearchConfig& config = {});

class SearchBudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BudgetSummary {
  std::vector<double> round_sums;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  /// Rounds where the designer pays out more than it collects.
  std::vector<int> deficit_rounds;
};

BudgetSummary budget_metrics(const Trajectory& trajectory);

}  // namespace matrix_mech
