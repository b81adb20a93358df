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

#include "matrix_mech/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace matrix_mech {

namespace {

struct Candidate {
  double value = -std::numeric_limits<double>::infinity();
  DeviationWitness witness;
  std::size_t cases = 0;
};

/// Deviation utility via the closed form where one exists, otherwise via the
/// evaluated round plus truthful continuation.
class DeviationEvaluator {
 public:
  DeviationEvaluator(const Scenario& scenario, const MechanismTables& tables,
                     const MechanismConfig& mechanism)
      : scenario_(scenario), tables_(tables), mechanism_(mechanism) {
    if (mechanism.kind == MechanismKind::kConst) {
      for (int i = 0; i < scenario.agents(); ++i) {
        continuation_.push_back(
            truthful_value_function(scenario, tables, mechanism, i));
      }
    }
  }

  double operator()(std::span<const int> profile, int agent, int type_report,
                    double value_report) const {
    if (mechanism_.kind == MechanismKind::kConst) {
      return evaluated_deviation_utility(scenario_, tables_, mechanism_,
                                         profile, agent, type_report,
                                         value_report, continuation_[agent]);
    }
    return exact_deviation_utility(scenario_, tables_, profile, agent,
                                   type_report, value_report, mechanism_);
  }

 private:
  const Scenario& scenario_;
  const MechanismTables& tables_;
  MechanismConfig mechanism_;
  std::vector<std::vector<double>> continuation_;
};

std::string property_name(const char* base, const MechanismConfig& m) {
  std::string out = base;
  if (m.kind != MechanismKind::kMatrix) {
    out += "[" + std::string(to_string(m.kind)) + "]";
  } else if (m.ablate_penalty) {
    out += "[matrix-ablated]";
  }
  return out;
}

}  // namespace

std::string DeviationWitness::describe(const Scenario& scenario) const {
  std::ostringstream os;
  os.precision(17);
  os << "state=" << scenario.types().format(profile) << ";agent=" << agent
     << ";type_report=" << scenario.types().label(agent, type_report)
     << ";value_report=" << value_report;
  return os.str();
}

std::vector<double> report_grid_offsets(const Scenario& scenario, int steps) {
  if (steps < 1) throw std::invalid_argument("grid steps must be >= 1");
  const double step = std::max(1.0, scenario.bound()) / steps;
  std::vector<double> out;
  for (int k = -steps; k <= steps; ++k) out.push_back(k * step);
  return out;
}

ViolationReport check_epic(const Scenario& scenario,
                           const MechanismTables& tables,
                           const CheckOptions& options) {
  const auto states = enumerate_states(scenario);
  const int n = scenario.agents();
  const bool two_stage = options.mechanism.kind == MechanismKind::kMatrix;
  const auto offsets = two_stage ? report_grid_offsets(scenario,
                                                       options.grid_steps)
                                 : std::vector<double>{0.0};
  const DeviationEvaluator evaluate(scenario, tables, options.mechanism);

  std::vector<Candidate> per_state(states.size());
  const auto count = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    const auto& profile = states[static_cast<std::size_t>(s)];
    Candidate& best = per_state[static_cast<std::size_t>(s)];
    Profile reported = profile;
    for (int i = 0; i < n; ++i) {
      const Allocation truthful_alloc = allocate(scenario, tables, profile);
      const double truthful = evaluate(
          profile, i, profile[i],
          consistent_value(scenario, i, truthful_alloc, profile));
      for (int report = 0; report < scenario.types().size(i); ++report) {
        reported[i] = report;
        const double consistent = consistent_value(
            scenario, i, allocate(scenario, tables, reported), reported);
        for (double offset : offsets) {
          const double value_report = consistent + offset;
          const double gain =
              evaluate(profile, i, report, value_report) - truthful;
          ++best.cases;
          if (gain > best.value) {
            best.value = gain;
            best.witness = {profile, i, report, value_report, gain};
          }
        }
      }
      reported[i] = profile[i];
    }
  }

  ViolationReport report;
  report.property = property_name("epic", options.mechanism);
  report.tolerance = options.tol;
  Candidate overall;
  for (const auto& c : per_state) {
    report.cases += c.cases;
    if (c.value > overall.value) overall = c;
  }
  report.worst_value = overall.value;
  report.witness = overall.witness;
  report.pass = overall.value <= options.tol;
  return report;
}

std::vector<StageTwoGap> stage_two_gaps(const Scenario& scenario,
                                        const MechanismTables& tables,
                                        const CheckOptions& options) {
  const auto states = enumerate_states(scenario);
  const int n = scenario.agents();
  const auto offsets = report_grid_offsets(scenario, options.grid_steps);
  const DeviationEvaluator evaluate(scenario, tables, options.mechanism);

  std::vector<std::vector<StageTwoGap>> per_state(states.size());
  const auto count = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < count; ++s) {
    const auto& profile = states[static_cast<std::size_t>(s)];
    const Allocation a = allocate(scenario, tables, profile);
    for (int i = 0; i < n; ++i) {
      const double truth = scenario.valuation(i, a, profile);
      const double truthful = evaluate(profile, i, profile[i], truth);
      for (double offset : offsets) {
        if (offset == 0.0) continue;
        const double report = truth + offset;
        per_state[static_cast<std::size_t>(s)].push_back(
            {static_cast<std::size_t>(s), i, report,
             truthful - evaluate(profile, i, profile[i], report),
             scenario.penalty()(report, truth)});
      }
    }
  }
  std::vector<StageTwoGap> out;
  for (auto& v : per_state) out.insert(out.end(), v.begin(), v.end());
  return out;
}

ViolationReport check_strict_stage2(const Scenario& scenario,
                                    const MechanismTables& tables,
                                    const CheckOptions& options) {
  const auto gaps = stage_two_gaps(scenario, tables, options);
  const auto states = enumerate_states(scenario);
  ViolationReport report;
  report.property = property_name("strict_stage2", options.mechanism);
  report.tolerance = options.tol;
  report.cases = gaps.size();
  report.worst_value = 0.0;
  const StageTwoGap* worst = nullptr;
  for (const auto& g : gaps) {
    const double mismatch =
        g.penalty > 0.0 ? std::abs(g.gap - g.penalty) / g.penalty
                        : std::abs(g.gap - g.penalty);
    const bool ok = mismatch <= options.tol && g.gap > 0.0;
    // A non-positive gap is reported as at least a full mismatch.
    const double score = ok ? mismatch : std::max(mismatch, 1.0);
    if (!ok) report.pass = false;
    if (!worst || score > report.worst_value) {
      report.worst_value = score;
      worst = &g;
    }
  }
  if (worst) {
    const auto& profile = states[worst->state];
    report.witness = DeviationWitness{profile, worst->agent,
                                      profile[worst->agent], worst->report,
                                      worst->gap};
  }
  return report;
}

ViolationReport check_epir(const Scenario& scenario,
                           const MechanismTables& tables, double tol) {
  ViolationReport report;
  report.property = "epir";
  report.tolerance = tol;
  report.worst_value = std::numeric_limits<double>::infinity();
  for (const auto& profile : enumerate_states(scenario)) {
    for (int i = 0; i < scenario.agents(); ++i) {
      const double u = exact_truthful_utility(scenario, tables, profile, i);
      ++report.cases;
      if (u < report.worst_value) {
        report.worst_value = u;
        report.witness = DeviationWitness{profile, i, profile[i], 0.0, u};
      }
    }
  }
  report.pass = report.worst_value >= -tol;
  return report;
}

ViolationReport check_epir(const Scenario& scenario,
                           const MechanismTables& tables,
                           const MechanismConfig& mechanism, double tol) {
  if (mechanism.kind == MechanismKind::kMatrix) {
    return check_epir(scenario, tables, tol);
  }
  ViolationReport report;
  report.property = property_name("epir", mechanism);
  report.tolerance = tol;
  report.worst_value = std::numeric_limits<double>::infinity();
  const auto states = enumerate_states(scenario);
  for (int i = 0; i < scenario.agents(); ++i) {
    const auto values = truthful_value_function(scenario, tables, mechanism, i);
    for (std::size_t s = 0; s < states.size(); ++s) {
      ++report.cases;
      if (values[s] < report.worst_value) {
        report.worst_value = values[s];
        report.witness =
            DeviationWitness{states[s], i, states[s][i], 0.0, values[s]};
      }
    }
  }
  report.pass = report.worst_value >= -tol;
  return report;
}

ViolationReport check_efficiency(const Scenario& scenario,
                                 const MechanismTables& tables, double tol) {
  const double delta = scenario.discount();
  const double scale = scenario.agents() * scenario.bound() / (1.0 - delta);
  int horizon = 0;
  if (scale > 0.0) {
    horizon = static_cast<int>(
        std::ceil(std::log(0.5 * tol / scale) / std::log(delta)));
    horizon = std::max(horizon, 0);
  }
  const double tail = std::pow(delta, horizon) * scale;
  const auto oracle = truncated_welfare_oracle(scenario, horizon);

  // Welfare of the solver's policy, by plain policy evaluation.
  const auto states = enumerate_states(scenario);
  std::vector<double> reward(states.size());
  std::vector<std::vector<double>> dist(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const Allocation a = tables.policy.allocation[s];
    reward[s] = stage_welfare(scenario, a, states[s]);
    dist[s] = joint_transition(scenario, states[s], a);
  }
  const double threshold = 1e-3 * tol * (1.0 - delta) / (2.0 * delta);
  std::vector<double> value(states.size(), 0.0);
  std::vector<double> next(states.size(), 0.0);
  for (double diff = std::numeric_limits<double>::infinity();
       diff > threshold;) {
    diff = 0.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
      double ev = 0.0;
      for (std::size_t t = 0; t < states.size(); ++t) {
        ev += dist[s][t] * value[t];
      }
      next[s] = reward[s] + delta * ev;
      diff = std::max(diff, std::abs(next[s] - value[s]));
    }
    value.swap(next);
  }

  ViolationReport report;
  report.property = "efficiency";
  report.tolerance = tol + tail;
  report.cases = states.size();
  report.worst_value = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < states.size(); ++s) {
    const double shortfall = oracle[s] - value[s];
    if (shortfall > report.worst_value) {
      report.worst_value = shortfall;
      report.witness = DeviationWitness{states[s], 0, states[s][0], 0.0,
                                        shortfall};
    }
  }
  report.pass = report.worst_value <= report.tolerance;
  return report;
}

std::optional<DpmCounterexample> find_dpm_counterexample(
    const DpmSearchConfig& config) {
  for (std::size_t k = 0; k < config.instances; ++k) {
    Scenario scenario = random_scenario(
        episode_seed(config.seed, static_cast<std::uint64_t>(k)),
        config.generator);
    MechanismTables tables = solve_tables(scenario, config.solver);
    CheckOptions dpm_options;
    dpm_options.mechanism.kind = MechanismKind::kDpm;
    dpm_options.tol = config.dpm_threshold;
    const auto dpm = check_epic(scenario, tables, dpm_options);
    if (dpm.pass) continue;
    CheckOptions matrix_options;
    matrix_options.tol = config.matrix_tol;
    const auto matrix = check_epic(scenario, tables, matrix_options);
    if (!matrix.pass) continue;
    return DpmCounterexample{k, std::move(scenario), std::move(tables),
                             *dpm.witness, matrix.worst_value};
  }
  return std::nullopt;
}

BudgetSummary budget_metrics(const Trajectory& trajectory) {
  BudgetSummary out;
  for (const auto& round : trajectory.rounds) {
    out.round_sums.push_back(round.budget);
    if (round.budget > 0.0) out.deficit_rounds.push_back(round.t);
  }
  if (!out.round_sums.empty()) {
    out.min = *std::min_element(out.round_sums.begin(), out.round_sums.end());
    out.max = *std::max_element(out.round_sums.begin(), out.round_sums.end());
    double sum = 0.0;
    for (double x : out.round_sums) sum += x;
    out.mean = sum / static_cast<double>(out.round_sums.size());
  }
  return out;
}

}  // namespace matrix_mech
