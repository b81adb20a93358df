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

#include "matrix_mech/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace matrix_mech {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_row(std::span<const double> row, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] <= 0.0) continue;
    cumulative += row[k];
    last_positive = static_cast<int>(k);
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

}  // namespace

StrategyProfile StrategyProfile::single_deviation(int agents, int agent,
                                                  int round,
                                                  AgentStrategy deviation) {
  StrategyProfile profile;
  profile.agents.resize(static_cast<std::size_t>(agents));
  profile.agents[agent] = std::move(deviation);
  profile.active_round = round;
  return profile;
}

std::uint64_t episode_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) ^ (index * 0xD1B54A32D192ED03ull + 1));
}

Trajectory simulate_episode(const Scenario& scenario,
                            const MechanismTables& tables,
                            const MechanismConfig& mechanism,
                            const StrategyProfile& strategies,
                            std::span<const int> initial, int horizon,
                            std::uint64_t seed) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const int n = scenario.agents();
  Trajectory tr;
  tr.initial.assign(initial.begin(), initial.end());
  tr.seed = seed;
  tr.discounted_utility.assign(static_cast<std::size_t>(n), 0.0);
  tr.rounds.reserve(static_cast<std::size_t>(horizon));

  std::mt19937_64 rng(seed);
  Profile profile = tr.initial;
  double weight = 1.0;
  for (int t = 0; t < horizon; ++t) {
    RoundOutcome round = run_round(scenario, tables, mechanism, profile,
                                   strategies.at(t), t);
    for (int i = 0; i < n; ++i) {
      tr.discounted_utility[i] += weight * round.utilities[i];
    }
    weight *= scenario.discount();
    // Types move under the allocation actually made, from the true types.
    for (int i = 0; i < n; ++i) {
      profile[i] = sample_row(
          scenario.transition_row(i, round.allocation, profile[i]),
          unit_uniform(rng));
    }
    tr.rounds.push_back(std::move(round));
  }
  return tr;
}

double exact_truthful_utility(const Scenario& scenario,
                              const MechanismTables& tables,
                              std::span<const int> profile, int agent) {
  const auto& types = scenario.types();
  return tables.welfare.values[types.encode(profile)] -
         tables.marginal[agent].at(types, profile);
}

double exact_deviation_utility(const Scenario& scenario,
                               const MechanismTables& tables,
                               std::span<const int> profile, int agent,
                               int type_report, double value_report,
                               const MechanismConfig& mechanism) {
  if (mechanism.kind == MechanismKind::kConst) {
    throw std::invalid_argument(
        "fixed-price baseline has no closed-form deviation utility");
  }
  const int n = scenario.agents();
  const auto& types = scenario.types();
  const double delta = scenario.discount();
  const auto& marginal = tables.marginal[agent];

  Profile reported(profile.begin(), profile.end());
  reported[agent] = type_report;
  const Allocation a = allocate(scenario, tables, reported);

  const double own = scenario.valuation(agent, a, profile);
  double others = 0.0;
  const bool pivot = mechanism.kind == MechanismKind::kDpm;
  for (int j = 0; j < n; ++j) {
    if (j == agent) continue;
    others += scenario.valuation(j, a, pivot ? std::span<const int>(reported)
                                             : profile);
  }
  double penalty = 0.0;
  if (!pivot && !mechanism.ablate_penalty) {
    penalty = scenario.penalty()(value_report,
                                 scenario.valuation(agent, a, reported));
  }
  const double continuation_reported =
      delta * expected_marginal_welfare(scenario, marginal, reported, a);
  const double future =
      delta * (expected_welfare(scenario, tables.welfare.values, profile, a) -
               expected_marginal_welfare(scenario, marginal, profile, a));
  return own + others + continuation_reported - marginal.at(types, profile) -
         penalty + future;
}

std::vector<double> truthful_value_function(const Scenario& scenario,
                                            const MechanismTables& tables,
                                            const MechanismConfig& mechanism,
                                            int agent, double tol) {
  const auto states = enumerate_states(scenario);
  const double delta = scenario.discount();
  std::vector<double> reward(states.size());
  std::vector<std::vector<double>> dist(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto round = run_round(scenario, tables, mechanism, states[s], {});
    reward[s] = round.utilities[agent];
    dist[s] = joint_transition(scenario, states[s], round.allocation);
  }
  const double threshold = tol * (1.0 - delta) / (2.0 * delta);
  std::vector<double> u(states.size(), 0.0);
  std::vector<double> next(states.size(), 0.0);
  for (std::size_t it = 0; it < 10'000'000; ++it) {
    double diff = 0.0;
    for (std::size_t s = 0; s < states.size(); ++s) {
      double eu = 0.0;
      for (std::size_t t = 0; t < states.size(); ++t) eu += dist[s][t] * u[t];
      next[s] = reward[s] + delta * eu;
      diff = std::max(diff, std::abs(next[s] - u[s]));
    }
    u.swap(next);
    if (diff <= threshold) return u;
  }
  throw NonConvergence(10'000'000, 0.0);
}

double evaluated_deviation_utility(const Scenario& scenario,
                                   const MechanismTables& tables,
                                   const MechanismConfig& mechanism,
                                   std::span<const int> profile, int agent,
                                   int type_report, double value_report,
                                   std::span<const double> truthful_values) {
  std::vector<AgentStrategy> strategies(
      static_cast<std::size_t>(scenario.agents()));
  strategies[agent].report_type = [type_report](int) { return type_report; };
  strategies[agent].report_value = [value_report](double, int) {
    return value_report;
  };
  const auto round =
      run_round(scenario, tables, mechanism, profile, strategies);
  return round.utilities[agent] +
         scenario.discount() * expected_welfare(scenario, truthful_values,
                                                profile, round.allocation);
}

double max_truthful_payment(const Scenario& scenario,
                            const MechanismTables& tables,
                            const MechanismConfig& mechanism) {
  double out = 0.0;
  for (const auto& profile : enumerate_states(scenario)) {
    const auto round = run_round(scenario, tables, mechanism, profile, {});
    for (double p : round.payments) out = std::max(out, std::abs(p));
  }
  return out;
}

double truncation_bound(const Scenario& scenario, double max_payment,
                        int horizon) {
  const double delta = scenario.discount();
  return std::pow(delta, horizon) *
         (scenario.agents() * scenario.bound() + max_payment) / (1.0 - delta);
}

int default_horizon(const Scenario& scenario, double max_payment,
                    double target) {
  int horizon = 1;
  while (truncation_bound(scenario, max_payment, horizon) >= target) {
    ++horizon;
    if (horizon > 1'000'000) {
      throw std::runtime_error("no horizon meets the truncation target");
    }
  }
  return horizon;
}

UtilityEstimate monte_carlo_utility(const Scenario& scenario,
                                    const MechanismTables& tables,
                                    const MechanismConfig& mechanism,
                                    const StrategyProfile& strategies,
                                    std::span<const int> initial, int agent,
                                    int horizon, std::size_t episodes,
                                    std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  std::vector<double> samples(episodes);
  const auto count = static_cast<std::ptrdiff_t>(episodes);
  // Episode k always uses stream episode_seed(seed, k), so the result does
  // not depend on the thread count.
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto tr = simulate_episode(
        scenario, tables, mechanism, strategies, initial, horizon,
        episode_seed(seed, static_cast<std::uint64_t>(k)));
    samples[static_cast<std::size_t>(k)] = tr.discounted_utility[agent];
  }

  UtilityEstimate est;
  est.episodes = episodes;
  est.horizon = horizon;
  est.truncation_bound = truncation_bound(
      scenario, max_truthful_payment(scenario, tables, mechanism), horizon);
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / static_cast<double>(episodes);
  if (episodes > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - est.mean) * (x - est.mean);
    est.standard_error = std::sqrt(ss / static_cast<double>(episodes - 1) /
                                   static_cast<double>(episodes));
  }
  return est;
}

}  // namespace matrix_mech
