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

#include "matrix_mech/welfare.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

namespace matrix_mech {

namespace {

// Below this many states the OpenMP fork/join costs more than the sweep.
constexpr std::size_t kParallelThreshold = 2048;

/// The economy restricted to every agent except `excluded` (or all agents).
struct Subsystem {
  std::vector<int> agents;
  std::vector<std::size_t> widths;
  std::vector<std::size_t> strides;
  std::vector<Allocation> allocations;
  std::size_t states = 1;
  int excluded = -1;
};

Subsystem make_subsystem(const Scenario& scenario, int excluded) {
  Subsystem sub;
  sub.excluded = excluded;
  const int n = scenario.agents();
  for (int i = 0; i < n; ++i) {
    if (i == excluded) continue;
    sub.agents.push_back(i);
    sub.widths.push_back(static_cast<std::size_t>(scenario.types().size(i)));
  }
  sub.strides.assign(sub.agents.size(), 1);
  for (std::size_t k = sub.agents.size(); k-- > 0;) {
    sub.strides[k] = sub.states;
    sub.states *= sub.widths[k];
  }
  sub.allocations = excluded < 0 ? enumerate_allocations(n)
                                 : enumerate_allocations(n, excluded);
  return sub;
}

/// Full profile for a sub-state; the excluded agent gets type 0, which no
/// valuation or kernel consulted here depends on.
void sub_profile(const Subsystem& sub, std::size_t s, std::span<int> profile) {
  std::fill(profile.begin(), profile.end(), 0);
  for (std::size_t k = 0; k < sub.agents.size(); ++k) {
    profile[sub.agents[k]] = static_cast<int>(s / sub.strides[k]);
    s %= sub.strides[k];
  }
}

std::vector<std::vector<double>> stage_rewards(const Scenario& scenario,
                                               const Subsystem& sub) {
  std::vector<std::vector<double>> rewards(sub.allocations.size(),
                                           std::vector<double>(sub.states));
  const auto n = static_cast<std::size_t>(scenario.agents());
  const auto count = static_cast<std::ptrdiff_t>(sub.states);
#pragma omp parallel if (sub.states >= kParallelThreshold)
  {
    Profile profile(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      sub_profile(sub, static_cast<std::size_t>(s), profile);
      for (std::size_t k = 0; k < sub.allocations.size(); ++k) {
        rewards[k][static_cast<std::size_t>(s)] =
            stage_welfare(scenario, sub.allocations[k], profile);
      }
    }
  }
  return rewards;
}

/// out[.., j, ..] = sum_m kernel[j][m] * in[.., m, ..] along one mode.
void apply_mode(std::span<const double> in, std::span<double> out,
                std::span<const double> kernel, std::size_t width,
                std::size_t stride) {
  const std::size_t block = width * stride;
  const auto outer = static_cast<std::ptrdiff_t>(in.size() / block);
  const auto inner = static_cast<std::ptrdiff_t>(stride);
#pragma omp parallel for collapse(2) schedule(static) \
    if (in.size() >= kParallelThreshold)
  for (std::ptrdiff_t l = 0; l < outer; ++l) {
    for (std::ptrdiff_t r = 0; r < inner; ++r) {
      const std::size_t base = static_cast<std::size_t>(l) * block +
                               static_cast<std::size_t>(r);
      for (std::size_t j = 0; j < width; ++j) {
        const double* row = kernel.data() + j * width;
        double acc = 0.0;
        for (std::size_t m = 0; m < width; ++m) {
          acc += row[m] * in[base + m * stride];
        }
        out[base + j * stride] = acc;
      }
    }
  }
}

/// E_{theta'|a,theta}[w(theta')] for every sub-state theta at once.
void expectation_all(const Scenario& scenario, const Subsystem& sub,
                     Allocation a, std::span<const double> w,
                     std::vector<double>& out, std::vector<double>& scratch) {
  out.assign(w.begin(), w.end());
  scratch.resize(w.size());
  for (std::size_t k = 0; k < sub.agents.size(); ++k) {
    apply_mode(out, scratch, scenario.transition_kernel(sub.agents[k], a),
               sub.widths[k], sub.strides[k]);
    out.swap(scratch);
  }
}

/// Distribution over next sub-states from sub-state `s` under `a`.
std::vector<double> sub_transition(const Scenario& scenario,
                                   const Subsystem& sub,
                                   std::span<const int> profile, Allocation a) {
  std::vector<double> dist{1.0};
  for (int agent : sub.agents) {
    const auto row = scenario.transition_row(agent, a, profile[agent]);
    std::vector<double> next;
    next.reserve(dist.size() * row.size());
    for (double p : dist) {
      for (double q : row) next.push_back(p * q);
    }
    dist = std::move(next);
  }
  return dist;
}

struct SolveResult {
  std::vector<double> values;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> diffs;
  double wall_seconds = 0.0;
};

double stopping_threshold(double tol, double delta) {
  return tol * (1.0 - delta) / (2.0 * delta);
}

void check_options(const SolverOptions& options) {
  if (!(options.tol > 0.0)) {
    throw std::invalid_argument("solver tolerance must be positive");
  }
}

/// T(w) with the Kronecker kernel; writes into `next`.
void sweep_parallel(const Scenario& scenario, const Subsystem& sub,
                    const std::vector<std::vector<double>>& rewards,
                    std::span<const double> w, std::vector<double>& next,
                    std::vector<double>& ew, std::vector<double>& scratch) {
  const double delta = scenario.discount();
  const auto count = static_cast<std::ptrdiff_t>(sub.states);
  next.resize(sub.states);
  for (std::size_t k = 0; k < sub.allocations.size(); ++k) {
    expectation_all(scenario, sub, sub.allocations[k], w, ew, scratch);
    const auto& reward = rewards[k];
#pragma omp parallel for schedule(static) if (sub.states >= kParallelThreshold)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      const double q = reward[s] + delta * ew[s];
      if (k == 0 || q > next[s]) next[s] = q;
    }
  }
}

/// T(w) by enumerating next profiles for every (state, allocation).
void sweep_serial(const Scenario& scenario, const Subsystem& sub,
                  std::span<const double> w, std::vector<double>& next) {
  const double delta = scenario.discount();
  Profile profile(static_cast<std::size_t>(scenario.agents()));
  next.resize(sub.states);
  for (std::size_t s = 0; s < sub.states; ++s) {
    sub_profile(sub, s, profile);
    double best = 0.0;
    for (std::size_t k = 0; k < sub.allocations.size(); ++k) {
      const Allocation a = sub.allocations[k];
      const auto dist = sub_transition(scenario, sub, profile, a);
      double ew = 0.0;
      for (std::size_t t = 0; t < sub.states; ++t) ew += dist[t] * w[t];
      const double q = stage_welfare(scenario, a, profile) + delta * ew;
      if (k == 0 || q > best) best = q;
    }
    next[s] = best;
  }
}

template <typename Sweep>
SolveResult iterate(const Scenario& scenario, const Subsystem& sub,
                    const SolverOptions& options, Sweep&& sweep) {
  check_options(options);
  const auto start = std::chrono::steady_clock::now();
  const double threshold =
      stopping_threshold(options.tol, scenario.discount());
  const auto count = static_cast<std::ptrdiff_t>(sub.states);
  const bool parallel = sub.states >= kParallelThreshold;

  SolveResult result;
  std::vector<double> w(sub.states, 0.0);
  std::vector<double> next(sub.states, 0.0);
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    sweep(w, next);
    double diff = 0.0;
#pragma omp parallel for schedule(static) reduction(max : diff) if (parallel)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      diff = std::max(diff, std::abs(next[s] - w[s]));
    }
    w.swap(next);
    result.iterations = it;
    result.residual = diff;
    if (options.record_diffs) result.diffs.push_back(diff);
    if (diff <= threshold) {
      result.values = std::move(w);
      result.wall_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
      return result;
    }
  }
  throw NonConvergence(options.max_iterations, result.residual);
}

SolveResult solve_parallel(const Scenario& scenario, const Subsystem& sub,
                           const SolverOptions& options) {
  const auto rewards = stage_rewards(scenario, sub);
  std::vector<double> ew;
  std::vector<double> scratch;
  return iterate(scenario, sub, options,
                 [&](const std::vector<double>& w, std::vector<double>& next) {
                   sweep_parallel(scenario, sub, rewards, w, next, ew, scratch);
                 });
}

SolveResult solve_serial(const Scenario& scenario, const Subsystem& sub,
                         const SolverOptions& options) {
  return iterate(scenario, sub, options,
                 [&](const std::vector<double>& w, std::vector<double>& next) {
                   sweep_serial(scenario, sub, w, next);
                 });
}

WelfareTable to_welfare(SolveResult r, double delta) {
  WelfareTable t;
  t.values = std::move(r.values);
  t.residual = r.residual;
  t.error_bound = delta / (1.0 - delta) * r.residual;
  t.iterations = r.iterations;
  t.diffs = std::move(r.diffs);
  t.wall_seconds = r.wall_seconds;
  return t;
}

MarginalWelfareTable to_marginal(SolveResult r, int agent, double delta) {
  MarginalWelfareTable t;
  t.agent = agent;
  t.values = std::move(r.values);
  t.residual = r.residual;
  t.error_bound = delta / (1.0 - delta) * r.residual;
  t.iterations = r.iterations;
  t.diffs = std::move(r.diffs);
  t.wall_seconds = r.wall_seconds;
  return t;
}

void check_agent(const Scenario& scenario, int agent) {
  if (agent < 0 || agent >= scenario.agents()) {
    throw std::invalid_argument("agent index out of range");
  }
}

double tie_slack(double best) {
  return kTieTolerance * std::max(1.0, std::abs(best));
}

}  // namespace

WelfareTable solve_welfare(const Scenario& scenario,
                           const SolverOptions& options) {
  return to_welfare(solve_parallel(scenario, make_subsystem(scenario, -1),
                                   options),
                    scenario.discount());
}

MarginalWelfareTable solve_marginal_welfare(const Scenario& scenario,
                                            int agent,
                                            const SolverOptions& options) {
  check_agent(scenario, agent);
  return to_marginal(
      solve_parallel(scenario, make_subsystem(scenario, agent), options), agent,
      scenario.discount());
}

WelfareTable solve_welfare_reference(const Scenario& scenario,
                                     const SolverOptions& options) {
  return to_welfare(
      solve_serial(scenario, make_subsystem(scenario, -1), options),
      scenario.discount());
}

MarginalWelfareTable solve_marginal_welfare_reference(
    const Scenario& scenario, int agent, const SolverOptions& options) {
  check_agent(scenario, agent);
  return to_marginal(
      solve_serial(scenario, make_subsystem(scenario, agent), options), agent,
      scenario.discount());
}

std::vector<double> bellman_sweep(const Scenario& scenario,
                                  std::span<const double> w) {
  const auto sub = make_subsystem(scenario, -1);
  const auto rewards = stage_rewards(scenario, sub);
  std::vector<double> next;
  std::vector<double> ew;
  std::vector<double> scratch;
  sweep_parallel(scenario, sub, rewards, w, next, ew, scratch);
  return next;
}

std::vector<double> bellman_sweep_reference(const Scenario& scenario,
                                            std::span<const double> w) {
  std::vector<double> next;
  sweep_serial(scenario, make_subsystem(scenario, -1), w, next);
  return next;
}

double expected_welfare(const Scenario& scenario, std::span<const double> w,
                        std::span<const int> profile, Allocation a) {
  const auto dist = joint_transition(scenario, profile, a);
  double sum = 0.0;
  for (std::size_t t = 0; t < dist.size(); ++t) sum += dist[t] * w[t];
  return sum;
}

double expected_marginal_welfare(const Scenario& scenario,
                                 const MarginalWelfareTable& marginal,
                                 std::span<const int> profile, Allocation a) {
  const auto sub = make_subsystem(scenario, marginal.agent);
  const auto dist = sub_transition(scenario, sub, profile, a);
  double sum = 0.0;
  for (std::size_t t = 0; t < dist.size(); ++t) {
    sum += dist[t] * marginal.values[t];
  }
  return sum;
}

double bellman_value(const Scenario& scenario, std::span<const double> w,
                     std::span<const int> profile, Allocation a) {
  return stage_welfare(scenario, a, profile) +
         scenario.discount() * expected_welfare(scenario, w, profile, a);
}

Allocation efficient_allocation(const Scenario& scenario,
                                const WelfareTable& welfare,
                                std::span<const int> profile) {
  const auto allocations = enumerate_allocations(scenario.agents());
  std::vector<double> q;
  q.reserve(allocations.size());
  for (const Allocation a : allocations) {
    q.push_back(bellman_value(scenario, welfare.values, profile, a));
  }
  const double best = *std::max_element(q.begin(), q.end());
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] >= best - tie_slack(best)) return allocations[k];
  }
  return allocations.front();
}

PolicyTable efficient_policy(const Scenario& scenario,
                             const WelfareTable& welfare) {
  const auto sub = make_subsystem(scenario, -1);
  const auto rewards = stage_rewards(scenario, sub);
  const double delta = scenario.discount();
  const auto count = static_cast<std::ptrdiff_t>(sub.states);
  const bool parallel = sub.states >= kParallelThreshold;

  // Two passes over the allocations: the maximum, then the first allocation
  // within the tie slack. Avoids materialising the full Q matrix.
  std::vector<double> best(sub.states, 0.0);
  std::vector<double> ew;
  std::vector<double> scratch;
  for (std::size_t k = 0; k < sub.allocations.size(); ++k) {
    expectation_all(scenario, sub, sub.allocations[k], welfare.values, ew,
                    scratch);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      const double q = rewards[k][s] + delta * ew[s];
      if (k == 0 || q > best[s]) best[s] = q;
    }
  }
  PolicyTable policy;
  policy.allocation.assign(sub.states, Allocation());
  policy.ties.assign(sub.states, 0);
  for (std::size_t k = 0; k < sub.allocations.size(); ++k) {
    expectation_all(scenario, sub, sub.allocations[k], welfare.values, ew,
                    scratch);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      const double q = rewards[k][s] + delta * ew[s];
      if (q >= best[s] - tie_slack(best[s])) {
        if (policy.ties[s]++ == 0) policy.allocation[s] = sub.allocations[k];
      }
    }
  }
  return policy;
}

std::vector<double> truncated_welfare_oracle(const Scenario& scenario,
                                             int horizon) {
  if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
  const auto states = enumerate_states(scenario);
  const auto allocations = enumerate_allocations(scenario.agents());
  const double delta = scenario.discount();
  std::vector<double> w(states.size(), 0.0);
  std::vector<double> next(states.size(), 0.0);
  for (int k = 0; k < horizon; ++k) {
    for (std::size_t s = 0; s < states.size(); ++s) {
      double best = 0.0;
      bool first = true;
      for (const Allocation a : allocations) {
        const auto dist = joint_transition(scenario, states[s], a);
        double ew = 0.0;
        for (std::size_t t = 0; t < dist.size(); ++t) ew += dist[t] * w[t];
        const double q = stage_welfare(scenario, a, states[s]) + delta * ew;
        if (first || q > best) best = q;
        first = false;
      }
      next[s] = best;
    }
    w.swap(next);
  }
  return w;
}

MechanismTables solve_tables(const Scenario& scenario,
                             const SolverOptions& options) {
  MechanismTables tables;
  tables.tol = options.tol;
  tables.welfare = solve_welfare(scenario, options);
  tables.policy = efficient_policy(scenario, tables.welfare);
  for (int i = 0; i < scenario.agents(); ++i) {
    tables.marginal.push_back(solve_marginal_welfare(scenario, i, options));
  }
  return tables;
}

}  // namespace matrix_mech
