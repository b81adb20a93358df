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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix_mech/allocation.hpp"
#include "matrix_mech/scenario.hpp"

namespace matrix_mech {

struct SolverOptions {
  /// Target sup-norm distance between the returned table and the fixed point.
  double tol = 1e-9;
  std::size_t max_iterations = 1'000'000;
  /// Keep the sup-norm change of every sweep in WelfareTable::diffs.
  bool record_diffs = false;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(std::size_t iterations, double last_diff)
      : std::runtime_error("value iteration hit the cap of " +
                           std::to_string(iterations) +
                           " sweeps; last change " + std::to_string(last_diff)),
        iterations_(iterations),
        last_diff_(last_diff) {}

  std::size_t iterations() const { return iterations_; }
  double last_diff() const { return last_diff_; }

 private:
  std::size_t iterations_;
  double last_diff_;
};

/// W over every joint profile (indexed like enumerate_states).
struct WelfareTable {
  std::vector<double> values;
  /// Sup-norm change of the final sweep.
  double residual = 0.0;
  /// delta / (1 - delta) * residual; bounds the distance to the fixed point.
  double error_bound = 0.0;
  std::size_t iterations = 0;
  std::vector<double> diffs;
  double wall_seconds = 0.0;
};

/// W_{-i} over the reduced profiles theta_{-i} (row-major over the remaining
/// agents, see TypeSpace::encode_without).
struct MarginalWelfareTable {
  int agent = 0;
  std::vector<double> values;
  double residual = 0.0;
  double error_bound = 0.0;
  std::size_t iterations = 0;
  std::vector<double> diffs;
  double wall_seconds = 0.0;

  double at(const TypeSpace& types, std::span<const int> profile) const {
    return values[types.encode_without(profile, agent)];
  }
};

struct PolicyTable {
  std::vector<Allocation> allocation;
  /// Number of allocations within the tie tolerance of the maximum, per state.
  std::vector<int> ties;
};

/// Everything MATRIX needs at run time: W, the efficient policy, and W_{-i}
/// for every agent.
struct MechanismTables {
  WelfareTable welfare;
  PolicyTable policy;
  std::vector<MarginalWelfareTable> marginal;
  double tol = 1e-9;

  Allocation allocation_at(const TypeSpace& types,
                           std::span<const int> profile) const {
    return policy.allocation[types.encode(profile)];
  }
};

/// Value iteration with synchronous sweeps. Expectations are applied as a
/// Kronecker product of the per-agent kernels, parallelised with OpenMP.
WelfareTable solve_welfare(const Scenario& scenario,
                           const SolverOptions& options = {});
MarginalWelfareTable solve_marginal_welfare(const Scenario& scenario,
                                            int agent,
                                            const SolverOptions& options = {});

/// Serial reference solvers: same iteration and stopping rule, but every
/// expectation is a plain enumeration over next profiles.
WelfareTable solve_welfare_reference(const Scenario& scenario,
                                     const SolverOptions& options = {});
MarginalWelfareTable solve_marginal_welfare_reference(
    const Scenario& scenario, int agent, const SolverOptions& options = {});

/// One synchronous Bellman update T(w) over the full joint space, using the
/// parallel kernel and the serial enumeration respectively.
std::vector<double> bellman_sweep(const Scenario& scenario,
                                  std::span<const double> w);
std::vector<double> bellman_sweep_reference(const Scenario& scenario,
                                            std::span<const double> w);

/// E_{theta' | a, theta}[W(theta')].
double expected_welfare(const Scenario& scenario, std::span<const double> w,
                        std::span<const int> profile, Allocation a);

/// E_{theta' | a, theta}[W_{-i}(theta'_{-i})], summing over the agents other
/// than i only. Agent i's own kernel integrates to one and is skipped.
double expected_marginal_welfare(const Scenario& scenario,
                                 const MarginalWelfareTable& marginal,
                                 std::span<const int> profile, Allocation a);

/// Stage welfare of `a` plus the discounted continuation.
double bellman_value(const Scenario& scenario, std::span<const double> w,
                     std::span<const int> profile, Allocation a);

/// Canonically first allocation whose Bellman value is within the tie
/// tolerance of the maximum.
Allocation efficient_allocation(const Scenario& scenario,
                                const WelfareTable& welfare,
                                std::span<const int> profile);

PolicyTable efficient_policy(const Scenario& scenario,
                             const WelfareTable& welfare);

/// Exact finite-horizon backward induction from W_0 = 0. Returns W_horizon.
std::vector<double> truncated_welfare_oracle(const Scenario& scenario,
                                             int horizon);

/// Solves W, the policy, and all n marginal tables.
MechanismTables solve_tables(const Scenario& scenario,
                             const SolverOptions& options = {});

/// Relative tolerance used when deciding that two Bellman values tie.
constexpr double kTieTolerance = 1e-12;

}  // namespace matrix_mech
