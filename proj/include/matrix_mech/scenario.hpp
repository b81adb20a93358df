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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "matrix_mech/allocation.hpp"
#include "matrix_mech/penalty.hpp"

namespace matrix_mech {

/// One type index per agent.
using Profile = std::vector<int>;

/// Largest joint state space a scenario may declare.
constexpr std::size_t kMaxStates = std::size_t{1} << 24;

enum class ScenarioErrc {
  kParse,
  kUnknownKey,
  kDuplicateEntry,
  kInvalidReference,
  kMissingTableEntry,
  kRowNotStochastic,
  kDiscountOutOfRange,
  kNonZeroOutsideAllocation,
  kBoundViolated,
  kTooLarge,
};

std::string_view to_string(ScenarioErrc code);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ScenarioErrc code() const { return code_; }

 private:
  ScenarioErrc code_;
};

/// Per-agent finite type labels. The numeric code of a label is its position;
/// joint profiles are indexed row-major with agent 0 most significant.
class TypeSpace {
 public:
  TypeSpace() = default;
  explicit TypeSpace(std::vector<std::vector<std::string>> labels);

  int agents() const { return static_cast<int>(labels_.size()); }
  int size(int agent) const { return static_cast<int>(labels_[agent].size()); }
  const std::string& label(int agent, int code) const {
    return labels_[agent][code];
  }
  std::optional<int> code(int agent, std::string_view label) const;

  std::size_t profile_count() const { return profile_count_; }
  std::size_t stride(int agent) const { return strides_[agent]; }

  std::size_t encode(std::span<const int> profile) const;
  Profile decode(std::size_t index) const;
  /// Writes the decoded profile into `out` (size agents()).
  void decode_into(std::size_t index, std::span<int> out) const;

  /// Row-major index over every agent except `excluded`.
  std::size_t encode_without(std::span<const int> profile, int excluded) const;
  std::size_t reduced_count(int excluded) const {
    return profile_count_ / static_cast<std::size_t>(size(excluded));
  }

  std::string format(std::span<const int> profile) const;

 private:
  std::vector<std::vector<std::string>> labels_;
  std::vector<std::size_t> strides_;
  std::size_t profile_count_ = 0;
};

struct RawValuation {
  int agent = 0;
  std::vector<int> members;
  std::vector<std::string> types;  // one label per entry of `members`
  double value = 0.0;
  int line = 0;
};

struct RawTransition {
  enum class Selector { kSelected, kUnselected, kExplicit };
  int agent = 0;
  Selector selector = Selector::kSelected;
  std::vector<int> members;  // only for kExplicit
  std::string from;
  std::string to;
  double prob = 0.0;
  int line = 0;
};

/// Syntactically parsed but unvalidated scenario description.
struct RawScenario {
  std::optional<int> agent_count;
  std::vector<std::optional<std::vector<std::string>>> type_labels;
  std::vector<RawValuation> valuations;
  std::vector<RawTransition> transitions;
  std::optional<double> delta;
  std::optional<std::string> penalty;
  std::optional<double> bound;
  std::optional<int> owner;
  std::optional<double> const_price;
};

/// A validated problem instance. Immutable after construction.
class Scenario {
 public:
  int agents() const { return types_.agents(); }
  const TypeSpace& types() const { return types_; }
  double discount() const { return discount_; }
  /// max |v_i| over every stored valuation.
  double bound() const { return bound_; }
  const PenaltySpec& penalty() const { return penalty_; }
  int owner() const { return owner_; }
  double const_price() const { return const_price_; }

  std::size_t state_count() const { return types_.profile_count(); }
  std::size_t allocation_count() const { return std::size_t{1} << agents(); }

  /// v_i(a, theta_a); zero when the agent is not in `a`.
  double valuation(int agent, Allocation a, std::span<const int> profile) const;

  /// Values over the restricted profiles theta_a (row-major over the sorted
  /// members of `a`). Requires a.contains(agent).
  std::span<const double> valuation_table(int agent, Allocation a) const;

  /// F_i(. | a, from).
  std::span<const double> transition_row(int agent, Allocation a,
                                         int from) const {
    const auto& kernel = kernels_[agent][a.mask()];
    const auto width = static_cast<std::size_t>(types_.size(agent));
    return {kernel.data() + static_cast<std::size_t>(from) * width, width};
  }

  /// Row-major |Theta_i| x |Theta_i| kernel for agent `agent` under `a`.
  std::span<const double> transition_kernel(int agent, Allocation a) const {
    return kernels_[agent][a.mask()];
  }

  Scenario with_penalty(PenaltySpec penalty) const;

 private:
  friend Scenario validate_scenario(const RawScenario& raw);

  std::size_t restricted_index(Allocation a,
                               std::span<const int> profile) const;

  TypeSpace types_;
  // valuations_[mask][rank] -> table over restricted profiles of mask
  std::vector<std::vector<std::vector<double>>> valuations_;
  // kernels_[agent][mask] -> row-major square matrix
  std::vector<std::vector<std::vector<double>>> kernels_;
  double discount_ = 0.5;
  double bound_ = 0.0;
  PenaltySpec penalty_;
  int owner_ = 0;
  double const_price_ = 1.0;
};

/// Checks every structural and numeric invariant and builds the scenario.
/// Throws ScenarioError.
Scenario validate_scenario(const RawScenario& raw);

/// All joint profiles in row-major order.
std::vector<Profile> enumerate_states(const Scenario& scenario);

/// Per-agent valuations at (a, profile); entry i is zero when i is not in a.
std::vector<double> stage_values(const Scenario& scenario, Allocation a,
                                 std::span<const int> profile);

/// Sum of stage_values.
double stage_welfare(const Scenario& scenario, Allocation a,
                     std::span<const int> profile);

/// Product distribution over joint next profiles, indexed like
/// enumerate_states.
std::vector<double> joint_transition(const Scenario& scenario,
                                     std::span<const int> profile,
                                     Allocation a);

}  // namespace matrix_mech
