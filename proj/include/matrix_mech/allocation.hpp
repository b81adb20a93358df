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

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace matrix_mech {

/// Hard cap on the agent count; allocations are stored as 32-bit masks and
/// the power set must stay enumerable.
constexpr int kMaxAgents = 20;

/// A subset of the agent set, stored as a bitmask over agent indices.
///
/// The canonical total order is ascending mask value: the empty set first,
/// then {0}, {1}, {0,1}, {2}, ... Every tie in an argmax over allocations is
/// broken toward the canonically first subset.
class Allocation {
 public:
  constexpr Allocation() = default;
  constexpr explicit Allocation(std::uint32_t mask) : mask_(mask) {}

  static Allocation from_members(const std::vector<int>& members);

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(int agent) const { return (mask_ >> agent) & 1u; }
  constexpr int size() const { return std::popcount(mask_); }

  /// Position of `agent` among the sorted members. Requires contains(agent).
  constexpr int rank_of(int agent) const {
    return std::popcount(mask_ & ((1u << agent) - 1u));
  }

  std::vector<int> members() const;

  /// "{}" or "{0 2}".
  std::string to_string() const;

  constexpr auto operator<=>(const Allocation&) const = default;

 private:
  std::uint32_t mask_ = 0;
};

/// All 2^n subsets in canonical order, or the 2^(n-1) subsets omitting
/// `excluded` when given.
std::vector<Allocation> enumerate_allocations(
    int n, std::optional<int> excluded = std::nullopt);

}  // namespace matrix_mech
