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

#include "matrix_mech/allocation.hpp"

#include <stdexcept>

namespace matrix_mech {

Allocation Allocation::from_members(const std::vector<int>& members) {
  std::uint32_t mask = 0;
  for (int m : members) {
    if (m < 0 || m >= kMaxAgents) {
      throw std::out_of_range("agent index out of range: " + std::to_string(m));
    }
    mask |= 1u << m;
  }
  return Allocation(mask);
}

std::vector<int> Allocation::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint32_t rest = mask_; rest != 0; rest &= rest - 1) {
    out.push_back(std::countr_zero(rest));
  }
  return out;
}

std::string Allocation::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int m : members()) {
    if (!first) out += ' ';
    out += std::to_string(m);
    first = false;
  }
  out += '}';
  return out;
}

std::vector<Allocation> enumerate_allocations(int n,
                                              std::optional<int> excluded) {
  if (n < 1 || n > kMaxAgents) {
    throw std::invalid_argument("agent count out of range");
  }
  if (excluded && (*excluded < 0 || *excluded >= n)) {
    throw std::invalid_argument("excluded agent out of range");
  }
  const std::uint32_t total = 1u << n;
  const std::uint32_t skip = excluded ? (1u << *excluded) : 0u;
  std::vector<Allocation> out;
  out.reserve(excluded ? total / 2 : total);
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    if ((mask & skip) == 0) out.emplace_back(mask);
  }
  return out;
}

}  // namespace matrix_mech
