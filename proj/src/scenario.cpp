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

#include "matrix_mech/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <utility>

namespace matrix_mech {

namespace {

constexpr double kRowTolerance = 1e-9;

[[noreturn]] void fail(ScenarioErrc code, const std::string& what,
                       int line = 0) {
  if (line > 0) {
    throw ScenarioError(code, "line " + std::to_string(line) + ": " + what);
  }
  throw ScenarioError(code, what);
}

std::string agent_label(int agent) { return "agent " + std::to_string(agent); }

}  // namespace

std::string_view to_string(ScenarioErrc code) {
  switch (code) {
    case ScenarioErrc::kParse:
      return "ParseError";
    case ScenarioErrc::kUnknownKey:
      return "UnknownKey";
    case ScenarioErrc::kDuplicateEntry:
      return "DuplicateEntry";
    case ScenarioErrc::kInvalidReference:
      return "InvalidReference";
    case ScenarioErrc::kMissingTableEntry:
      return "MissingTableEntry";
    case ScenarioErrc::kRowNotStochastic:
      return "RowNotStochastic";
    case ScenarioErrc::kDiscountOutOfRange:
      return "DiscountOutOfRange";
    case ScenarioErrc::kNonZeroOutsideAllocation:
      return "NonZeroOutsideAllocation";
    case ScenarioErrc::kBoundViolated:
      return "BoundViolated";
    case ScenarioErrc::kTooLarge:
      return "TooLarge";
  }
  return "ScenarioError";
}

// ---------------------------------------------------------------------------
// TypeSpace

TypeSpace::TypeSpace(std::vector<std::vector<std::string>> labels)
    : labels_(std::move(labels)) {
  strides_.assign(labels_.size(), 1);
  std::size_t count = 1;
  for (std::size_t k = labels_.size(); k-- > 0;) {
    strides_[k] = count;
    count *= labels_[k].size();
  }
  profile_count_ = labels_.empty() ? 0 : count;
}

std::optional<int> TypeSpace::code(int agent, std::string_view label) const {
  const auto& row = labels_[agent];
  const auto it = std::find(row.begin(), row.end(), label);
  if (it == row.end()) return std::nullopt;
  return static_cast<int>(it - row.begin());
}

std::size_t TypeSpace::encode(std::span<const int> profile) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    index += static_cast<std::size_t>(profile[k]) * strides_[k];
  }
  return index;
}

Profile TypeSpace::decode(std::size_t index) const {
  Profile out(labels_.size());
  decode_into(index, out);
  return out;
}

void TypeSpace::decode_into(std::size_t index, std::span<int> out) const {
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    out[k] = static_cast<int>(index / strides_[k]);
    index %= strides_[k];
  }
}

std::size_t TypeSpace::encode_without(std::span<const int> profile,
                                      int excluded) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (static_cast<int>(k) == excluded) continue;
    index = index * labels_[k].size() + static_cast<std::size_t>(profile[k]);
  }
  return index;
}

std::string TypeSpace::format(std::span<const int> profile) const {
  std::string out;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    if (k) out += ' ';
    out += labels_[k][static_cast<std::size_t>(profile[k])];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario

std::size_t Scenario::restricted_index(Allocation a,
                                       std::span<const int> profile) const {
  std::size_t index = 0;
  for (std::uint32_t rest = a.mask(); rest != 0; rest &= rest - 1) {
    const int m = std::countr_zero(rest);
    index = index * static_cast<std::size_t>(types_.size(m)) +
            static_cast<std::size_t>(profile[m]);
  }
  return index;
}

double Scenario::valuation(int agent, Allocation a,
                           std::span<const int> profile) const {
  if (!a.contains(agent)) return 0.0;
  return valuations_[a.mask()][a.rank_of(agent)][restricted_index(a, profile)];
}

std::span<const double> Scenario::valuation_table(int agent,
                                                  Allocation a) const {
  return valuations_[a.mask()][a.rank_of(agent)];
}

Scenario Scenario::with_penalty(PenaltySpec penalty) const {
  Scenario copy = *this;
  copy.penalty_ = penalty;
  return copy;
}

// ---------------------------------------------------------------------------
// Validation

Scenario validate_scenario(const RawScenario& raw) {
  if (!raw.agent_count) {
    fail(ScenarioErrc::kMissingTableEntry, "[agents] count is required");
  }
  const int n = *raw.agent_count;
  if (n < 1) fail(ScenarioErrc::kInvalidReference, "agent count must be >= 1");
  if (n > kMaxAgents) {
    fail(ScenarioErrc::kTooLarge,
         "agent count exceeds " + std::to_string(kMaxAgents));
  }

  std::vector<std::vector<std::string>> labels(static_cast<std::size_t>(n));
  if (raw.type_labels.size() > static_cast<std::size_t>(n)) {
    fail(ScenarioErrc::kInvalidReference,
         "[types] declares more agents than [agents] count");
  }
  std::size_t states = 1;
  for (int i = 0; i < n; ++i) {
    if (static_cast<std::size_t>(i) >= raw.type_labels.size() ||
        !raw.type_labels[i]) {
      fail(ScenarioErrc::kMissingTableEntry,
           "[types] missing for " + agent_label(i));
    }
    const auto& row = *raw.type_labels[i];
    if (row.empty()) {
      fail(ScenarioErrc::kMissingTableEntry,
           "[types] empty for " + agent_label(i));
    }
    std::set<std::string> seen(row.begin(), row.end());
    if (seen.size() != row.size()) {
      fail(ScenarioErrc::kDuplicateEntry,
           "duplicate type label for " + agent_label(i));
    }
    if (states > kMaxStates / row.size()) {
      fail(ScenarioErrc::kTooLarge, "joint state count exceeds limit");
    }
    states *= row.size();
    labels[i] = row;
  }

  Scenario s;
  s.types_ = TypeSpace(std::move(labels));
  const TypeSpace& types = s.types_;
  const std::uint32_t masks = 1u << n;

  auto type_code = [&](int agent, const std::string& label, int line) {
    const auto code = types.code(agent, label);
    if (!code) {
      fail(ScenarioErrc::kInvalidReference,
           "unknown type '" + label + "' for " + agent_label(agent), line);
    }
    return *code;
  };
  auto check_agent = [&](int agent, int line) {
    if (agent < 0 || agent >= n) {
      fail(ScenarioErrc::kInvalidReference,
           "agent index " + std::to_string(agent) + " out of range", line);
    }
  };

  // Valuations.
  s.valuations_.assign(masks, {});
  std::vector<std::vector<std::vector<char>>> filled(masks);
  for (std::uint32_t mask = 1; mask < masks; ++mask) {
    const Allocation a(mask);
    std::size_t cells = 1;
    for (int m : a.members()) cells *= static_cast<std::size_t>(types.size(m));
    s.valuations_[mask].assign(static_cast<std::size_t>(a.size()),
                               std::vector<double>(cells, 0.0));
    filled[mask].assign(static_cast<std::size_t>(a.size()),
                        std::vector<char>(cells, 0));
  }
  double bound = 0.0;
  for (const auto& entry : raw.valuations) {
    check_agent(entry.agent, entry.line);
    if (entry.members.size() != entry.types.size()) {
      fail(ScenarioErrc::kParse,
           "valuation lists " + std::to_string(entry.members.size()) +
               " members but " + std::to_string(entry.types.size()) + " types",
           entry.line);
    }
    std::vector<std::pair<int, std::string>> pairs;
    for (std::size_t k = 0; k < entry.members.size(); ++k) {
      check_agent(entry.members[k], entry.line);
      pairs.emplace_back(entry.members[k], entry.types[k]);
    }
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t k = 1; k < pairs.size(); ++k) {
      if (pairs[k].first == pairs[k - 1].first) {
        fail(ScenarioErrc::kDuplicateEntry, "allocation repeats a member",
             entry.line);
      }
    }
    if (!std::isfinite(entry.value)) {
      fail(ScenarioErrc::kParse, "valuation is not finite", entry.line);
    }
    Allocation a;
    for (const auto& p : pairs) a = Allocation(a.mask() | (1u << p.first));
    if (!a.contains(entry.agent)) {
      if (entry.value != 0.0) {
        fail(ScenarioErrc::kNonZeroOutsideAllocation,
             agent_label(entry.agent) + " is not a member of " + a.to_string(),
             entry.line);
      }
      continue;
    }
    Profile profile(static_cast<std::size_t>(n), 0);
    for (const auto& [member, label] : pairs) {
      profile[member] = type_code(member, label, entry.line);
    }
    const auto rank = static_cast<std::size_t>(a.rank_of(entry.agent));
    const std::size_t cell = s.restricted_index(a, profile);
    char& flag = filled[a.mask()][rank][cell];
    if (flag) {
      fail(ScenarioErrc::kDuplicateEntry,
           "valuation for " + agent_label(entry.agent) + " at " +
               a.to_string() + " declared twice",
           entry.line);
    }
    flag = 1;
    s.valuations_[a.mask()][rank][cell] = entry.value;
    bound = std::max(bound, std::abs(entry.value));
  }
  for (std::uint32_t mask = 1; mask < masks; ++mask) {
    const Allocation a(mask);
    const auto members = a.members();
    for (std::size_t r = 0; r < members.size(); ++r) {
      const auto& flags = filled[mask][r];
      const auto hole = std::find(flags.begin(), flags.end(), 0);
      if (hole != flags.end()) {
        fail(ScenarioErrc::kMissingTableEntry,
             "no valuation for " + agent_label(members[r]) + " at " +
                 a.to_string());
      }
    }
  }
  if (raw.bound) {
    if (!(*raw.bound > 0.0)) {
      fail(ScenarioErrc::kBoundViolated, "bound must be positive");
    }
    if (bound > *raw.bound) {
      fail(ScenarioErrc::kBoundViolated,
           "a valuation exceeds the declared bound");
    }
  }
  s.bound_ = bound;

  // Transitions. Rows are keyed by (agent, selector, allocation mask, from);
  // explicit allocation rows take precedence over the membership shorthand.
  using RowKey = std::tuple<int, int, std::uint32_t, int>;
  std::map<RowKey, std::vector<double>> rows;
  std::map<RowKey, std::vector<char>> row_filled;
  std::map<RowKey, int> row_line;
  for (const auto& entry : raw.transitions) {
    check_agent(entry.agent, entry.line);
    std::uint32_t mask = 0;
    if (entry.selector == RawTransition::Selector::kExplicit) {
      for (int m : entry.members) {
        check_agent(m, entry.line);
        mask |= 1u << m;
      }
    }
    const int from = type_code(entry.agent, entry.from, entry.line);
    const int to = type_code(entry.agent, entry.to, entry.line);
    const RowKey key{entry.agent, static_cast<int>(entry.selector), mask, from};
    auto& row = rows[key];
    auto& flags = row_filled[key];
    if (row.empty()) {
      row.assign(static_cast<std::size_t>(types.size(entry.agent)), 0.0);
      flags.assign(row.size(), 0);
      row_line[key] = entry.line;
    }
    if (flags[static_cast<std::size_t>(to)]) {
      fail(ScenarioErrc::kDuplicateEntry, "transition cell declared twice",
           entry.line);
    }
    flags[static_cast<std::size_t>(to)] = 1;
    row[static_cast<std::size_t>(to)] = entry.prob;
  }
  for (auto& [key, row] : rows) {
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) {
        fail(ScenarioErrc::kRowNotStochastic,
             "probability outside [0, 1] for " + agent_label(std::get<0>(key)),
             row_line[key]);
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTolerance) {
      fail(ScenarioErrc::kRowNotStochastic,
           "row for " + agent_label(std::get<0>(key)) + " sums to " +
               std::to_string(sum),
           row_line[key]);
    }
    // Rows already within 1e-12 are kept verbatim so text round trips are
    // bit-exact.
    if (std::abs(sum - 1.0) > 1e-12) {
      for (double& p : row) p /= sum;
    }
  }

  s.kernels_.assign(static_cast<std::size_t>(n), {});
  for (int i = 0; i < n; ++i) {
    const auto width = static_cast<std::size_t>(types.size(i));
    s.kernels_[i].assign(masks, std::vector<double>(width * width, 0.0));
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      const Allocation a(mask);
      const auto shorthand = a.contains(i)
                                 ? RawTransition::Selector::kSelected
                                 : RawTransition::Selector::kUnselected;
      for (int from = 0; from < static_cast<int>(width); ++from) {
        auto it = rows.find(RowKey{
            i, static_cast<int>(RawTransition::Selector::kExplicit), mask, from});
        if (it == rows.end()) {
          it = rows.find(RowKey{i, static_cast<int>(shorthand), 0u, from});
        }
        if (it == rows.end()) {
          fail(ScenarioErrc::kMissingTableEntry,
               "no transition row for " + agent_label(i) + " from '" +
                   types.label(i, from) + "' under " + a.to_string());
        }
        std::copy(it->second.begin(), it->second.end(),
                  s.kernels_[i][mask].begin() +
                      static_cast<std::ptrdiff_t>(from * width));
      }
    }
  }

  // Parameters.
  if (!raw.delta) {
    fail(ScenarioErrc::kMissingTableEntry, "[params] delta is required");
  }
  if (!(*raw.delta > 0.0 && *raw.delta < 1.0)) {
    fail(ScenarioErrc::kDiscountOutOfRange,
         "delta must lie strictly inside (0, 1)");
  }
  s.discount_ = *raw.delta;
  if (raw.penalty) {
    try {
      s.penalty_ = PenaltySpec::parse(*raw.penalty);
    } catch (const std::invalid_argument& e) {
      fail(ScenarioErrc::kParse, std::string("penalty: ") + e.what());
    }
  }
  if (raw.owner) {
    if (*raw.owner < 0 || *raw.owner >= n) {
      fail(ScenarioErrc::kInvalidReference, "owner out of range");
    }
    s.owner_ = *raw.owner;
  }
  if (raw.const_price) {
    if (!(*raw.const_price >= 0.0) || !std::isfinite(*raw.const_price)) {
      fail(ScenarioErrc::kParse, "const_price must be finite and >= 0");
    }
    s.const_price_ = *raw.const_price;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Enumeration primitives

std::vector<Profile> enumerate_states(const Scenario& scenario) {
  const auto& types = scenario.types();
  std::vector<Profile> out;
  out.reserve(types.profile_count());
  for (std::size_t s = 0; s < types.profile_count(); ++s) {
    out.push_back(types.decode(s));
  }
  return out;
}

std::vector<double> stage_values(const Scenario& scenario, Allocation a,
                                 std::span<const int> profile) {
  std::vector<double> out(static_cast<std::size_t>(scenario.agents()), 0.0);
  for (int m : a.members()) out[m] = scenario.valuation(m, a, profile);
  return out;
}

double stage_welfare(const Scenario& scenario, Allocation a,
                     std::span<const int> profile) {
  double sum = 0.0;
  for (std::uint32_t rest = a.mask(); rest != 0; rest &= rest - 1) {
    sum += scenario.valuation(std::countr_zero(rest), a, profile);
  }
  return sum;
}

std::vector<double> joint_transition(const Scenario& scenario,
                                     std::span<const int> profile,
                                     Allocation a) {
  // Outer product of the per-agent rows, agent 0 most significant.
  std::vector<double> dist{1.0};
  for (int i = 0; i < scenario.agents(); ++i) {
    const auto row = scenario.transition_row(i, a, profile[i]);
    std::vector<double> next;
    next.reserve(dist.size() * row.size());
    for (double p : dist) {
      for (double q : row) next.push_back(p * q);
    }
    dist = std::move(next);
  }
  return dist;
}

}  // namespace matrix_mech
