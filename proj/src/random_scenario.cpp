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

#include "matrix_mech/random_scenario.hpp"

#include <cmath>
#include <random>
#include <string>

#include "matrix_mech/simulator.hpp"

namespace matrix_mech {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double valuation() { return std::round((2.0 * uniform() - 1.0) * 1000.0) / 1000.0; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

Scenario random_scenario(std::uint64_t seed, const RandomScenarioConfig& config) {
  Draw draw(seed);
  RawScenario raw;
  const int n = draw.integer(config.min_agents, config.max_agents);
  raw.agent_count = n;
  for (int i = 0; i < n; ++i) {
    const int size = draw.integer(config.min_types, config.max_types);
    std::vector<std::string> labels;
    for (int c = 0; c < size; ++c) labels.push_back("t" + std::to_string(c));
    raw.type_labels.emplace_back(std::move(labels));
  }
  auto label = [&](int agent, int code) { return (*raw.type_labels[agent])[code]; };
  auto width = [&](int agent) {
    return static_cast<int>(raw.type_labels[agent]->size());
  };

  for (const Allocation a : enumerate_allocations(n)) {
    if (a.empty()) continue;
    const auto members = a.members();
    std::size_t cells = 1;
    for (int m : members) cells *= static_cast<std::size_t>(width(m));
    for (int agent : members) {
      std::vector<double> own_table;
      if (config.private_values) {
        for (int c = 0; c < width(agent); ++c) own_table.push_back(draw.valuation());
      }
      for (std::size_t cell = 0; cell < cells; ++cell) {
        RawValuation v;
        v.agent = agent;
        v.members = members;
        std::size_t rest = cell;
        std::vector<int> codes(members.size());
        for (std::size_t k = members.size(); k-- > 0;) {
          codes[k] = static_cast<int>(rest % static_cast<std::size_t>(width(members[k])));
          rest /= static_cast<std::size_t>(width(members[k]));
        }
        for (std::size_t k = 0; k < members.size(); ++k) {
          v.types.push_back(label(members[k], codes[k]));
        }
        v.value = config.private_values ? own_table[codes[a.rank_of(agent)]]
                                        : draw.valuation();
        raw.valuations.push_back(std::move(v));
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    for (const Allocation a : enumerate_allocations(n)) {
      for (int from = 0; from < width(i); ++from) {
        std::vector<double> row;
        double sum = 0.0;
        for (int to = 0; to < width(i); ++to) {
          row.push_back(draw.uniform() + 1e-3);
          sum += row.back();
        }
        for (int to = 0; to < width(i); ++to) {
          RawTransition t;
          t.agent = i;
          t.selector = RawTransition::Selector::kExplicit;
          t.members = a.members();
          t.from = label(i, from);
          t.to = label(i, to);
          t.prob = row[to] / sum;
          raw.transitions.push_back(std::move(t));
        }
      }
    }
  }

  raw.delta = std::round((config.min_delta +
                          (config.max_delta - config.min_delta) * draw.uniform()) *
                         100.0) /
              100.0;
  return validate_scenario(raw);
}

std::vector<Scenario> random_suite(std::uint64_t seed, std::size_t count,
                                   const RandomScenarioConfig& config) {
  std::vector<Scenario> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    out.push_back(random_scenario(episode_seed(seed, k), config));
  }
  return out;
}

std::vector<Scenario> default_suite() {
  return random_suite(kDefaultSuiteSeed, 100);
}

}  // namespace matrix_mech
