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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <string>

#include "matrix_mech/random_scenario.hpp"
#include "matrix_mech/scenario.hpp"
#include "matrix_mech/scenario_io.hpp"
#include "test_util.hpp"

namespace matrix_mech {
namespace {

using testing::load_fixture;

const char* kSingle = R"(
[agents]
count = 1
[types]
0 = t
[valuations]
0, 0, t, 1
[transitions]
0, selected, t, t, 1
0, unselected, t, t, 1
[params]
delta = DELTA
)";

std::string single_with_delta(const std::string& delta) {
  std::string text = kSingle;
  text.replace(text.find("DELTA"), 5, delta);
  return text;
}

// Two agents with two types each; agent 0 rows are (p, 1-p) from `lo`.
std::string two_by_two(const std::string& row0_lo) {
  return R"(
[agents]
count = 2
[types]
0 = lo hi
1 = lo hi
[valuations]
0, 0, lo, 0.5
0, 0, hi, 1
1, 1, lo, -0.5
1, 1, hi, 0.25
0, {0 1}, lo lo, 1
0, {0 1}, lo hi, 1
0, {0 1}, hi lo, 2
0, {0 1}, hi hi, 2
1, {0 1}, lo lo, -1
1, {0 1}, lo hi, 0
1, {0 1}, hi lo, -1
1, {0 1}, hi hi, 0.5
[transitions]
)" + row0_lo + R"(
0, selected, hi, hi, 1
0, unselected, lo, lo, 1
0, unselected, hi, hi, 1
1, selected, lo, lo, 0.5
1, selected, lo, hi, 0.5
1, selected, hi, hi, 1
1, unselected, lo, lo, 1
1, unselected, hi, hi, 1
[params]
delta = 0.9
)";
}

const char* kRowOk = "0, selected, lo, lo, 0.8\n0, selected, lo, hi, 0.2";

ScenarioErrc error_code(const std::string& text) {
  try {
    load_scenario(text);
  } catch (const ScenarioError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected ScenarioError";
  return ScenarioErrc::kParse;
}

TEST(Scenario, SmallestInstance) {
  const auto s = load_scenario(single_with_delta("0.5"));
  EXPECT_EQ(s.agents(), 1);
  EXPECT_EQ(s.state_count(), 1u);
  EXPECT_DOUBLE_EQ(s.bound(), 1.0);
  EXPECT_DOUBLE_EQ(s.discount(), 0.5);
  EXPECT_EQ(s.penalty(), PenaltySpec::quadratic());
}

TEST(Scenario, RowNotStochastic) {
  EXPECT_EQ(error_code(two_by_two(
                "0, selected, lo, lo, 0.5\n0, selected, lo, hi, 0.6")),
            ScenarioErrc::kRowNotStochastic);
  EXPECT_EQ(error_code(two_by_two(
                "0, selected, lo, lo, 1.2\n0, selected, lo, hi, -0.2")),
            ScenarioErrc::kRowNotStochastic);
}

TEST(Scenario, RowWithinToleranceAccepted) {
  const auto s = load_scenario(two_by_two(
      "0, selected, lo, lo, 0.8\n0, selected, lo, hi, 0.2000000000005"));
  const auto row = s.transition_row(0, Allocation(1), 0);
  EXPECT_NEAR(row[0] + row[1], 1.0, 1e-12);
}

TEST(Scenario, DiscountOutOfRange) {
  EXPECT_EQ(error_code(single_with_delta("1.0")),
            ScenarioErrc::kDiscountOutOfRange);
  EXPECT_EQ(error_code(single_with_delta("0")),
            ScenarioErrc::kDiscountOutOfRange);
  EXPECT_EQ(error_code(single_with_delta("-0.3")),
            ScenarioErrc::kDiscountOutOfRange);
}

TEST(Scenario, MalformedDeltaNamesKey) {
  try {
    load_scenario(single_with_delta("abc"));
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.code(), ScenarioErrc::kParse);
    EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
  }
}

TEST(Scenario, MissingTableEntry) {
  std::string text = two_by_two(kRowOk);
  text.erase(text.find("1, 1, hi, 0.25\n"), 15);
  EXPECT_EQ(error_code(text), ScenarioErrc::kMissingTableEntry);

  std::string no_row = two_by_two(kRowOk);
  no_row.erase(no_row.find("0, unselected, hi, hi, 1\n"), 25);
  EXPECT_EQ(error_code(no_row), ScenarioErrc::kMissingTableEntry);
}

TEST(Scenario, NonZeroOutsideAllocation) {
  std::string text = two_by_two(kRowOk);
  text.insert(text.find("[transitions]"), "1, 0, lo, 3\n");
  EXPECT_EQ(error_code(text), ScenarioErrc::kNonZeroOutsideAllocation);
}

TEST(Scenario, ZeroOutsideAllocationIgnored) {
  std::string text = two_by_two(kRowOk);
  text.insert(text.find("[transitions]"), "1, 0, lo, 0\n");
  EXPECT_NO_THROW(load_scenario(text));
}

TEST(Scenario, UnknownKeysRejected) {
  std::string text = single_with_delta("0.5") + "gamma = 2\n";
  EXPECT_EQ(error_code(text), ScenarioErrc::kUnknownKey);
  EXPECT_EQ(error_code(single_with_delta("0.5") + "[extras]\n"),
            ScenarioErrc::kUnknownKey);
}

TEST(Scenario, DuplicateEntry) {
  std::string text = two_by_two(kRowOk);
  text.insert(text.find("[transitions]"), "0, 0, lo, 0.5\n");
  EXPECT_EQ(error_code(text), ScenarioErrc::kDuplicateEntry);
  EXPECT_EQ(error_code(single_with_delta("0.5") + "delta = 0.4\n"),
            ScenarioErrc::kDuplicateEntry);
}

TEST(Scenario, InvalidReference) {
  std::string text = two_by_two(kRowOk);
  text.insert(text.find("[transitions]"), "0, 0, mid, 0.5\n");
  EXPECT_EQ(error_code(text), ScenarioErrc::kInvalidReference);
}

TEST(Scenario, BoundChecked) {
  EXPECT_NO_THROW(load_scenario(single_with_delta("0.5") + "bound = 1\n"));
  EXPECT_EQ(error_code(single_with_delta("0.5") + "bound = 0.5\n"),
            ScenarioErrc::kBoundViolated);
}

TEST(Scenario, ExplicitRowOverridesShorthand) {
  const std::string text =
      two_by_two(kRowOk) +
      "[transitions]\n0, {0 1}, lo, lo, 0.1\n0, {0 1}, lo, hi, 0.9\n";
  const auto s = load_scenario(text);
  EXPECT_DOUBLE_EQ(s.transition_row(0, Allocation(0b01), 0)[0], 0.8);
  EXPECT_DOUBLE_EQ(s.transition_row(0, Allocation(0b11), 0)[0], 0.1);
  EXPECT_DOUBLE_EQ(s.transition_row(0, Allocation(0b10), 0)[0], 1.0);
}

TEST(Scenario, EnumerateStatesRowMajor) {
  const auto s = load_scenario(two_by_two(kRowOk));
  const auto states = enumerate_states(s);
  ASSERT_EQ(states.size(), 4u);
  EXPECT_EQ(states[0], (Profile{0, 0}));
  EXPECT_EQ(states[1], (Profile{0, 1}));
  EXPECT_EQ(states[2], (Profile{1, 0}));
  EXPECT_EQ(states[3], (Profile{1, 1}));
  for (std::size_t k = 0; k < states.size(); ++k) {
    EXPECT_EQ(s.types().encode(states[k]), k);
    EXPECT_EQ(s.types().decode(k), states[k]);
  }
}

TEST(TypeSpace, Sizes) {
  const TypeSpace one({{"a", "b", "c"}});
  EXPECT_EQ(one.profile_count(), 3u);
  const TypeSpace three({{"a", "b"}, {"x", "y", "z"}, {"p", "q"}});
  EXPECT_EQ(three.profile_count(), 12u);
  for (std::size_t k = 0; k < 12; ++k) {
    EXPECT_EQ(three.encode(three.decode(k)), k);
  }
  const Profile p{1, 2, 0};
  EXPECT_EQ(three.encode_without(p, 1), 2u);  // (1, 0) over sizes (2, 2)
  EXPECT_EQ(three.encode_without(p, 0), 4u);  // (2, 0) over sizes (3, 2)
  EXPECT_EQ(three.reduced_count(1), 4u);
  EXPECT_EQ(three.format(p), "b z p");
}

TEST(Scenario, StageValues) {
  const auto s1 = load_fixture("s1");
  const Profile only{0, 0};
  EXPECT_EQ(stage_values(s1, Allocation(0b11), only),
            (std::vector<double>{2.0, -0.5}));
  EXPECT_EQ(stage_values(s1, Allocation(0), only),
            (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(stage_values(s1, Allocation(0b01), only),
            (std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(stage_welfare(s1, Allocation(0b11), only), 1.5);
}

TEST(Scenario, JointTransitionProduct) {
  const auto s = load_scenario(two_by_two(kRowOk));
  // Agent 0 row (0.8, 0.2) under {0 1}; agent 1 row (0.5, 0.5).
  const auto joint = joint_transition(s, Profile{0, 0}, Allocation(0b11));
  ASSERT_EQ(joint.size(), 4u);
  EXPECT_DOUBLE_EQ(joint[0], 0.40);
  EXPECT_DOUBLE_EQ(joint[1], 0.40);
  EXPECT_DOUBLE_EQ(joint[2], 0.10);
  EXPECT_DOUBLE_EQ(joint[3], 0.10);

  const auto one = load_scenario(single_with_delta("0.5"));
  EXPECT_EQ(joint_transition(one, Profile{0}, Allocation(1)),
            std::vector<double>{1.0});
}

// Sums to one, marginals equal per-agent rows, zero outside the allocation.
TEST(Scenario, RandomSuiteInvariants) {
  for (const auto& s : random_suite(11, 25)) {
    const auto& types = s.types();
    for (const auto& theta : enumerate_states(s)) {
      for (const auto a : enumerate_allocations(s.agents())) {
        const auto joint = joint_transition(s, theta, a);
        EXPECT_NEAR(std::accumulate(joint.begin(), joint.end(), 0.0), 1.0,
                    1e-10);
        for (int i = 0; i < s.agents(); ++i) {
          std::vector<double> marginal(types.size(i), 0.0);
          for (std::size_t k = 0; k < joint.size(); ++k) {
            marginal[types.decode(k)[i]] += joint[k];
          }
          const auto row = s.transition_row(i, a, theta[i]);
          for (int c = 0; c < types.size(i); ++c) {
            EXPECT_NEAR(marginal[c], row[c], 1e-15);
          }
        }
        const auto values = stage_values(s, a, theta);
        for (int i = 0; i < s.agents(); ++i) {
          if (!a.contains(i)) {
            EXPECT_EQ(values[i], 0.0);
          }
          EXPECT_LE(std::abs(values[i]), s.bound());
        }
      }
    }
  }
}

TEST(ScenarioIo, RoundTripIsBitExact) {
  auto suite = random_suite(5, 20);
  suite.push_back(load_fixture("task_team"));
  for (const auto& s : suite) {
    const auto text = write_scenario_text(s);
    const auto back = load_scenario(text);
    ASSERT_EQ(back.agents(), s.agents());
    EXPECT_EQ(back.discount(), s.discount());
    EXPECT_EQ(back.bound(), s.bound());
    EXPECT_EQ(back.penalty(), s.penalty());
    EXPECT_EQ(back.owner(), s.owner());
    EXPECT_EQ(back.const_price(), s.const_price());
    for (const auto a : enumerate_allocations(s.agents())) {
      for (int i = 0; i < s.agents(); ++i) {
        const auto k0 = s.transition_kernel(i, a);
        const auto k1 = back.transition_kernel(i, a);
        ASSERT_TRUE(std::equal(k0.begin(), k0.end(), k1.begin(), k1.end()));
        if (a.contains(i)) {
          const auto v0 = s.valuation_table(i, a);
          const auto v1 = back.valuation_table(i, a);
          ASSERT_TRUE(std::equal(v0.begin(), v0.end(), v1.begin(), v1.end()));
        }
      }
    }
    EXPECT_EQ(write_scenario_text(back), text);
  }
}

TEST(ScenarioIo, PenaltyAndParams) {
  const auto s = load_scenario(single_with_delta("0.5") +
                               "penalty = scaled:3\nowner = 0\nconst_price = 2\n");
  EXPECT_EQ(s.penalty(), PenaltySpec::scaled_quadratic(3.0));
  EXPECT_DOUBLE_EQ(s.const_price(), 2.0);
  const auto absolute = s.with_penalty(PenaltySpec::absolute());
  EXPECT_EQ(absolute.penalty(), PenaltySpec::absolute());
}

TEST(RandomScenario, DeterministicAndBounded) {
  const auto a = random_scenario(99);
  const auto b = random_scenario(99);
  EXPECT_EQ(write_scenario_text(a), write_scenario_text(b));
  const auto suite = default_suite();
  ASSERT_EQ(suite.size(), 100u);
  for (const auto& s : suite) {
    EXPECT_LE(s.agents(), 3);
    EXPECT_LE(s.bound(), 1.0);
    EXPECT_GE(s.discount(), 0.3);
    EXPECT_LE(s.discount(), 0.9);
    for (int i = 0; i < s.agents(); ++i) EXPECT_LE(s.types().size(i), 3);
  }
}

TEST(RandomScenario, PrivateValuesDependOnOwnTypeOnly) {
  RandomScenarioConfig cfg;
  cfg.private_values = true;
  for (const auto& s : random_suite(3, 20, cfg)) {
    const auto states = enumerate_states(s);
    for (const auto a : enumerate_allocations(s.agents())) {
      for (const auto& x : states) {
        for (const auto& y : states) {
          for (int i = 0; i < s.agents(); ++i) {
            if (x[i] == y[i]) {
              EXPECT_EQ(s.valuation(i, a, x), s.valuation(i, a, y));
            }
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace matrix_mech
