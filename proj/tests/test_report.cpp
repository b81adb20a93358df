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
#include <limits>
#include <sstream>

#include "matrix_mech/random_scenario.hpp"
#include "matrix_mech/report.hpp"
#include "test_util.hpp"

namespace matrix_mech {
namespace {

using testing::load_fixture;

TEST(Report, FormatReal) {
  EXPECT_EQ(format_real(3.0), "3");
  EXPECT_EQ(format_real(-0.5), "-0.5");
  for (double x : {0.1, 1.0 / 3.0, -2.718281828459045, 1e-300, 6.02e23}) {
    EXPECT_EQ(std::stod(format_real(x)), x);
  }
}

TEST(Report, S1WelfareCsv) {
  const auto s1 = load_fixture("s1");
  const auto tables = solve_tables(s1);
  std::ostringstream os;
  write_welfare_csv(os, s1, tables.welfare, tables.policy);
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "state,value,allocation");
  EXPECT_NE(text.find("only only,"), std::string::npos);
  EXPECT_NE(text.find(",{0 1}\n"), std::string::npos);
}

TEST(Report, TablesRoundTrip) {
  auto suite = random_suite(101, 15);
  suite.push_back(load_fixture("task_team"));
  for (const auto& s : suite) {
    const auto tables = solve_tables(s);
    std::stringstream ws;
    write_welfare_csv(ws, s, tables.welfare, tables.policy);
    const auto back = read_welfare_csv(ws, s);
    EXPECT_EQ(back.values, tables.welfare.values);
    EXPECT_EQ(back.allocations, tables.policy.allocation);
    for (int i = 0; i < s.agents(); ++i) {
      std::stringstream ms;
      write_marginal_csv(ms, s, tables.marginal[i]);
      EXPECT_EQ(read_marginal_csv(ms, s, i), tables.marginal[i].values);
    }
  }
}

TEST(Report, TrajectoryRows) {
  const auto s1 = load_fixture("s1");
  const auto tables = solve_tables(s1);
  const auto traj = simulate_episode(s1, tables, {}, StrategyProfile::truthful(),
                                     Profile{0, 0}, 2, 1);
  std::ostringstream os;
  write_trajectory_header(os);
  write_trajectory_rows(os, s1, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line,
            "t,agent,true_type,reported_type,allocated,true_value,"
            "reported_value,payment,penalty,utility");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Report, VerdictRow) {
  const auto s1 = load_fixture("s1");
  const auto tables = solve_tables(s1);
  std::ostringstream os;
  write_verdict_header(os);
  write_verdict_row(os, "s1", s1, check_epir(s1, tables));
  const auto text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "scenario_id,property,cases,worst_value,tolerance,verdict,witness");
  EXPECT_NE(text.find("s1,epir,2,"), std::string::npos);
  EXPECT_NE(text.find(",pass,"), std::string::npos);
}

}  // namespace
}  // namespace matrix_mech
