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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "matrix_mech/cli.hpp"
#include "matrix_mech/report.hpp"
#include "test_util.hpp"

namespace matrix_mech {
namespace {

namespace fs = std::filesystem;
using testing::data_path;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("matrix_mech_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "matrix-mech");
    out_.str({});
    err_.str({});
    return run_cli(args, out_, err_);
  }

  std::string out(const std::string& sub = "out") const {
    return (dir_ / sub).string();
  }

  static std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(Cli, SolveS1) {
  ASSERT_EQ(run({"solve", "--scenario", data_path("s1.scenario"), "--out", out()}),
            kExitOk)
      << err_.str();
  const auto welfare = slurp(fs::path(out()) / "welfare.csv");
  EXPECT_EQ(welfare, "state,value,allocation\nonly only," +
                         std::string(format_real(solve_tables(testing::load_fixture("s1"))
                                                     .welfare.values[0])) +
                         ",{0 1}\n");
  EXPECT_TRUE(fs::exists(fs::path(out()) / "marginal_0.csv"));
  EXPECT_TRUE(fs::exists(fs::path(out()) / "marginal_1.csv"));
  EXPECT_TRUE(fs::exists(fs::path(out()) / "solve_summary.csv"));
}

TEST_F(Cli, TighterTolSamePolicy) {
  ASSERT_EQ(run({"solve", "--scenario", data_path("s1.scenario"), "--out", out("a")}),
            kExitOk);
  ASSERT_EQ(run({"solve", "--scenario", data_path("s1.scenario"), "--out", out("b"),
                 "--tol", "1e-12"}),
            kExitOk);
  const auto iterations = [&](const std::string& d) {
    std::ifstream in(fs::path(d) / "solve_summary.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);  // welfare row
    return std::stoi(line.substr(line.find(',') + 1));
  };
  EXPECT_GT(iterations(out("b")), iterations(out("a")));
  const auto policy = [&](const std::string& d) {
    const auto text = slurp(fs::path(d) / "welfare.csv");
    return text.substr(text.rfind(','));
  };
  EXPECT_EQ(policy(out("a")), policy(out("b")));
}

TEST_F(Cli, MalformedDelta) {
  auto text = slurp(data_path("s1.scenario"));
  text.replace(text.find("delta = 0.5"), 11, "delta = x");
  const auto path = write("bad.scenario", text);
  EXPECT_EQ(run({"solve", "--scenario", path, "--out", out()}), kExitInvalidInput);
  EXPECT_NE(err_.str().find("delta"), std::string::npos);

  text.replace(text.find("delta = x"), 9, "delta = 1");
  const auto edge = write("edge.scenario", text);
  EXPECT_EQ(run({"solve", "--scenario", edge, "--out", out()}), kExitInvalidInput);
  EXPECT_NE(err_.str().find("delta"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({"solve", "--scenario", data_path("s1.scenario"), "--bogus"}),
            kExitInvalidInput);
  EXPECT_EQ(run({"frobnicate"}), kExitInvalidInput);
  EXPECT_EQ(run({"solve", "--scenario", (dir_ / "missing.scenario").string()}),
            kExitInvalidInput);
  EXPECT_EQ(run({"simulate", "--scenario", data_path("s1.scenario"), "--mechanism",
                 "vcg", "--out", out()}),
            kExitInvalidInput);
  EXPECT_EQ(run({"solve", "--scenario", data_path("s1.scenario"), "--penalty",
                 "cubic", "--out", out()}),
            kExitInvalidInput);
}

TEST_F(Cli, NonConvergence) {
  // A cap is not exposed; a tolerance below the attainable precision trips it
  // only through the cap, so use a long-memory instance and a tiny tolerance.
  auto text = slurp(data_path("single_agent.scenario"));
  text.replace(text.find("delta = 0.5"), 11, "delta = 0.9999999");
  const auto path = write("slow.scenario", text);
  EXPECT_EQ(run({"solve", "--scenario", path, "--out", out(), "--tol", "1e-15"}),
            kExitNonConvergence);
}

TEST_F(Cli, VerifyS1) {
  EXPECT_EQ(run({"verify", "--scenario", data_path("s1.scenario"), "--out", out()}),
            kExitOk)
      << err_.str();
  const auto text = slurp(fs::path(out()) / "verdicts.csv");
  for (const char* property : {"epic", "strict_stage2", "epir", "efficiency"}) {
    EXPECT_NE(text.find(std::string(",") + property), std::string::npos) << property;
  }
  EXPECT_EQ(text.find(",fail,"), std::string::npos);
}

TEST_F(Cli, VerifyAblated) {
  EXPECT_EQ(run({"verify", "--scenario", data_path("s1.scenario"), "--out", out(),
                 "--ablate-penalty"}),
            kExitPropertyFailed);
  const auto text = slurp(fs::path(out()) / "verdicts.csv");
  EXPECT_NE(text.find(",fail,"), std::string::npos);
}

TEST_F(Cli, VerifySuiteDirectory) {
  ASSERT_EQ(run({"generate", "--seed", "3", "--count", "4", "--out", out("suite")}),
            kExitOk);
  ASSERT_EQ(run({"verify", "--scenario", out("suite"), "--out", out()}), kExitOk)
      << err_.str();
  std::ifstream in(fs::path(out()) / "verdicts.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4 * 4);
}

TEST_F(Cli, SimulateDeterministic) {
  const std::vector<std::string> base{"simulate", "--scenario",
                                      data_path("task_team.scenario"),
                                      "--episodes", "200", "--seed", "42"};
  auto a = base;
  a.insert(a.end(), {"--out", out("a")});
  auto b = base;
  b.insert(b.end(), {"--out", out("b")});
  ASSERT_EQ(run(a), kExitOk) << err_.str();
  ASSERT_EQ(run(b), kExitOk);
  for (const char* f : {"trajectory.csv", "utility.csv"}) {
    EXPECT_EQ(slurp(fs::path(out("a")) / f), slurp(fs::path(out("b")) / f)) << f;
  }
}

TEST_F(Cli, SimulateS1DefaultHorizon) {
  ASSERT_EQ(run({"simulate", "--scenario", data_path("s1.scenario"), "--episodes",
                 "5", "--out", out()}),
            kExitOk);
  std::ifstream in(fs::path(out()) / "utility.csv");
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header, "scenario,mechanism,agent,state,exact,mc_mean,mc_stderr,episodes");
  std::getline(in, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  ASSERT_EQ(cells.size(), 8u);
  EXPECT_EQ(cells[2], "0");
  EXPECT_NEAR(std::stod(cells[5]), 3.0, 1e-3);
}

TEST_F(Cli, SimulateDeviationPenaltyAtRound) {
  ASSERT_EQ(run({"simulate", "--scenario", data_path("s1.scenario"), "--episodes",
                 "1", "--horizon", "5", "--deviation", "1:2:only:0.5", "--out", out()}),
            kExitOk)
      << err_.str();
  std::ifstream in(fs::path(out()) / "trajectory.csv");
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 10u);
    const bool at = cells[0] == "2" && cells[1] == "1";
    EXPECT_EQ(std::stod(cells[8]) != 0.0, at) << line;
  }
}

TEST_F(Cli, CompareBaselines) {
  EXPECT_EQ(run({"compare", "--scenario", data_path("task_team.scenario"), "--out",
                 out(), "--horizon", "20"}),
            kExitOk)
      << err_.str();
  const auto compare = slurp(fs::path(out()) / "compare.csv");
  EXPECT_NE(compare.find("epic[const]"), std::string::npos);
  const auto budget = slurp(fs::path(out()) / "budget.csv");
  std::istringstream is(budget);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "scenario_id,mechanism,rounds,min,max,mean,deficit_rounds");
  bool saw_const = false;
  while (std::getline(is, line)) {
    if (line.find(",const,") == std::string::npos) continue;
    saw_const = true;
    EXPECT_NE(line.find(",20,0,0,0,"), std::string::npos) << line;
  }
  EXPECT_TRUE(saw_const);
}

TEST_F(Cli, SearchDpm) {
  ASSERT_EQ(run({"search-dpm", "--out", out()}), kExitOk) << err_.str();
  const auto witness = (fs::path(out()) / "dpm_witness.scenario").string();
  ASSERT_TRUE(fs::exists(witness));
  EXPECT_TRUE(fs::exists(fs::path(out()) / "dpm_witness.csv"));
  EXPECT_EQ(run({"compare", "--scenario", witness, "--out", out("cmp")}), kExitOk);
  const auto compare = slurp(fs::path(out("cmp")) / "compare.csv");
  EXPECT_NE(compare.find("epic,"), std::string::npos);
  EXPECT_NE(compare.find("epic[dpm]"), std::string::npos);
  std::istringstream is(compare);
  std::string line;
  while (std::getline(is, line)) {
    if (line.find(",epic,") != std::string::npos) {
      EXPECT_NE(line.find(",pass,"), std::string::npos);
    }
    if (line.find(",epic[dpm],") != std::string::npos) {
      EXPECT_NE(line.find(",fail,"), std::string::npos);
    }
  }
}

TEST_F(Cli, SearchDpmExhausted) {
  EXPECT_EQ(run({"search-dpm", "--instances", "3", "--private-values", "--out", out()}),
            kExitSearchExhausted);
}

}  // namespace
}  // namespace matrix_mech
