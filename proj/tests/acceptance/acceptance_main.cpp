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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "matrix_mech/random_scenario.hpp"
#include "matrix_mech/report.hpp"
#include "matrix_mech/scenario_io.hpp"
#include "matrix_mech/simulator.hpp"
#include "matrix_mech/verifier.hpp"
#include "matrix_mech/welfare.hpp"

namespace mm = matrix_mech;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

struct Solved {
  mm::Scenario scenario;
  mm::MechanismTables tables;
};

// Joint-enumeration expectation of a full-space table.
double expectation(const mm::Scenario& s, const std::vector<double>& w,
                   const mm::Profile& theta, mm::Allocation a) {
  const auto joint = mm::joint_transition(s, theta, a);
  double e = 0.0;
  for (std::size_t k = 0; k < joint.size(); ++k) e += joint[k] * w[k];
  return e;
}

void solver_correctness(const std::vector<mm::Scenario>& suite) {
  const auto start = Clock::now();
  const auto s1 = mm::load_scenario_file(std::string(MATRIX_MECH_TEST_DATA) +
                                         "/s1.scenario");
  const auto t1 = mm::solve_tables(s1);
  const double w = t1.welfare.values[0];
  const double w0 = t1.marginal[0].values[0];
  const double w1 = t1.marginal[1].values[0];
  bool pass = std::abs(w - 3.0) <= 1e-8 && std::abs(w0) <= 1e-8 &&
              std::abs(w1 - 2.0) <= 1e-8;
  double worst_excess = -1e300;
  for (const auto& s : suite) {
    const auto table = mm::solve_welfare(s);
    const auto oracle = mm::truncated_welfare_oracle(s, 50);
    const double bound = std::pow(s.discount(), 50) * s.agents() * s.bound() /
                             (1 - s.discount()) +
                         1e-8;
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      worst_excess =
          std::max(worst_excess, std::abs(table.values[k] - oracle[k]) - bound);
    }
  }
  const double elapsed = seconds_since(start);
  pass = pass && worst_excess <= 0.0 && elapsed < 10.0;
  verdict(1, pass,
          fmt("S1 W=%.12g W-0=%.3g W-1=%.12g; ", w, w0, w1) +
              fmt("max oracle gap minus bound %.3g over 100 scenarios, %.2fs",
                  worst_excess, elapsed));
}

void epic(const std::vector<Solved>& solved) {
  const auto start = Clock::now();
  double worst = -1e300;
  bool pass = true;
  for (const auto& x : solved) {
    const auto r = mm::check_epic(x.scenario, x.tables);
    worst = std::max(worst, r.worst_value);
    pass = pass && r.pass;
  }
  const double elapsed = seconds_since(start);
  verdict(2, pass && worst <= 1e-7 && elapsed < 60.0,
          fmt("max deviation gain %.3g (tol 1e-7), %.2fs", worst, elapsed));
}

void strict_stage_two(const std::vector<Solved>& solved) {
  double worst_rel = 0.0;
  double min_gap = 1e300;
  double max_ablated = 0.0;
  std::size_t cases = 0;
  for (const auto& x : solved) {
    for (const auto& g : mm::stage_two_gaps(x.scenario, x.tables)) {
      ++cases;
      worst_rel = std::max(worst_rel, std::abs(g.gap - g.penalty) / g.penalty);
      min_gap = std::min(min_gap, g.gap);
    }
    mm::CheckOptions ablated;
    ablated.mechanism.ablate_penalty = true;
    for (const auto& g : mm::stage_two_gaps(x.scenario, x.tables, ablated)) {
      max_ablated = std::max(max_ablated, std::abs(g.gap));
    }
  }
  verdict(3, worst_rel <= 1e-9 && min_gap > 0.0 && max_ablated == 0.0,
          fmt("%.0f off-diagonal reports, max relative gap error %.3g, "
              "min gap %.3g; ",
              static_cast<double>(cases), worst_rel, min_gap) +
              fmt("ablated max |gap| %.3g", max_ablated));
}

void epir(const std::vector<Solved>& solved) {
  double min_utility = 1e300;
  double worst_identity = 0.0;
  const mm::MechanismConfig matrix;
  for (const auto& x : solved) {
    const auto& s = x.scenario;
    const auto r = mm::check_epir(s, x.tables);
    min_utility = std::min(min_utility, r.worst_value);
    for (int i = 0; i < s.agents(); ++i) {
      // Utility of truthful play from policy evaluation of the transfers.
      const auto u = mm::truthful_value_function(s, x.tables, matrix, i);
      for (const auto& theta : mm::enumerate_states(s)) {
        const auto k = s.types().encode(theta);
        const double identity = x.tables.welfare.values[k] -
                                x.tables.marginal[i].at(s.types(), theta);
        worst_identity = std::max(worst_identity, std::abs(u[k] - identity));
      }
    }
  }
  verdict(4, min_utility >= -1e-7 && worst_identity <= 4e-9,
          fmt("min truthful utility %.6g (>= -1e-7), max |U - (W - W-i)| %.3g "
              "(<= 4e-9)",
              min_utility, worst_identity));
}

void dpm_separation() {
  const auto start = Clock::now();
  const auto found = mm::find_dpm_counterexample();
  bool pass = found.has_value();
  std::string detail;
  if (found) {
    const auto& w = found->dpm;
    const mm::MechanismConfig dpm{mm::MechanismKind::kDpm};
    const double replay =
        mm::exact_deviation_utility(found->scenario, found->tables, w.profile,
                                    w.agent, w.type_report, w.value_report, dpm) -
        mm::exact_deviation_utility(found->scenario, found->tables, w.profile,
                                    w.agent, w.profile[w.agent], 0.0, dpm);
    pass = w.value > 1e-6 && found->matrix_worst_gain <= 1e-7 &&
           std::abs(replay - w.value) <= 1e-9;
    detail = fmt("witness at instance %.0f: DPM gain %.6g, MATRIX worst %.3g; ",
                 static_cast<double>(found->instance), w.value,
                 found->matrix_worst_gain);
  } else {
    detail = "no witness in 1000 instances; ";
  }

  mm::RandomScenarioConfig cfg;
  cfg.private_values = true;
  const auto suite = mm::random_suite(mm::kDefaultSuiteSeed + 1, 100, cfg);
  std::size_t mismatches = 0;
  std::size_t epic_failures = 0;
  for (const auto& s : suite) {
    const auto tables = mm::solve_tables(s);
    const auto states = mm::enumerate_states(s);
    for (const auto& truth : states) {
      for (const auto& reported : states) {
        // Others report their true values; agent i reports the value
        // consistent with its own type report.
        const auto a = mm::allocate(s, tables, reported);
        const auto d = mm::dpm_payment(s, tables, reported);
        for (int i = 0; i < s.agents(); ++i) {
          bool others_truthful = true;
          for (int j = 0; j < s.agents(); ++j)
            if (j != i && truth[j] != reported[j]) others_truthful = false;
          if (!others_truthful) continue;
          auto values = mm::stage_values(s, a, truth);
          values[i] = mm::consistent_value(s, i, a, reported);
          const auto m = mm::matrix_payment(s, tables, reported, values);
          if (m[i] != d[i]) ++mismatches;
        }
      }
    }
    mm::CheckOptions options;
    if (!mm::check_epic(s, tables, options).pass) ++epic_failures;
    options.mechanism.kind = mm::MechanismKind::kDpm;
    if (!mm::check_epic(s, tables, options).pass) ++epic_failures;
  }
  pass = pass && mismatches == 0 && epic_failures == 0;
  verdict(5, pass,
          detail + fmt("private values: %.0f payment mismatches, %.0f EPIC "
                       "failures over 100 instances, %.2fs",
                       static_cast<double>(mismatches),
                       static_cast<double>(epic_failures),
                       seconds_since(start)));
}

void independence(const std::vector<Solved>& solved) {
  double worst = 0.0;
  for (const auto& x : solved) {
    const auto& s = x.scenario;
    const auto& types = s.types();
    const auto states = mm::enumerate_states(s);
    for (int i = 0; i < s.agents(); ++i) {
      std::vector<double> full(s.state_count());
      for (const auto& theta : states)
        full[types.encode(theta)] = x.tables.marginal[i].at(types, theta);
      for (const auto a : mm::enumerate_allocations(s.agents(), i)) {
        for (const auto& theta : states) {
          mm::Profile other = theta;
          const double base = expectation(s, full, theta, a);
          for (int c = 0; c < types.size(i); ++c) {
            other[i] = c;
            worst = std::max(worst,
                             std::abs(expectation(s, full, other, a) - base));
          }
        }
      }
    }
  }
  verdict(6, worst <= 1e-10,
          fmt("max spread of E[W-i] over own type %.3g (<= 1e-10)", worst));
}

void monte_carlo(const std::vector<Solved>& solved) {
  std::mt19937_64 pick(20260107);
  double worst_z = 0.0;
  bool pass = true;
  const std::size_t episodes = 20000;
  for (int trial = 0; trial < 10; ++trial) {
    const auto& x = solved[pick() % solved.size()];
    const auto& s = x.scenario;
    const auto states = mm::enumerate_states(s);
    const auto& theta = states[pick() % states.size()];
    const int agent = static_cast<int>(pick() % s.agents());
    const double pmax = mm::max_truthful_payment(s, x.tables, {});
    const int horizon = mm::default_horizon(s, pmax, 1e-6);
    const auto est = mm::monte_carlo_utility(
        s, x.tables, {}, mm::StrategyProfile::truthful(), theta, agent, horizon,
        episodes, 1000 + trial);
    const double exact = mm::exact_truthful_utility(s, x.tables, theta, agent);
    const double diff = std::abs(est.mean - exact) - est.truncation_bound;
    if (est.standard_error > 0.0) {
      worst_z = std::max(worst_z, diff / est.standard_error);
      pass = pass && diff <= 4 * est.standard_error;
    } else {
      pass = pass && diff <= 1e-9;
    }
  }

  // Byte-level determinism of the trajectory export and the estimate.
  const auto& x = solved.front();
  const auto theta = x.scenario.types().decode(0);
  auto dump = [&] {
    std::ostringstream os;
    const auto traj = mm::simulate_episode(x.scenario, x.tables, {},
                                           mm::StrategyProfile::truthful(),
                                           theta, 40, 42);
    mm::write_trajectory_rows(os, x.scenario, traj);
    const auto est = mm::monte_carlo_utility(x.scenario, x.tables, {},
                                             mm::StrategyProfile::truthful(),
                                             theta, 0, 40, 5000, 42);
    os << mm::format_real(est.mean) << mm::format_real(est.standard_error);
    return os.str();
  };
  const bool deterministic = dump() == dump();
  verdict(7, pass && deterministic,
          fmt("10 triples x %.0f episodes, max |z| %.3g (<= 4); ",
              static_cast<double>(episodes), worst_z) +
              (deterministic ? "same seed byte-identical"
                             : "same seed output differs"));
}

void monotonicity(const std::vector<Solved>& solved) {
  double worst = 1e300;
  for (const auto& x : solved) {
    const auto& s = x.scenario;
    for (const auto& theta : mm::enumerate_states(s)) {
      const double w = x.tables.welfare.values[s.types().encode(theta)];
      for (int i = 0; i < s.agents(); ++i) {
        worst = std::min(worst, w - x.tables.marginal[i].at(s.types(), theta));
      }
    }
  }
  verdict(8, worst >= -2e-9,
          fmt("min W - W-i %.6g (>= -2e-9)", worst));
}

}  // namespace

int main() {
  const auto suite = mm::default_suite();
  solver_correctness(suite);

  std::vector<Solved> solved;
  solved.reserve(suite.size());
  for (const auto& s : suite) solved.push_back({s, mm::solve_tables(s)});

  epic(solved);
  strict_stage_two(solved);
  epir(solved);
  dpm_separation();
  independence(solved);
  monte_carlo(solved);
  monotonicity(solved);

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
