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

#include "matrix_mech/report.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace matrix_mech {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Profile parse_labels(const Scenario& scenario, const std::string& text,
                     int excluded) {
  std::istringstream is(text);
  Profile profile(static_cast<std::size_t>(scenario.agents()), 0);
  std::string word;
  for (int i = 0; i < scenario.agents(); ++i) {
    if (i == excluded) continue;
    if (!(is >> word)) throw std::runtime_error("short state tuple: " + text);
    const auto code = scenario.types().code(i, word);
    if (!code) throw std::runtime_error("unknown type label: " + word);
    profile[i] = *code;
  }
  if (is >> word) throw std::runtime_error("long state tuple: " + text);
  return profile;
}

double parse_real(const std::string& text) {
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) throw std::runtime_error("bad number: " + text);
  return value;
}

std::string reduced_labels(const Scenario& scenario,
                           std::span<const int> profile, int excluded) {
  std::string out;
  for (int i = 0; i < scenario.agents(); ++i) {
    if (i == excluded) continue;
    if (!out.empty()) out += ' ';
    out += scenario.types().label(i, profile[i]);
  }
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value,
                                       std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buffer, end);
}

void write_welfare_csv(std::ostream& os, const Scenario& scenario,
                       const WelfareTable& welfare, const PolicyTable& policy) {
  os << "state,value,allocation\n";
  const auto& types = scenario.types();
  for (std::size_t s = 0; s < welfare.values.size(); ++s) {
    os << types.format(types.decode(s)) << ',' << format_real(welfare.values[s])
       << ',' << policy.allocation[s].to_string() << '\n';
  }
}

void write_marginal_csv(std::ostream& os, const Scenario& scenario,
                        const MarginalWelfareTable& marginal) {
  os << "state,value\n";
  // Walk the full space and emit each reduced profile once, in reduced order.
  const auto& types = scenario.types();
  std::vector<char> seen(marginal.values.size(), 0);
  for (std::size_t s = 0; s < types.profile_count(); ++s) {
    const Profile profile = types.decode(s);
    if (profile[marginal.agent] != 0) continue;
    const std::size_t r = types.encode_without(profile, marginal.agent);
    if (seen[r]) continue;
    seen[r] = 1;
    os << reduced_labels(scenario, profile, marginal.agent) << ','
       << format_real(marginal.values[r]) << '\n';
  }
}

WelfareCsv read_welfare_csv(std::istream& is, const Scenario& scenario) {
  std::string line;
  if (!std::getline(is, line) || line != "state,value,allocation") {
    throw std::runtime_error("welfare csv: bad header");
  }
  WelfareCsv out;
  out.values.assign(scenario.state_count(), 0.0);
  out.allocations.assign(scenario.state_count(), Allocation());
  std::vector<char> seen(scenario.state_count(), 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 3) throw std::runtime_error("welfare csv: bad row");
    const auto s = scenario.types().encode(parse_labels(scenario, cells[0], -1));
    out.values[s] = parse_real(cells[1]);
    std::string members = cells[2];
    if (members.size() < 2 || members.front() != '{' || members.back() != '}') {
      throw std::runtime_error("welfare csv: bad allocation " + members);
    }
    std::vector<int> ids;
    std::istringstream ms(members.substr(1, members.size() - 2));
    for (int m; ms >> m;) ids.push_back(m);
    out.allocations[s] = Allocation::from_members(ids);
    seen[s] = 1;
  }
  for (char c : seen) {
    if (!c) throw std::runtime_error("welfare csv: missing state");
  }
  return out;
}

std::vector<double> read_marginal_csv(std::istream& is,
                                      const Scenario& scenario, int agent) {
  std::string line;
  if (!std::getline(is, line) || line != "state,value") {
    throw std::runtime_error("marginal csv: bad header");
  }
  std::vector<double> out(scenario.types().reduced_count(agent), 0.0);
  std::vector<char> seen(out.size(), 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw std::runtime_error("marginal csv: bad row");
    const auto profile = parse_labels(scenario, cells[0], agent);
    const auto r = scenario.types().encode_without(profile, agent);
    out[r] = parse_real(cells[1]);
    seen[r] = 1;
  }
  for (char c : seen) {
    if (!c) throw std::runtime_error("marginal csv: missing state");
  }
  return out;
}

void write_solve_summary(std::ostream& os, const MechanismTables& tables) {
  os << "table,iterations,residual,error_bound\n";
  os << "W," << tables.welfare.iterations << ','
     << format_real(tables.welfare.residual) << ','
     << format_real(tables.welfare.error_bound) << '\n';
  for (const auto& m : tables.marginal) {
    os << "W_-" << m.agent << ',' << m.iterations << ','
       << format_real(m.residual) << ',' << format_real(m.error_bound) << '\n';
  }
}

void write_trajectory_header(std::ostream& os) {
  os << "t,agent,true_type,reported_type,allocated,true_value,reported_value,"
        "payment,penalty,utility\n";
}

void write_trajectory_rows(std::ostream& os, const Scenario& scenario,
                           const Trajectory& trajectory) {
  const auto& types = scenario.types();
  for (const auto& r : trajectory.rounds) {
    for (int i = 0; i < scenario.agents(); ++i) {
      os << r.t << ',' << i << ',' << types.label(i, r.true_profile[i]) << ','
         << types.label(i, r.reported_profile[i]) << ','
         << (r.allocation.contains(i) ? 1 : 0) << ','
         << format_real(r.true_values[i]) << ','
         << format_real(r.reported_values[i]) << ','
         << format_real(r.payments[i]) << ',' << format_real(r.penalties[i])
         << ',' << format_real(r.utilities[i]) << '\n';
    }
  }
}

void write_utility_header(std::ostream& os) {
  os << "scenario,mechanism,agent,state,exact,mc_mean,mc_stderr,episodes\n";
}

void write_utility_row(std::ostream& os, const std::string& scenario_id,
                       MechanismKind mechanism, int agent,
                       const std::string& state, double exact,
                       const UtilityEstimate& estimate) {
  os << scenario_id << ',' << to_string(mechanism) << ',' << agent << ','
     << state << ',' << format_real(exact) << ',' << format_real(estimate.mean)
     << ',' << format_real(estimate.standard_error) << ','
     << estimate.episodes << '\n';
}

void write_verdict_header(std::ostream& os) {
  os << "scenario_id,property,cases,worst_value,tolerance,verdict,witness\n";
}

void write_verdict_row(std::ostream& os, const std::string& scenario_id,
                       const Scenario& scenario, const ViolationReport& report) {
  os << scenario_id << ',' << report.property << ',' << report.cases << ','
     << format_real(report.worst_value) << ',' << format_real(report.tolerance)
     << ',' << (report.pass ? "pass" : "fail") << ','
     << (report.witness ? report.witness->describe(scenario) : std::string())
     << '\n';
}

void write_budget_header(std::ostream& os) {
  os << "scenario_id,mechanism,rounds,min,max,mean,deficit_rounds\n";
}

void write_budget_row(std::ostream& os, const std::string& scenario_id,
                      MechanismKind mechanism, const BudgetSummary& summary) {
  os << scenario_id << ',' << to_string(mechanism) << ','
     << summary.round_sums.size() << ',' << format_real(summary.min) << ','
     << format_real(summary.max) << ',' << format_real(summary.mean) << ','
     << summary.deficit_rounds.size() << '\n';
}

}  // namespace matrix_mech
