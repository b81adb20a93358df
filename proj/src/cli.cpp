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

#include "matrix_mech/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "matrix_mech/mechanism.hpp"
#include "matrix_mech/random_scenario.hpp"
#include "matrix_mech/report.hpp"
#include "matrix_mech/scenario_io.hpp"
#include "matrix_mech/simulator.hpp"
#include "matrix_mech/verifier.hpp"
#include "matrix_mech/welfare.hpp"

namespace matrix_mech {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::vector<std::string> scenarios;
  std::string out_dir = ".";
  double tol = 1e-9;
  std::optional<int> horizon;
  std::size_t episodes = 1000;
  std::uint64_t seed = 42;
  std::vector<std::string> mechanisms;
  std::optional<std::string> penalty;
  bool ablate_penalty = false;
  int grid_steps = 5;
  std::optional<std::string> state;
  std::optional<std::string> deviation;
  std::size_t instances = 1000;
  std::size_t count = 100;
  bool private_values = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Files named directly, plus every *.scenario file (sorted) inside any
/// directory named.
std::vector<fs::path> expand_scenarios(const std::vector<std::string>& names) {
  std::vector<fs::path> out;
  for (const auto& name : names) {
    const fs::path p(name);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".scenario") {
          found.push_back(entry.path());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw UsageError("no scenario files given");
  return out;
}

Scenario load(const fs::path& path, const RunConfig& config) {
  Scenario scenario = load_scenario_file(path.string());
  if (config.penalty) {
    try {
      scenario = scenario.with_penalty(PenaltySpec::parse(*config.penalty));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--penalty: ") + e.what());
    }
  }
  return scenario;
}

std::ofstream open_out(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.out_dir);
  std::ofstream os(fs::path(config.out_dir) / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + name);
  return os;
}

std::vector<MechanismKind> mechanisms_of(const RunConfig& config,
                                         std::vector<MechanismKind> fallback) {
  if (config.mechanisms.empty()) return fallback;
  std::vector<MechanismKind> out;
  for (const auto& m : config.mechanisms) out.push_back(parse_mechanism(m));
  return out;
}

Profile parse_state(const Scenario& scenario, const std::string& text) {
  std::istringstream is(text);
  Profile profile;
  std::string word;
  for (int i = 0; i < scenario.agents(); ++i) {
    if (!(is >> word)) throw UsageError("--state lists too few types");
    const auto code = scenario.types().code(i, word);
    if (!code) throw UsageError("--state: unknown type '" + word + "'");
    profile.push_back(*code);
  }
  if (is >> word) throw UsageError("--state lists too many types");
  return profile;
}

struct DeviationFlag {
  int agent = 0;
  int round = 0;
  int type_report = 0;
  double value_offset = 0.0;
};

/// AGENT:ROUND:TYPE_LABEL:VALUE_OFFSET
DeviationFlag parse_deviation(const Scenario& scenario,
                              const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream is(text);
  for (std::string part; std::getline(is, part, ':');) parts.push_back(part);
  if (parts.size() != 4) {
    throw UsageError("--deviation expects AGENT:ROUND:TYPE:VALUE_OFFSET");
  }
  DeviationFlag flag;
  try {
    flag.agent = std::stoi(parts[0]);
    flag.round = std::stoi(parts[1]);
    flag.value_offset = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw UsageError("--deviation: bad number in '" + text + "'");
  }
  if (flag.agent < 0 || flag.agent >= scenario.agents()) {
    throw UsageError("--deviation: agent out of range");
  }
  if (flag.round < 0) throw UsageError("--deviation: negative round");
  const auto code = scenario.types().code(flag.agent, parts[2]);
  if (!code) throw UsageError("--deviation: unknown type '" + parts[2] + "'");
  flag.type_report = *code;
  return flag;
}

SolverOptions solver_options(const RunConfig& config) {
  SolverOptions options;
  options.tol = config.tol;
  return options;
}

std::vector<ViolationReport> verify_all(const Scenario& scenario,
                                        const MechanismTables& tables,
                                        const RunConfig& config) {
  CheckOptions options;
  options.mechanism.ablate_penalty = config.ablate_penalty;
  options.grid_steps = config.grid_steps;
  CheckOptions strict = options;
  strict.tol = 1e-9;
  return {check_epic(scenario, tables, options),
          check_strict_stage2(scenario, tables, strict),
          check_epir(scenario, tables), check_efficiency(scenario, tables)};
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const auto paths = expand_scenarios(config.scenarios);
  if (paths.size() != 1) throw UsageError("solve takes exactly one scenario");
  const Scenario scenario = load(paths.front(), config);
  const MechanismTables tables = solve_tables(scenario, solver_options(config));

  {
    auto os = open_out(config, "welfare.csv");
    write_welfare_csv(os, scenario, tables.welfare, tables.policy);
  }
  for (const auto& m : tables.marginal) {
    auto os = open_out(config, "marginal_" + std::to_string(m.agent) + ".csv");
    write_marginal_csv(os, scenario, m);
  }
  {
    auto os = open_out(config, "solve_summary.csv");
    write_solve_summary(os, tables);
  }
  // Wall time varies run to run, so it goes to the console only.
  out << "table,iterations,residual,wall_seconds\n";
  out << "W," << tables.welfare.iterations << ','
      << format_real(tables.welfare.residual) << ','
      << tables.welfare.wall_seconds << '\n';
  for (const auto& m : tables.marginal) {
    out << "W_-" << m.agent << ',' << m.iterations << ','
        << format_real(m.residual) << ',' << m.wall_seconds << '\n';
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& config, std::ostream& out) {
  bool all_pass = true;
  std::ostringstream rows;
  write_verdict_header(rows);
  for (const auto& path : expand_scenarios(config.scenarios)) {
    const Scenario scenario = load(path, config);
    const MechanismTables tables =
        solve_tables(scenario, solver_options(config));
    for (const auto& report : verify_all(scenario, tables, config)) {
      write_verdict_row(rows, path.stem().string(), scenario, report);
      all_pass = all_pass && report.pass;
    }
  }
  auto os = open_out(config, "verdicts.csv");
  os << rows.str();
  out << rows.str();
  return all_pass ? kExitOk : kExitPropertyFailed;
}

Profile initial_state(const Scenario& scenario, const RunConfig& config) {
  if (config.state) return parse_state(scenario, *config.state);
  return scenario.types().decode(0);
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
  const auto kinds = mechanisms_of(
      config, {MechanismKind::kMatrix, MechanismKind::kDpm, MechanismKind::kConst});
  bool matrix_pass = true;
  std::ostringstream verdicts;
  std::ostringstream budgets;
  write_verdict_header(verdicts);
  write_budget_header(budgets);
  for (const auto& path : expand_scenarios(config.scenarios)) {
    const auto id = path.stem().string();
    const Scenario scenario = load(path, config);
    const MechanismTables tables =
        solve_tables(scenario, solver_options(config));
    const Profile start = initial_state(scenario, config);
    for (const MechanismKind kind : kinds) {
      CheckOptions options;
      options.mechanism.kind = kind;
      options.grid_steps = config.grid_steps;
      const auto epic = check_epic(scenario, tables, options);
      const auto epir = check_epir(scenario, tables, options.mechanism);
      write_verdict_row(verdicts, id, scenario, epic);
      write_verdict_row(verdicts, id, scenario, epir);
      if (kind == MechanismKind::kMatrix) {
        matrix_pass = matrix_pass && epic.pass && epir.pass;
      }
      const int horizon = config.horizon.value_or(default_horizon(
          scenario, max_truthful_payment(scenario, tables, options.mechanism)));
      const auto trajectory = simulate_episode(
          scenario, tables, options.mechanism, StrategyProfile::truthful(),
          start, horizon, episode_seed(config.seed, 0));
      write_budget_row(budgets, id, kind, budget_metrics(trajectory));
    }
  }
  {
    auto os = open_out(config, "compare.csv");
    os << verdicts.str();
  }
  {
    auto os = open_out(config, "budget.csv");
    os << budgets.str();
  }
  out << verdicts.str() << '\n' << budgets.str();
  return matrix_pass ? kExitOk : kExitPropertyFailed;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const auto paths = expand_scenarios(config.scenarios);
  if (paths.size() != 1) throw UsageError("simulate takes exactly one scenario");
  const auto id = paths.front().stem().string();
  const Scenario scenario = load(paths.front(), config);
  const MechanismTables tables = solve_tables(scenario, solver_options(config));
  const auto kinds = mechanisms_of(config, {MechanismKind::kMatrix});
  if (kinds.size() != 1) throw UsageError("simulate takes one --mechanism");
  MechanismConfig mechanism;
  mechanism.kind = kinds.front();
  mechanism.ablate_penalty = config.ablate_penalty;
  const Profile start = initial_state(scenario, config);

  StrategyProfile strategies;
  std::optional<DeviationFlag> deviation;
  if (config.deviation) {
    deviation = parse_deviation(scenario, *config.deviation);
    AgentStrategy s;
    const int report = deviation->type_report;
    const double offset = deviation->value_offset;
    s.report_type = [report](int) { return report; };
    s.report_value = [offset](double v, int) { return v + offset; };
    strategies = StrategyProfile::single_deviation(
        scenario.agents(), deviation->agent, deviation->round, std::move(s));
  }

  const double p_max = max_truthful_payment(scenario, tables, mechanism);
  const int horizon = config.horizon.value_or(default_horizon(scenario, p_max));
  if (horizon < 1) throw UsageError("--horizon must be >= 1");
  if (config.episodes < 1) throw UsageError("--episodes must be >= 1");

  {
    auto os = open_out(config, "trajectory.csv");
    write_trajectory_header(os);
    write_trajectory_rows(os, scenario,
                          simulate_episode(scenario, tables, mechanism,
                                           strategies, start, horizon,
                                           episode_seed(config.seed, 0)));
  }

  std::ostringstream rows;
  write_utility_header(rows);
  const std::string state = scenario.types().format(start);
  for (int i = 0; i < scenario.agents(); ++i) {
    const auto estimate =
        monte_carlo_utility(scenario, tables, mechanism, strategies, start, i,
                            horizon, config.episodes, config.seed);
    double exact = std::nan("");
    const bool at_start = !deviation || deviation->round == 0;
    if (mechanism.kind != MechanismKind::kConst && at_start) {
      if (deviation && deviation->agent == i) {
        Profile reported = start;
        reported[i] = deviation->type_report;
        const Allocation a = allocate(scenario, tables, reported);
        exact = exact_deviation_utility(
            scenario, tables, start, i, deviation->type_report,
            scenario.valuation(i, a, start) + deviation->value_offset,
            mechanism);
      } else if (!deviation) {
        exact = exact_truthful_utility(scenario, tables, start, i);
      }
    } else if (mechanism.kind == MechanismKind::kConst && !deviation) {
      const auto values = truthful_value_function(scenario, tables, mechanism, i);
      exact = values[scenario.types().encode(start)];
    }
    write_utility_row(rows, id, mechanism.kind, i, state, exact, estimate);
  }
  auto os = open_out(config, "utility.csv");
  os << rows.str();
  out << "horizon," << horizon << ",truncation_bound,"
      << format_real(truncation_bound(scenario, p_max, horizon)) << '\n'
      << rows.str();
  return kExitOk;
}

int cmd_search_dpm(const RunConfig& config, std::ostream& out) {
  DpmSearchConfig search;
  search.seed = config.seed;
  search.instances = config.instances;
  search.solver = solver_options(config);
  search.generator.private_values = config.private_values;
  const auto found = find_dpm_counterexample(search);
  if (!found) {
    throw SearchBudgetExhausted("no DPM counterexample in " +
                                std::to_string(config.instances) +
                                " instances");
  }
  {
    auto os = open_out(config, "dpm_witness.scenario");
    os << write_scenario_text(found->scenario);
  }
  std::ostringstream row;
  row << "instance,dpm_gain,matrix_worst_gain,witness\n"
      << found->instance << ',' << format_real(found->dpm.value) << ','
      << format_real(found->matrix_worst_gain) << ','
      << found->dpm.describe(found->scenario) << '\n';
  auto os = open_out(config, "dpm_witness.csv");
  os << row.str();
  out << row.str();
  return kExitOk;
}

int cmd_generate(const RunConfig& config, std::ostream& out) {
  RandomScenarioConfig generator;
  generator.private_values = config.private_values;
  const auto suite = random_suite(config.seed, config.count, generator);
  for (std::size_t k = 0; k < suite.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "suite_%03zu.scenario", k);
    auto os = open_out(config, name);
    os << write_scenario_text(suite[k]);
  }
  out << "wrote " << suite.size() << " scenarios to " << config.out_dir << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Dynamic mechanism solver, simulator and verifier",
               "matrix-mech"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", config.scenarios,
                    "Scenario file or suite directory")
        ->required();
    cmd->add_option("--out", config.out_dir, "Output directory");
    cmd->add_option("--tol", config.tol, "Solver tolerance")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--penalty", config.penalty,
                    "quadratic, absolute or scaled:C");
  };

  auto* solve = app.add_subcommand("solve", "Solve W, W_-i and the policy");
  add_common(solve);

  auto* verify = app.add_subcommand("verify", "Check incentive properties");
  add_common(verify);
  verify->add_flag("--ablate-penalty", config.ablate_penalty,
                   "Drop the consistency penalty from MATRIX payments");
  verify->add_option("--grid-steps", config.grid_steps,
                     "Value-report grid half-width")
      ->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Compare mechanisms");
  add_common(compare);
  compare->add_option("--mechanism", config.mechanisms,
                      "matrix, dpm or const (repeatable)")
      ->check(CLI::IsMember({"matrix", "dpm", "const"}));
  compare->add_option("--grid-steps", config.grid_steps)
      ->check(CLI::PositiveNumber);
  compare->add_option("--horizon", config.horizon);
  compare->add_option("--seed", config.seed);
  compare->add_option("--state", config.state, "Initial type labels");

  auto* simulate = app.add_subcommand("simulate", "Simulate episodes");
  add_common(simulate);
  simulate->add_option("--mechanism", config.mechanisms)
      ->check(CLI::IsMember({"matrix", "dpm", "const"}));
  simulate->add_option("--horizon", config.horizon);
  simulate->add_option("--episodes", config.episodes);
  simulate->add_option("--seed", config.seed);
  simulate->add_option("--state", config.state, "Initial type labels");
  simulate->add_option("--deviation", config.deviation,
                       "AGENT:ROUND:TYPE:VALUE_OFFSET");
  simulate->add_flag("--ablate-penalty", config.ablate_penalty);

  auto* search = app.add_subcommand("search-dpm",
                                    "Search for a pivot-mechanism violation");
  search->add_option("--seed", config.seed);
  search->add_option("--instances", config.instances);
  search->add_option("--out", config.out_dir);
  search->add_option("--tol", config.tol)->check(CLI::PositiveNumber);
  search->add_flag("--private-values", config.private_values,
                   "Draw private-value instances only");

  auto* generate = app.add_subcommand("generate", "Write a random suite");
  generate->add_option("--seed", config.seed);
  generate->add_option("--count", config.count);
  generate->add_option("--out", config.out_dir);
  generate->add_flag("--private-values", config.private_values);

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(),
                                args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    if (solve->parsed()) return cmd_solve(config, out);
    if (verify->parsed()) return cmd_verify(config, out);
    if (compare->parsed()) return cmd_compare(config, out);
    if (simulate->parsed()) return cmd_simulate(config, out);
    if (search->parsed()) return cmd_search_dpm(config, out);
    if (generate->parsed()) return cmd_generate(config, out);
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const NonConvergence& e) {
    err << "error: NonConvergence: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const SearchBudgetExhausted& e) {
    err << "error: SearchBudgetExhausted: " << e.what() << '\n';
    return kExitSearchExhausted;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace matrix_mech
