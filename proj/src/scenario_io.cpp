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

#include "matrix_mech/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace matrix_mech {

namespace {

enum class Section { kNone, kAgents, kTypes, kValuations, kTransitions, kParams };

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream is{std::string(s)};
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

class LineParser {
 public:
  explicit LineParser(int line) : line_(line) {}

  [[noreturn]] void fail(ScenarioErrc code, const std::string& what) const {
    throw ScenarioError(code, "line " + std::to_string(line_) + ": " + what);
  }

  int integer(std::string_view s, const char* what) const {
    int value = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc() || ptr != end) {
      fail(ScenarioErrc::kParse,
           std::string("expected integer ") + what + ", got '" +
               std::string(s) + "'");
    }
    return value;
  }

  double real(std::string_view s, const char* what) const {
    const std::string text(s);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (text.empty() || used != text.size()) {
      fail(ScenarioErrc::kParse,
           std::string("expected number for ") + what + ", got '" + text + "'");
    }
    return value;
  }

  std::vector<int> members(std::string_view s) const {
    s = trim(s);
    if (!s.empty() && s.front() == '{') {
      if (s.back() != '}') fail(ScenarioErrc::kParse, "unbalanced '{'");
      s = s.substr(1, s.size() - 2);
    }
    std::vector<int> out;
    for (const auto& w : words(s)) out.push_back(integer(w, "agent index"));
    return out;
  }

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace

RawScenario parse_scenario_text(std::string_view text) {
  RawScenario raw;
  Section section = Section::kNone;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const LineParser p(line_no);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') p.fail(ScenarioErrc::kParse, "bad section header");
      const auto name = line.substr(1, line.size() - 2);
      if (name == "agents") {
        section = Section::kAgents;
      } else if (name == "types") {
        section = Section::kTypes;
      } else if (name == "valuations") {
        section = Section::kValuations;
      } else if (name == "transitions") {
        section = Section::kTransitions;
      } else if (name == "params") {
        section = Section::kParams;
      } else {
        p.fail(ScenarioErrc::kUnknownKey,
               "unknown section [" + std::string(name) + "]");
      }
      continue;
    }

    switch (section) {
      case Section::kNone:
        p.fail(ScenarioErrc::kParse, "entry before any section header");

      case Section::kAgents:
      case Section::kTypes:
      case Section::kParams: {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
          p.fail(ScenarioErrc::kParse, "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) {
          p.fail(ScenarioErrc::kParse,
                 "missing value for '" + std::string(key) + "'");
        }
        if (section == Section::kAgents) {
          if (key != "count") {
            p.fail(ScenarioErrc::kUnknownKey,
                   "unknown key '" + std::string(key) + "' in [agents]");
          }
          if (raw.agent_count) p.fail(ScenarioErrc::kDuplicateEntry, "count");
          raw.agent_count = p.integer(value, "agent count");
        } else if (section == Section::kTypes) {
          const int agent = p.integer(key, "agent index");
          if (agent < 0 || agent >= kMaxAgents) {
            p.fail(ScenarioErrc::kInvalidReference, "agent index out of range");
          }
          if (raw.type_labels.size() <= static_cast<std::size_t>(agent)) {
            raw.type_labels.resize(static_cast<std::size_t>(agent) + 1);
          }
          if (raw.type_labels[agent]) {
            p.fail(ScenarioErrc::kDuplicateEntry,
                   "types for agent " + std::to_string(agent));
          }
          raw.type_labels[agent] = words(value);
        } else {
          auto once = [&](bool present) {
            if (present) {
              p.fail(ScenarioErrc::kDuplicateEntry,
                     "parameter '" + std::string(key) + "'");
            }
          };
          if (key == "delta") {
            once(raw.delta.has_value());
            raw.delta = p.real(value, "delta");
          } else if (key == "penalty") {
            once(raw.penalty.has_value());
            raw.penalty = std::string(value);
          } else if (key == "bound") {
            once(raw.bound.has_value());
            raw.bound = p.real(value, "bound");
          } else if (key == "owner") {
            once(raw.owner.has_value());
            raw.owner = p.integer(value, "owner");
          } else if (key == "const_price") {
            once(raw.const_price.has_value());
            raw.const_price = p.real(value, "const_price");
          } else {
            p.fail(ScenarioErrc::kUnknownKey,
                   "unknown key '" + std::string(key) + "' in [params]");
          }
        }
        break;
      }

      case Section::kValuations: {
        const auto fields = split(line, ',');
        if (fields.size() != 4) {
          p.fail(ScenarioErrc::kParse,
                 "valuation needs 4 fields: agent, members, types, value");
        }
        RawValuation v;
        v.agent = p.integer(fields[0], "agent");
        v.members = p.members(fields[1]);
        for (auto& w : words(fields[2])) v.types.push_back(std::move(w));
        v.value = p.real(fields[3], "valuation");
        v.line = p.line();
        raw.valuations.push_back(std::move(v));
        break;
      }

      case Section::kTransitions: {
        const auto fields = split(line, ',');
        if (fields.size() != 5) {
          p.fail(ScenarioErrc::kParse,
                 "transition needs 5 fields: agent, selector, from, to, prob");
        }
        RawTransition t;
        t.agent = p.integer(fields[0], "agent");
        if (fields[1] == "selected") {
          t.selector = RawTransition::Selector::kSelected;
        } else if (fields[1] == "unselected") {
          t.selector = RawTransition::Selector::kUnselected;
        } else {
          t.selector = RawTransition::Selector::kExplicit;
          t.members = p.members(fields[1]);
        }
        t.from = std::string(fields[2]);
        t.to = std::string(fields[3]);
        if (t.from.empty() || t.to.empty()) {
          p.fail(ScenarioErrc::kParse, "empty type label");
        }
        t.prob = p.real(fields[4], "probability");
        t.line = p.line();
        raw.transitions.push_back(std::move(t));
        break;
      }
    }
  }
  return raw;
}

Scenario load_scenario(std::string_view text) {
  return validate_scenario(parse_scenario_text(text));
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError(ScenarioErrc::kParse, "cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str());
}

std::string write_scenario_text(const Scenario& scenario) {
  const auto& types = scenario.types();
  const int n = scenario.agents();
  std::ostringstream os;
  os.precision(17);

  os << "[agents]\ncount = " << n << "\n\n[types]\n";
  for (int i = 0; i < n; ++i) {
    os << i << " =";
    for (int c = 0; c < types.size(i); ++c) os << ' ' << types.label(i, c);
    os << '\n';
  }

  os << "\n[valuations]\n";
  for (const Allocation a : enumerate_allocations(n)) {
    if (a.empty()) continue;
    const auto members = a.members();
    std::string member_text;
    for (int m : members) {
      if (!member_text.empty()) member_text += ' ';
      member_text += std::to_string(m);
    }
    for (int agent : members) {
      const auto table = scenario.valuation_table(agent, a);
      for (std::size_t cell = 0; cell < table.size(); ++cell) {
        // Decode the restricted index, last member fastest.
        std::vector<int> codes(members.size());
        std::size_t rest = cell;
        for (std::size_t k = members.size(); k-- > 0;) {
          const auto width = static_cast<std::size_t>(types.size(members[k]));
          codes[k] = static_cast<int>(rest % width);
          rest /= width;
        }
        os << agent << ", " << member_text << ",";
        for (std::size_t k = 0; k < members.size(); ++k) {
          os << ' ' << types.label(members[k], codes[k]);
        }
        os << ", " << table[cell] << '\n';
      }
    }
  }

  os << "\n[transitions]\n";
  const auto allocations = enumerate_allocations(n);
  for (int i = 0; i < n; ++i) {
    // Use the membership shorthand when the kernel depends on membership only.
    const auto selected = scenario.transition_kernel(i, Allocation(1u << i));
    const auto unselected = scenario.transition_kernel(i, Allocation(0));
    bool membership_only = true;
    for (const Allocation a : allocations) {
      const auto ref = a.contains(i) ? selected : unselected;
      const auto k = scenario.transition_kernel(i, a);
      if (!std::equal(k.begin(), k.end(), ref.begin())) {
        membership_only = false;
        break;
      }
    }
    const auto width = types.size(i);
    auto emit = [&](std::span<const double> kernel, const std::string& sel) {
      for (int from = 0; from < width; ++from) {
        for (int to = 0; to < width; ++to) {
          const double p = kernel[static_cast<std::size_t>(from * width + to)];
          if (p == 0.0) continue;
          os << i << ", " << sel << ", " << types.label(i, from) << ", "
             << types.label(i, to) << ", " << p << '\n';
        }
      }
    };
    if (membership_only) {
      emit(selected, "selected");
      emit(unselected, "unselected");
    } else {
      for (const Allocation a : allocations) {
        emit(scenario.transition_kernel(i, a), a.to_string());
      }
    }
  }

  os << "\n[params]\ndelta = " << scenario.discount()
     << "\npenalty = " << scenario.penalty().to_string()
     << "\nowner = " << scenario.owner()
     << "\nconst_price = " << scenario.const_price() << '\n';
  return os.str();
}

}  // namespace matrix_mech
