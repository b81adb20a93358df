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

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "matrix_mech/scenario.hpp"

namespace matrix_mech {

/// Parses the line-oriented scenario format (see docs/scenario-format.md).
/// Syntax problems and unknown sections or keys throw ScenarioError; no
/// semantic checks are done here.
RawScenario parse_scenario_text(std::string_view text);

/// parse_scenario_text followed by validate_scenario.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Canonical text form. Reloading it reproduces every table bit-for-bit.
std::string write_scenario_text(const Scenario& scenario);

}  // namespace matrix_mech
