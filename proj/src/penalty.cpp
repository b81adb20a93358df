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

#include "matrix_mech/penalty.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace matrix_mech {

PenaltySpec PenaltySpec::scaled_quadratic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("penalty scale must be positive and finite");
  }
  return PenaltySpec(Kind::kScaledQuadratic, scale);
}

PenaltySpec PenaltySpec::parse(std::string_view text) {
  if (text == "quadratic") return quadratic();
  if (text == "absolute") return absolute();
  constexpr std::string_view kScaled = "scaled:";
  if (text.substr(0, kScaled.size()) == kScaled) {
    const std::string number(text.substr(kScaled.size()));
    std::size_t used = 0;
    double scale = 0.0;
    try {
      scale = std::stod(number, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != number.size()) {
      throw std::invalid_argument("bad penalty scale: '" + number + "'");
    }
    return scaled_quadratic(scale);
  }
  throw std::invalid_argument("unknown penalty '" + std::string(text) +
                              "' (expected quadratic, absolute or scaled:C)");
}

std::string PenaltySpec::to_string() const {
  switch (kind_) {
    case Kind::kAbsolute:
      return "absolute";
    case Kind::kScaledQuadratic: {
      std::ostringstream os;
      os.precision(17);
      os << "scaled:" << scale_;
      return os.str();
    }
    case Kind::kQuadratic:
      break;
  }
  return "quadratic";
}

}  // namespace matrix_mech
