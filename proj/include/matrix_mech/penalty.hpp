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

#include <string>
#include <string_view>

namespace matrix_mech {

/// Consistency penalty g(x, l) charged on a stage-two value report x against
/// the value l implied by the stage-one reports. Non-negative, zero exactly
/// when x == l.
class PenaltySpec {
 public:
  enum class Kind { kQuadratic, kAbsolute, kScaledQuadratic };

  PenaltySpec() = default;

  static PenaltySpec quadratic() { return PenaltySpec(Kind::kQuadratic, 1.0); }
  static PenaltySpec absolute() { return PenaltySpec(Kind::kAbsolute, 1.0); }
  /// Throws std::invalid_argument unless scale > 0 and finite.
  static PenaltySpec scaled_quadratic(double scale);

  /// Accepts "quadratic", "absolute" or "scaled:C".
  static PenaltySpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }

  double operator()(double report, double consistent) const {
    const double d = report - consistent;
    switch (kind_) {
      case Kind::kAbsolute:
        return d < 0 ? -d : d;
      case Kind::kScaledQuadratic:
        return scale_ * d * d;
      case Kind::kQuadratic:
        break;
    }
    return d * d;
  }

  std::string to_string() const;

  bool operator==(const PenaltySpec&) const = default;

 private:
  PenaltySpec(Kind kind, double scale) : kind_(kind), scale_(scale) {}

  Kind kind_ = Kind::kQuadratic;
  double scale_ = 1.0;
};

}  // namespace matrix_mech
