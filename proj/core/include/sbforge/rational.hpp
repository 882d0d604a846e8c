// Copyright 2026 The sbforge Authors.
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

#include <cstdint>
#include <string>

namespace sbforge {

/// Exact non-negative rational, used for the pass/fail threshold
/// comparisons (p >= theta_pass, p <= theta_fail). Keeping these exact
/// avoids float edge cases like 4.5/5 differing across platforms.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  static Rational of(int64_t n, int64_t d);

  /// Parses a plain decimal string ("0.9", "1", "0.05"). Throws
  /// std::invalid_argument on anything else.
  static Rational from_decimal(const std::string& text);

  /// Exact comparisons via 128-bit cross-multiplication.
  bool operator==(const Rational& o) const;
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return *this < o || *this == o; }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return o <= *this; }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_decimal() const;
};

}  // namespace sbforge
