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
#include <variant>

namespace sbforge {

/// The value domain of the block language: number | string | boolean.
/// Integers and floats are kept apart so serialization round-trips JSON
/// exactly (5 stays 5, 5.0 stays 5.0); all arithmetic coerces to double.
class Scalar {
 public:
  enum class Kind { Bool, Int, Float, Str };

  Scalar() : v_(int64_t{0}) {}
  Scalar(bool b) : v_(b) {}
  Scalar(int64_t i) : v_(i) {}
  Scalar(int i) : v_(int64_t{i}) {}
  Scalar(double d) : v_(d) {}
  Scalar(std::string s) : v_(std::move(s)) {}
  Scalar(const char* s) : v_(std::string(s)) {}

  Kind kind() const { return static_cast<Kind>(v_.index()); }
  bool is_number() const { return kind() == Kind::Int || kind() == Kind::Float; }

  bool as_bool_raw() const { return std::get<bool>(v_); }
  int64_t as_int_raw() const { return std::get<int64_t>(v_); }
  double as_float_raw() const { return std::get<double>(v_); }
  const std::string& as_str_raw() const { return std::get<std::string>(v_); }

  /// Casting rules of the language runtime.
  double to_number() const;
  bool to_bool() const;
  /// Renders the way the runtime displays values: integral floats print
  /// without a decimal point, non-finite values print Infinity/NaN.
  std::string to_display_string() const;

  /// True when to_number() would be a faithful reading (numbers, bools,
  /// and strings that parse fully as a number).
  bool is_numeric_like() const;

  /// Runtime ordering: numeric when both sides are numeric-like, else
  /// case-insensitive string comparison. Returns <0, 0, >0.
  static int compare(const Scalar& a, const Scalar& b);

  /// Structural equality (kind-sensitive; 5 != 5.0 != "5").
  bool operator==(const Scalar& o) const { return v_ == o.v_; }

  /// Assertion-value equality: exact for ints/bools/strings, 1e-9
  /// tolerance once a float is involved.
  static bool feature_equal(const Scalar& a, const Scalar& b);

  /// Total order over (kind, value), used only for canonical sorting.
  static int canonical_cmp(const Scalar& a, const Scalar& b);

 private:
  std::variant<bool, int64_t, double, std::string> v_;
};

/// Shortest round-trip text for a double, decimal form preferred.
std::string shortest_double_text(double d);

}  // namespace sbforge
