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

#include "sbforge/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "sbforge/rational.hpp"
#include "sbforge/util.hpp"

namespace sbforge {

std::string hex16(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf, 16);
}

std::string shortest_double_text(double d) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trimmed(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Full-string numeric parse; returns false for partial or empty matches.
bool parse_full_number(std::string_view s, double* out) {
  s = trimmed(s);
  if (s.empty()) return false;
  std::string tmp(s);
  const char* begin = tmp.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + tmp.size()) return false;
  *out = v;
  return true;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

double Scalar::to_number() const {
  switch (kind()) {
    case Kind::Bool:
      return as_bool_raw() ? 1.0 : 0.0;
    case Kind::Int:
      return static_cast<double>(as_int_raw());
    case Kind::Float:
      return as_float_raw();
    case Kind::Str: {
      double v = 0;
      // Non-numeric strings read as 0; arithmetic never crashes.
      return parse_full_number(as_str_raw(), &v) ? v : 0.0;
    }
  }
  return 0.0;
}

bool Scalar::to_bool() const {
  switch (kind()) {
    case Kind::Bool:
      return as_bool_raw();
    case Kind::Int:
      return as_int_raw() != 0;
    case Kind::Float: {
      double v = as_float_raw();
      return v != 0.0 && !std::isnan(v);
    }
    case Kind::Str: {
      std::string low = lowercase(as_str_raw());
      return !(low.empty() || low == "0" || low == "false");
    }
  }
  return false;
}

std::string Scalar::to_display_string() const {
  switch (kind()) {
    case Kind::Bool:
      return as_bool_raw() ? "true" : "false";
    case Kind::Int:
      return std::to_string(as_int_raw());
    case Kind::Float: {
      double v = as_float_raw();
      if (std::isnan(v)) return "NaN";
      if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
      if (v == std::trunc(v) && std::abs(v) < 9.007199254740992e15) {
        return std::to_string(static_cast<int64_t>(v));
      }
      return shortest_double_text(v);
    }
    case Kind::Str:
      return as_str_raw();
  }
  return "";
}

bool Scalar::is_numeric_like() const {
  if (kind() != Kind::Str) return true;
  double v;
  return parse_full_number(as_str_raw(), &v);
}

int Scalar::compare(const Scalar& a, const Scalar& b) {
  if (a.is_numeric_like() && b.is_numeric_like()) {
    double x = a.to_number();
    double y = b.to_number();
    if (x < y) return -1;
    if (x > y) return 1;
    return 0;
  }
  std::string x = lowercase(a.to_display_string());
  std::string y = lowercase(b.to_display_string());
  return x.compare(y);
}

bool Scalar::feature_equal(const Scalar& a, const Scalar& b) {
  if (a.kind() == Kind::Str || b.kind() == Kind::Str) {
    return a.kind() == b.kind() && a.as_str_raw() == b.as_str_raw();
  }
  if (a.kind() == Kind::Bool || b.kind() == Kind::Bool) {
    return a.kind() == b.kind() && a.as_bool_raw() == b.as_bool_raw();
  }
  if (a.kind() == Kind::Int && b.kind() == Kind::Int) {
    return a.as_int_raw() == b.as_int_raw();
  }
  double x = a.to_number();
  double y = b.to_number();
  if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= 1e-9;
}

int Scalar::canonical_cmp(const Scalar& a, const Scalar& b) {
  if (a.kind() != b.kind()) {
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  }
  switch (a.kind()) {
    case Kind::Bool:
      return static_cast<int>(a.as_bool_raw()) - static_cast<int>(b.as_bool_raw());
    case Kind::Int:
      return a.as_int_raw() < b.as_int_raw() ? -1 : (a.as_int_raw() > b.as_int_raw() ? 1 : 0);
    case Kind::Float:
      return a.as_float_raw() < b.as_float_raw() ? -1
                                                 : (a.as_float_raw() > b.as_float_raw() ? 1 : 0);
    case Kind::Str:
      return a.as_str_raw().compare(b.as_str_raw());
  }
  return 0;
}

// ---- Rational ----

Rational Rational::of(int64_t n, int64_t d) {
  if (d <= 0) throw std::invalid_argument("rational denominator must be positive");
  // normalize
  int64_t a = n < 0 ? -n : n;
  int64_t b = d;
  while (b != 0) {
    int64_t t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  return Rational{n / a, d / a};
}

Rational Rational::from_decimal(const std::string& text) {
  std::string_view s = trimmed(text);
  if (s.empty()) throw std::invalid_argument("empty decimal");
  bool neg = false;
  size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  int64_t num = 0;
  int64_t den = 1;
  bool any_digit = false;
  bool seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("bad decimal: " + std::string(s));
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw std::invalid_argument("bad decimal: " + std::string(s));
    if (num > (INT64_MAX - 9) / 10) throw std::invalid_argument("decimal too large");
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
    any_digit = true;
  }
  if (!any_digit) throw std::invalid_argument("bad decimal: " + std::string(s));
  return Rational::of(neg ? -num : num, den);
}

bool Rational::operator==(const Rational& o) const {
  return static_cast<__int128>(num) * o.den == static_cast<__int128>(o.num) * den;
}

bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

std::string Rational::to_decimal() const {
  // Shortest decimal via double round-trip is fine for display.
  return shortest_double_text(to_double());
}

}  // namespace sbforge
