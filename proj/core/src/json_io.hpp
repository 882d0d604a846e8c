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

// Internal JSON plumbing shared by the core translation units. nlohmann's
// default object is key-sorted, which gives canonical key order for free;
// dump() renders shortest round-trip floats and plain integers.

#pragma once

#include <string>

#include "json.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/scalar.hpp"

namespace sbforge::jio {

using json = nlohmann::json;

inline std::string canon(const json& j) { return j.dump(); }

inline json parse_or_throw(std::string_view text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::MalformedJson, std::string(what));
  return j;
}

inline Scalar scalar_from_json(const json& j) {
  if (j.is_boolean()) return Scalar(j.get<bool>());
  if (j.is_number_integer() || j.is_number_unsigned()) return Scalar(j.get<int64_t>());
  if (j.is_number_float()) return Scalar(j.get<double>());
  if (j.is_string()) return Scalar(j.get<std::string>());
  throw Error(ErrorKind::MalformedJson, "expected scalar, got " + std::string(j.type_name()));
}

inline json scalar_to_json(const Scalar& v) {
  switch (v.kind()) {
    case Scalar::Kind::Bool:
      return v.as_bool_raw();
    case Scalar::Kind::Int:
      return v.as_int_raw();
    case Scalar::Kind::Float: {
      double d = v.as_float_raw();
      // JSON has no Infinity/NaN; fall back to the display strings.
      if (!std::isfinite(d)) return v.to_display_string();
      return d;
    }
    case Scalar::Kind::Str:
      return v.as_str_raw();
  }
  return nullptr;
}

inline const json& member(const json& j, const char* key, const char* ctx) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::MalformedJson, std::string(ctx) + ": missing \"" + key + "\"");
  }
  return *it;
}

}  // namespace sbforge::jio
