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

#include <optional>
#include <string>
#include <string_view>

#include "sbforge/project_ir.hpp"

namespace sbforge {

/// Canonical trigger vocabulary:
///   green_flag | key:<name> | click:<sprite-name> | broadcast:<message> |
///   clone_start
/// Canonical tokens are lowercase throughout.
struct TriggerToken {
  enum class Kind { GreenFlag, Key, Click, Broadcast, CloneStart };
  Kind kind = Kind::GreenFlag;
  std::string param;  // lowercased key / sprite name / message

  std::string to_string() const;
  /// Strict grammar parse of an already-canonical token (case-folded).
  static std::optional<TriggerToken> parse(std::string_view text);

  bool operator==(const TriggerToken&) const = default;
};

/// Whether the token corresponds to an event hook the project actually
/// has (a matching hat; sprite/message names compared case-insensitively).
bool trigger_resolvable(const TriggerToken& token, const ProjectIR& p);

}  // namespace sbforge
