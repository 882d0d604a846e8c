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

#include <string>
#include <vector>

#include "sbforge/oracle.hpp"
#include "sbforge/project_ir.hpp"

namespace sbforge {

/// Machine-readable description of what a project is supposed to do:
/// event hooks a user can trigger and their observable outcomes. Never
/// contains injection-site block ids (checked when the forge emits one).
struct RefsemHook {
  std::string trigger;  // canonical trigger token
  std::vector<std::string> sprite_ids;
  std::vector<Feature> outcomes;  // expected observable effects
};

struct ReferenceSemantics {
  std::string project_goal;
  std::vector<std::pair<std::string, std::string>> roles;  // sprite id -> role text
  std::vector<RefsemHook> hooks;
  std::vector<std::string> state_signals;  // SignalRef strings the VM can log

  std::string to_json() const;  // .refsem.json
  static ReferenceSemantics from_json(std::string_view text);
};

struct RefsemViolation {
  enum class Kind { UnresolvableTrigger, UnknownSignal, UnknownSprite };
  Kind kind;
  std::string detail;
};

/// Empty result iff every hook trigger is canonical and resolvable in the
/// project and every referenced signal exists. Violations are data, not
/// errors.
std::vector<RefsemViolation> validate_reference_semantics(const ReferenceSemantics& r,
                                                          const ProjectIR& p);

}  // namespace sbforge
