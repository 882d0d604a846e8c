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

#include <set>
#include <string>
#include <vector>

#include "sbforge/project_ir.hpp"
#include "sbforge/scenario.hpp"

namespace sbforge {

/// What a user can interact with: extracted from event hooks and
/// broadcast blocks.
struct InteractionMetadata {
  std::set<std::string> keys;               // lowercased key names with when-key hats
  std::set<std::string> clickable_sprites;  // target ids with click hats
  std::set<std::string> messages;           // broadcast messages emitted or received
  bool has_green_flag = false;
};

InteractionMetadata extract_metadata(const ProjectIR& p);

/// One entry of the fixed template library: an event skeleton with
/// symbolic ticks and parameter slots.
struct ScenarioTemplate {
  struct Event {
    enum class Slot { None, Key, Sprite, Message };
    int tick = 0;
    InputEvent::Kind kind = InputEvent::Kind::GreenFlag;
    Slot slot = Slot::None;
  };
  std::string name;
  bool needs_key = false;
  bool needs_sprite = false;
  bool needs_message = false;
  bool needs_green_flag = false;  // gated on the project having a flag hat
  std::vector<Event> events;
};

/// The shipped library: idle, tap:key, hold:key, seq:key, click:sprite,
/// inject:message, combo:key+message. Mirrors
/// resources/scenario_templates.json.
const std::vector<ScenarioTemplate>& template_library();

/// The library as its versioned JSON resource text.
std::string template_library_json();
std::vector<ScenarioTemplate> templates_from_json(std::string_view text);

/// One scenario per (template, parameter) combination; events beyond the
/// tick budget are dropped; empty scenarios are skipped and duplicates
/// (identical event lists) removed. Output order is deterministic:
/// template order, then lexicographic parameters.
std::vector<Scenario> instantiate(const std::vector<ScenarioTemplate>& templates,
                                  const InteractionMetadata& m, int tick_budget,
                                  int checkpoint_interval);

}  // namespace sbforge
