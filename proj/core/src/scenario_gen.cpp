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

#include "sbforge/scenario_gen.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "json_io.hpp"
#include "sbforge/errors.hpp"

namespace sbforge {

using jio::json;

namespace {

std::string fold(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr const char* kTemplateLibraryVersion = "1";

std::vector<ScenarioTemplate> make_library() {
  using E = ScenarioTemplate::Event;
  using K = InputEvent::Kind;
  using S = ScenarioTemplate::Event::Slot;
  std::vector<ScenarioTemplate> lib;

  ScenarioTemplate idle;
  idle.name = "idle";
  idle.needs_green_flag = true;
  idle.events = {E{0, K::GreenFlag, S::None}};
  lib.push_back(idle);

  ScenarioTemplate tap;
  tap.name = "tap";
  tap.needs_key = true;
  tap.events = {E{0, K::GreenFlag, S::None}, E{30, K::KeyDown, S::Key}, E{33, K::KeyUp, S::Key}};
  lib.push_back(tap);

  ScenarioTemplate hold;
  hold.name = "hold";
  hold.needs_key = true;
  hold.events = {E{30, K::KeyDown, S::Key}, E{230, K::KeyUp, S::Key}};
  lib.push_back(hold);

  ScenarioTemplate seq;
  seq.name = "seq";
  seq.needs_key = true;
  seq.events = {E{0, K::GreenFlag, S::None}};
  for (int k = 0; k < 5; ++k) {
    seq.events.push_back(E{60 + 60 * k, K::KeyDown, S::Key});
    seq.events.push_back(E{63 + 60 * k, K::KeyUp, S::Key});
  }
  lib.push_back(seq);

  ScenarioTemplate click;
  click.name = "click";
  click.needs_sprite = true;
  click.events = {E{0, K::GreenFlag, S::None}, E{30, K::SpriteClick, S::Sprite}};
  lib.push_back(click);

  ScenarioTemplate inject;
  inject.name = "inject";
  inject.needs_message = true;
  inject.events = {E{0, K::GreenFlag, S::None}, E{30, K::InjectBroadcast, S::Message}};
  lib.push_back(inject);

  ScenarioTemplate combo;
  combo.name = "combo";
  combo.needs_key = true;
  combo.needs_message = true;
  combo.events = {E{0, K::GreenFlag, S::None}, E{30, K::KeyDown, S::Key}, E{33, K::KeyUp, S::Key},
                  E{60, K::InjectBroadcast, S::Message}};
  lib.push_back(combo);

  return lib;
}

const char* event_kind_name(InputEvent::Kind k) {
  switch (k) {
    case InputEvent::Kind::GreenFlag: return "green_flag";
    case InputEvent::Kind::KeyDown: return "key_down";
    case InputEvent::Kind::KeyUp: return "key_up";
    case InputEvent::Kind::SpriteClick: return "sprite_click";
    case InputEvent::Kind::InjectBroadcast: return "inject_broadcast";
  }
  return "?";
}

InputEvent::Kind event_kind_from(const std::string& s) {
  if (s == "green_flag") return InputEvent::Kind::GreenFlag;
  if (s == "key_down") return InputEvent::Kind::KeyDown;
  if (s == "key_up") return InputEvent::Kind::KeyUp;
  if (s == "sprite_click") return InputEvent::Kind::SpriteClick;
  if (s == "inject_broadcast") return InputEvent::Kind::InjectBroadcast;
  throw Error(ErrorKind::MalformedJson, "unknown template event kind: " + s);
}

const char* slot_name(ScenarioTemplate::Event::Slot s) {
  switch (s) {
    case ScenarioTemplate::Event::Slot::None: return "none";
    case ScenarioTemplate::Event::Slot::Key: return "key";
    case ScenarioTemplate::Event::Slot::Sprite: return "sprite";
    case ScenarioTemplate::Event::Slot::Message: return "message";
  }
  return "?";
}

ScenarioTemplate::Event::Slot slot_from(const std::string& s) {
  if (s == "none") return ScenarioTemplate::Event::Slot::None;
  if (s == "key") return ScenarioTemplate::Event::Slot::Key;
  if (s == "sprite") return ScenarioTemplate::Event::Slot::Sprite;
  if (s == "message") return ScenarioTemplate::Event::Slot::Message;
  throw Error(ErrorKind::MalformedJson, "unknown template slot: " + s);
}

}  // namespace

const std::vector<ScenarioTemplate>& template_library() {
  static const std::vector<ScenarioTemplate> lib = make_library();
  return lib;
}

std::string template_library_json() {
  json j;
  j["version"] = kTemplateLibraryVersion;
  json arr = json::array();
  for (const auto& t : template_library()) {
    json tj;
    tj["name"] = t.name;
    tj["needs_key"] = t.needs_key;
    tj["needs_sprite"] = t.needs_sprite;
    tj["needs_message"] = t.needs_message;
    tj["needs_green_flag"] = t.needs_green_flag;
    json evs = json::array();
    for (const auto& e : t.events) {
      evs.push_back(json{{"tick", e.tick}, {"kind", event_kind_name(e.kind)},
                         {"slot", slot_name(e.slot)}});
    }
    tj["events"] = std::move(evs);
    arr.push_back(std::move(tj));
  }
  j["templates"] = std::move(arr);
  return j.dump(2) + "\n";
}

std::vector<ScenarioTemplate> templates_from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "template library");
  std::vector<ScenarioTemplate> out;
  for (const auto& tj : jio::member(j, "templates", "template library")) {
    ScenarioTemplate t;
    t.name = jio::member(tj, "name", "template").get<std::string>();
    t.needs_key = tj.value("needs_key", false);
    t.needs_sprite = tj.value("needs_sprite", false);
    t.needs_message = tj.value("needs_message", false);
    t.needs_green_flag = tj.value("needs_green_flag", false);
    for (const auto& ej : jio::member(tj, "events", "template")) {
      ScenarioTemplate::Event e;
      e.tick = jio::member(ej, "tick", "template event").get<int>();
      e.kind = event_kind_from(jio::member(ej, "kind", "template event").get<std::string>());
      e.slot = slot_from(ej.value("slot", "none"));
      t.events.push_back(e);
    }
    out.push_back(std::move(t));
  }
  return out;
}

InteractionMetadata extract_metadata(const ProjectIR& p) {
  InteractionMetadata m;
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      switch (b.opcode) {
        case Opcode::event_whenflagclicked:
          if (b.top_level) m.has_green_flag = true;
          break;
        case Opcode::event_whenkeypressed: {
          if (!b.top_level) break;
          auto f = b.fields.find("KEY_OPTION");
          std::string key = f == b.fields.end() ? "space" : fold(f->second.value.to_display_string());
          // An "any" hat is exercised through a representative key.
          m.keys.insert(key == "any" ? "space" : key);
          break;
        }
        case Opcode::event_whenthisspriteclicked:
          if (b.top_level) m.clickable_sprites.insert(t.id);
          break;
        case Opcode::event_whenbroadcastreceived: {
          auto f = b.fields.find("BROADCAST_OPTION");
          if (f != b.fields.end()) m.messages.insert(f->second.value.to_display_string());
          break;
        }
        case Opcode::event_broadcast:
        case Opcode::event_broadcastandwait: {
          auto in = b.inputs.find("BROADCAST_INPUT");
          if (in == b.inputs.end()) break;
          if (in->second.kind == InputValue::Kind::BroadcastRef) {
            m.messages.insert(in->second.name);
          } else if (in->second.kind == InputValue::Kind::Literal) {
            m.messages.insert(in->second.literal.to_display_string());
          }
          break;  // dynamic (reporter) messages are unknowable statically
        }
        default:
          break;
      }
    }
  }
  return m;
}

std::vector<Scenario> instantiate(const std::vector<ScenarioTemplate>& templates,
                                  const InteractionMetadata& m, int tick_budget,
                                  int checkpoint_interval) {
  std::vector<Scenario> out;
  std::map<std::string, size_t> seen;  // canonical event list -> index

  auto emit = [&](const ScenarioTemplate& t, const std::string& key, const std::string& sprite,
                  const std::string& message) {
    Scenario s;
    s.tick_budget = tick_budget;
    s.checkpoint_interval = checkpoint_interval;
    std::string suffix;
    for (const auto& e : t.events) {
      if (e.tick > tick_budget) continue;
      InputEvent ev;
      ev.kind = e.kind;
      switch (e.slot) {
        case ScenarioTemplate::Event::Slot::None:
          break;
        case ScenarioTemplate::Event::Slot::Key:
          ev.arg = key;
          break;
        case ScenarioTemplate::Event::Slot::Sprite:
          ev.arg = sprite;
          break;
        case ScenarioTemplate::Event::Slot::Message:
          ev.arg = message;
          break;
      }
      s.events.emplace_back(e.tick, std::move(ev));
    }
    if (s.events.empty()) return;
    if (t.needs_key) suffix += (suffix.empty() ? "" : "+") + key;
    if (t.needs_sprite) suffix += (suffix.empty() ? "" : "+") + sprite;
    if (t.needs_message) suffix += (suffix.empty() ? "" : "+") + message;
    s.id = suffix.empty() ? t.name : t.name + ":" + suffix;

    // Deduplicate identical event lists.
    json evs = json::array();
    for (const auto& [tick, ev] : s.events) {
      evs.push_back(json::array({tick, static_cast<int>(ev.kind), ev.arg}));
    }
    std::string canon_events = jio::canon(evs);
    if (seen.count(canon_events)) return;
    seen.emplace(std::move(canon_events), out.size());
    s.check();
    out.push_back(std::move(s));
  };

  for (const auto& t : templates) {
    if (t.needs_green_flag && !m.has_green_flag) continue;
    if (t.needs_key && t.needs_message) {
      for (const auto& k : m.keys) {
        for (const auto& msg : m.messages) emit(t, k, "", msg);
      }
    } else if (t.needs_key) {
      for (const auto& k : m.keys) emit(t, k, "", "");
    } else if (t.needs_sprite) {
      for (const auto& sp : m.clickable_sprites) emit(t, "", sp, "");
    } else if (t.needs_message) {
      for (const auto& msg : m.messages) emit(t, "", "", msg);
    } else {
      emit(t, "", "", "");
    }
  }
  return out;
}

}  // namespace sbforge
