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

#include "sbforge/scenario.hpp"

#include "json_io.hpp"
#include "sbforge/errors.hpp"

namespace sbforge {

using jio::json;

namespace {

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
  throw Error(ErrorKind::MalformedJson, "unknown event kind: " + s);
}

}  // namespace

void Scenario::check() const {
  if (tick_budget <= 0) throw Error(ErrorKind::MalformedJson, "tick budget must be positive");
  if (checkpoint_interval <= 0) {
    throw Error(ErrorKind::MalformedJson, "checkpoint interval must be positive");
  }
  int last = -1;
  for (const auto& [tick, ev] : events) {
    if (tick < 0 || tick > tick_budget) {
      throw Error(ErrorKind::MalformedJson, "event tick outside [0, H] in scenario " + id);
    }
    if (tick < last) throw Error(ErrorKind::MalformedJson, "events unsorted in scenario " + id);
    last = tick;
  }
}

std::string Scenario::to_json() const {
  json j;
  j["id"] = id;
  json evs = json::array();
  for (const auto& [tick, ev] : events) {
    json e;
    e["tick"] = tick;
    e["kind"] = event_kind_name(ev.kind);
    if (!ev.arg.empty()) e["arg"] = ev.arg;
    evs.push_back(std::move(e));
  }
  j["events"] = std::move(evs);
  if (seed_policy.kind == SeedPolicy::Kind::Fixed) {
    j["seed_policy"] = json{{"kind", "fixed"}, {"seed", seed_policy.fixed_seed}};
  } else {
    j["seed_policy"] = json{{"kind", "per_rerun"}};
  }
  j["tick_budget"] = tick_budget;
  j["checkpoint_interval"] = checkpoint_interval;
  return jio::canon(j);
}

Scenario Scenario::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "scenario");
  Scenario s;
  s.id = jio::member(j, "id", "scenario").get<std::string>();
  for (const auto& e : jio::member(j, "events", "scenario")) {
    InputEvent ev;
    ev.kind = event_kind_from(jio::member(e, "kind", "scenario event").get<std::string>());
    ev.arg = e.value("arg", "");
    s.events.emplace_back(jio::member(e, "tick", "scenario event").get<int>(), std::move(ev));
  }
  if (auto it = j.find("seed_policy"); it != j.end()) {
    std::string kind = it->value("kind", "per_rerun");
    if (kind == "fixed") {
      s.seed_policy = {SeedPolicy::Kind::Fixed, it->value("seed", uint64_t{0})};
    }
  }
  s.tick_budget = j.value("tick_budget", 2000);
  s.checkpoint_interval = j.value("checkpoint_interval", 10);
  s.check();
  return s;
}

}  // namespace sbforge
