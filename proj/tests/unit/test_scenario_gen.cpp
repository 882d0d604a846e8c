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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sbforge/builder.hpp"
#include "sbforge/scenario_gen.hpp"

using namespace sbforge;
using namespace sbforge::build;

namespace {

std::vector<std::string> ids_of(const std::vector<Scenario>& scenarios) {
  std::vector<std::string> out;
  for (const auto& s : scenarios) out.push_back(s.id);
  return out;
}

}  // namespace

TEST_CASE("metadata extraction covers hats and broadcast blocks") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("v", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_key("space", {change_var("v", lit(1))})
      .on_flag({broadcast("game_over")});
  ProjectIR p = pb.build();
  InteractionMetadata m = extract_metadata(p);
  CHECK(m.keys == std::set<std::string>{"space"});
  CHECK(m.messages == std::set<std::string>{"game_over"});  // emitted, no receiver
  CHECK(m.clickable_sprites.empty());
  CHECK(m.has_green_flag);
}

TEST_CASE("flag-only project has empty interaction sets") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("v", 0);
  pb.sprite("s").costume("c", 10, 10).on_flag({set_var("v", lit(1))});
  InteractionMetadata m = extract_metadata(pb.build());
  CHECK(m.keys.empty());
  CHECK(m.clickable_sprites.empty());
  CHECK(m.messages.empty());
  CHECK(m.has_green_flag);
}

TEST_CASE("keys={space} expands to idle, tap, hold, seq") {
  InteractionMetadata m;
  m.keys = {"space"};
  m.has_green_flag = true;
  std::vector<Scenario> s = instantiate(template_library(), m, 2000, 10);
  CHECK(ids_of(s) == std::vector<std::string>{"idle", "tap:space", "hold:space", "seq:space"});
  // The tap skeleton, concretely.
  const Scenario& tap = s[1];
  REQUIRE(tap.events.size() == 3);
  CHECK(tap.events[0].first == 0);
  CHECK(tap.events[0].second.kind == InputEvent::Kind::GreenFlag);
  CHECK(tap.events[1].first == 30);
  CHECK(tap.events[1].second.kind == InputEvent::Kind::KeyDown);
  CHECK(tap.events[1].second.arg == "space");
  CHECK(tap.events[2].first == 33);
  CHECK(tap.events[2].second.kind == InputEvent::Kind::KeyUp);
}

TEST_CASE("empty metadata with a green flag yields exactly idle") {
  InteractionMetadata m;
  m.has_green_flag = true;
  std::vector<Scenario> s = instantiate(template_library(), m, 2000, 10);
  CHECK(ids_of(s) == std::vector<std::string>{"idle"});
}

TEST_CASE("no hooks at all yields no scenarios") {
  InteractionMetadata m;
  std::vector<Scenario> s = instantiate(template_library(), m, 2000, 10);
  CHECK(s.empty());
}

TEST_CASE("two keys expand without duplicates, parameters in lexicographic order") {
  InteractionMetadata m;
  m.keys = {"a", "b"};
  m.has_green_flag = true;
  std::vector<Scenario> s = instantiate(template_library(), m, 2000, 10);
  std::vector<std::string> ids = ids_of(s);
  CHECK(ids == std::vector<std::string>{"idle", "tap:a", "tap:b", "hold:a", "hold:b", "seq:a",
                                        "seq:b"});
  std::set<std::string> unique(ids.begin(), ids.end());
  CHECK(unique.size() == ids.size());
}

TEST_CASE("instantiation is deterministic and dedup is idempotent") {
  InteractionMetadata m;
  m.keys = {"space", "a"};
  m.messages = {"go", "stop"};
  m.clickable_sprites = {"spr.x"};
  m.has_green_flag = true;
  std::vector<Scenario> a = instantiate(template_library(), m, 500, 10);
  std::vector<Scenario> b = instantiate(template_library(), m, 500, 10);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  // Every instantiated scenario satisfies the scenario invariants.
  for (const auto& s : a) CHECK_NOTHROW(s.check());
  // Event lists are pairwise distinct (dedup has nothing left to do).
  std::set<std::string> seen;
  for (const auto& s : a) {
    std::string key;
    for (const auto& [tick, ev] : s.events) {
      key += std::to_string(tick) + "/" + std::to_string(static_cast<int>(ev.kind)) + "/" +
             ev.arg + ";";
    }
    CHECK(seen.insert(key).second);
  }
}

TEST_CASE("small tick budgets drop out-of-range events but keep scenarios valid") {
  InteractionMetadata m;
  m.keys = {"space"};
  m.has_green_flag = true;
  std::vector<Scenario> s = instantiate(template_library(), m, 100, 10);
  for (const auto& sc : s) {
    CHECK_NOTHROW(sc.check());
    for (const auto& [tick, ev] : sc.events) CHECK(tick <= 100);
  }
}

TEST_CASE("the shipped template resource matches the built-in library") {
  std::ifstream in(std::string(SBFORGE_RESOURCES_DIR) + "/scenario_templates.json",
                   std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == template_library_json());

  // And the JSON parses back to an equivalent library.
  std::vector<ScenarioTemplate> parsed = templates_from_json(ss.str());
  const std::vector<ScenarioTemplate>& builtin = template_library();
  REQUIRE(parsed.size() == builtin.size());
  InteractionMetadata m;
  m.keys = {"space"};
  m.messages = {"go"};
  m.clickable_sprites = {"spr.s"};
  m.has_green_flag = true;
  std::vector<Scenario> a = instantiate(parsed, m, 2000, 10);
  std::vector<Scenario> b = instantiate(builtin, m, 2000, 10);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}
