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
#include "gen.hpp"
#include "sbforge/builder.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/project_ir.hpp"
#include "sbforge/util.hpp"
#include "zip_writer.hpp"

using namespace sbforge;

namespace {

std::string sample(const std::string& name) {
  std::string path = std::string(SBFORGE_SAMPLES_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalStage = R"({
  "targets": [
    {"name": "Stage", "isStage": true, "variables": {}, "lists": {}, "broadcasts": {},
     "blocks": {}, "costumes": [], "sounds": [], "currentCostume": 0, "layerOrder": 0}
  ],
  "monitors": [], "extensions": [], "meta": {"semver": "3.0.0"}
})";

}  // namespace

TEST_CASE("minimal well-formed project parses to one target") {
  ProjectIR p = parse_project(kMinimalStage);
  CHECK(p.targets.size() == 1);
  CHECK(p.stage().is_stage);
  CHECK(p.format_version == "3.0.0");
}

TEST_CASE("broken next/parent link is rejected naming the inconsistent block") {
  const char* text = R"({
    "targets": [
      {"name": "Stage", "isStage": true, "blocks": {
        "b1": {"opcode": "event_whenflagclicked", "next": "b2", "parent": null, "topLevel": true},
        "b2": {"opcode": "looks_show", "next": null, "parent": null, "topLevel": true}
      }, "costumes": [], "currentCostume": 0}
    ]})";
  try {
    parse_project(text);
    FAIL("expected LinkInconsistency");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LinkInconsistency);
    CHECK(e.detail() == "b2");
  }
}

TEST_CASE("unsupported opcodes are rejected naming the opcode") {
  const char* text = R"({
    "targets": [
      {"name": "Stage", "isStage": true, "blocks": {
        "b1": {"opcode": "pen_clear", "next": null, "parent": null, "topLevel": true}
      }, "costumes": [], "currentCostume": 0}
    ]})";
  try {
    parse_project(text);
    FAIL("expected UnknownOpcode");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownOpcode);
    CHECK(e.detail().find("pen_clear") != std::string::npos);
  }
}

TEST_CASE("dangling variable references are rejected") {
  const char* text = R"({
    "targets": [
      {"name": "Stage", "isStage": true, "blocks": {
        "b1": {"opcode": "data_setvariableto", "next": null, "parent": null, "topLevel": true,
               "fields": {"VARIABLE": ["score", "nope"]},
               "inputs": {"VALUE": [1, [4, 0]]}}
      }, "costumes": [], "currentCostume": 0}
    ]})";
  try {
    parse_project(text);
    FAIL("expected DanglingReference");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DanglingReference);
    CHECK(e.detail().find("nope") != std::string::npos);
  }
}

TEST_CASE("identifiers must be globally unique") {
  const char* text = R"({
    "targets": [
      {"name": "Stage", "isStage": true, "variables": {"dup": ["a", 0]}, "blocks": {},
       "costumes": [], "currentCostume": 0},
      {"name": "S", "variables": {"dup": ["b", 1]}, "blocks": {}, "costumes": [],
       "currentCostume": 0}
    ]})";
  CHECK_THROWS_AS(parse_project(text), Error);
  try {
    parse_project(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateIdentifier);
  }
}

TEST_CASE("malformed JSON is MalformedJson") {
  try {
    parse_project("{nope");
    FAIL("expected MalformedJson");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedJson);
  }
}

TEST_CASE("bundled flappy_min sample: 5 targets, 16 scripts, under the sprite threshold") {
  ProjectIR p = parse_project(sample("flappy_min.json"));
  CHECK(p.targets.size() == 5);
  ComplexityReport r = complexity_metrics(p);
  CHECK(r.sprites == 4);
  CHECK(r.scripts == 16);
  CHECK(r.custom_blocks == 1);
  CHECK_FALSE(r.passes);  // 4 sprites < 5
}

TEST_CASE("serialization round-trips structurally") {
  ProjectIR p = parse_project(sample("flappy_min.json"));
  ProjectIR q = parse_project(serialize_project(p));
  CHECK(p == q);
}

TEST_CASE("round-trip and canonical stability over generated projects") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    ProjectIR p = testgen::random_project(seed);
    std::string bytes = serialize_project(p);
    ProjectIR q = parse_project(bytes);  // also re-validates identifier closure
    CHECK(p == q);
    CHECK(serialize_project(q) == bytes);  // structurally equal => byte-identical
    // Complexity is invariant under the round-trip.
    ComplexityReport a = complexity_metrics(p);
    ComplexityReport b = complexity_metrics(q);
    CHECK(a.sprites == b.sprites);
    CHECK(a.scripts == b.scripts);
    CHECK(a.broadcast_uses == b.broadcast_uses);
    CHECK(a.custom_blocks == b.custom_blocks);
  }
}

TEST_CASE("byte-stable across repeated serializations") {
  ProjectIR p = parse_project(sample("forge/race_min.json"));
  CHECK(digest_hex(serialize_project(p)) == digest_hex(serialize_project(p)));
}

TEST_CASE("complexity thresholds") {
  using namespace sbforge::build;
  // 5 sprites, 15 scripts, 3 broadcast uses, 1 custom block: passes.
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("v", 0);
  for (int i = 0; i < 5; ++i) {
    auto sp = pb.sprite("s" + std::to_string(i));
    sp.costume("c", 10, 10);
    sp.on_flag({set_var("v", lit(1))});
    sp.on_key("space", {change_var("v", lit(1))});
    sp.on_click({change_var("v", lit(2))});
    if (i == 0) {
      sp.on_flag({broadcast("m")});           // 1 broadcast use
      sp.on_receive("m", {show()});           // 2
      sp.on_receive("m", {hide()});           // 3
      sp.define_proc("p", {}, false, {show()});  // custom block + script
    }
  }
  ProjectIR p = pb.build();
  ComplexityReport r = complexity_metrics(p);
  CHECK(r.sprites == 5);
  CHECK(r.scripts >= 15);
  CHECK(r.broadcast_uses >= 3);
  CHECK(r.custom_blocks >= 1);
  CHECK(r.passes);
}

TEST_CASE("empty project fails the complexity filter") {
  ProjectIR p = parse_project(kMinimalStage);
  ComplexityReport r = complexity_metrics(p);
  CHECK(r.sprites == 0);
  CHECK(r.scripts == 0);
  CHECK(r.broadcast_uses == 0);
  CHECK(r.custom_blocks == 0);
  CHECK_FALSE(r.passes);
}

TEST_CASE("sprite threshold alone fails even with many scripts") {
  using namespace sbforge::build;
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("v", 0);
  for (int i = 0; i < 4; ++i) {  // one sprite short
    auto sp = pb.sprite("s" + std::to_string(i));
    sp.costume("c", 10, 10);
    for (int k = 0; k < 5; ++k) sp.on_flag({set_var("v", lit(k))});  // 20 scripts
    if (i == 0) {
      sp.on_flag({broadcast("m1"), broadcast("m2"), broadcast("m3"),
                  broadcast("m4"), broadcast("m5")});
      sp.define_proc("p", {}, false, {show()});
      sp.define_proc("q", {}, false, {hide()});
    }
  }
  ComplexityReport r = complexity_metrics(pb.build());
  CHECK(r.sprites == 4);
  CHECK(r.scripts >= 20);
  CHECK(r.broadcast_uses >= 5);
  CHECK(r.custom_blocks == 2);
  CHECK_FALSE(r.passes);
}

TEST_CASE("zip containers are accepted and asset digests filled from entries") {
  const char* text = R"({
    "targets": [
      {"name": "Stage", "isStage": true, "blocks": {},
       "costumes": [{"assetId": "abc", "name": "bg", "width": 480, "height": 360}],
       "currentCostume": 0}
    ]})";
  std::string zip = testgen::make_zip({{"project.json", text}, {"abc.png", "PNGBYTES"}});
  CHECK(is_zip_container(zip));
  ProjectIR p = parse_project(zip);
  CHECK(p.targets.size() == 1);
  CHECK(p.stage().costumes[0].payload_digest == digest_hex("PNGBYTES"));
}

TEST_CASE("zip without project.json is rejected") {
  std::string zip = testgen::make_zip({{"readme.txt", "hi"}});
  CHECK_THROWS_AS(parse_project(zip), Error);
}

TEST_CASE("deflated zip entries are inflated") {
  ProjectIR p = parse_project(sample("forge/race_min.json"));
  std::string bytes = serialize_project(p);
  std::string zip = testgen::make_zip({{"project.json", bytes}}, /*deflated=*/true);
  ProjectIR q = parse_project(zip);
  CHECK(p == q);
}

TEST_CASE("image assets require positive dimensions") {
  const char* text = R"({
    "targets": [
      {"name": "Stage", "isStage": true, "blocks": {},
       "costumes": [{"assetId": "a", "name": "bg", "width": 0, "height": 10}],
       "currentCostume": 0}
    ]})";
  CHECK_THROWS_AS(parse_project(text), Error);
}
