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

#include "doctest.h"
#include "gen.hpp"
#include "json.hpp"
#include "sbforge/builder.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/forge.hpp"
#include "sbforge/patch.hpp"
#include "sbforge/util.hpp"

using namespace sbforge;
using namespace sbforge::build;

namespace {

/// stage chain: flag -> set a 1 -> set b 2 -> set c 3
ProjectIR chain_project() {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage()
      .variable("a", 0)
      .variable("b", 0)
      .variable("c", 0)
      .on_flag({set_var("a", lit(1)), set_var("b", lit(2)), set_var("c", lit(3))});
  pb.sprite("s").costume("c", 10, 10);
  return pb.build();
}

const Block& set_block_of(const ProjectIR& p, const std::string& var_name) {
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      auto f = b.fields.find("VARIABLE");
      if (b.opcode == Opcode::data_setvariableto && f != b.fields.end() &&
          f->second.value.to_display_string() == var_name) {
        return b;
      }
    }
  }
  throw std::runtime_error("no set block for " + var_name);
}

std::string modify_edit_json(const ProjectIR& p, const std::string& var_name, int64_t to) {
  const Block& b = set_block_of(p, var_name);
  nlohmann::json j;
  j["op"] = "modify";
  j["sprite_id"] = "stage";
  j["block_id"] = b.id;
  j["path"] = "input:VALUE";
  j["old"] = nlohmann::json::array(
      {1, nlohmann::json::array({4, b.inputs.at("VALUE").literal.as_int_raw()})});
  j["new"] = nlohmann::json::array({1, nlohmann::json::array({4, to})});
  return j.dump();
}

}  // namespace

TEST_CASE("well-formed single modify validates to one edit") {
  ProjectIR p = chain_project();
  std::string text = R"({"source":"model","edits":[)" + modify_edit_json(p, "a", 9) + "]}";
  Patch patch = validate_patch(text);
  CHECK(patch.edits.size() == 1);
  CHECK(patch.edits[0].kind == AtomicEdit::Kind::Modify);
  CHECK(patch.source == Patch::Source::Model);
}

TEST_CASE("schema violations are typed") {
  // missing sprite_id
  try {
    validate_patch(R"({"edits":[{"op":"modify","block_id":"x","path":"opcode",
                      "old":"looks_show","new":"looks_hide"}]})");
    FAIL("expected SchemaInvalid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaInvalid);
  }
  // two modifies of the same (block, path)
  ProjectIR p = chain_project();
  std::string dup = R"({"edits":[)" + modify_edit_json(p, "a", 9) + "," +
                    modify_edit_json(p, "a", 8) + "]}";
  try {
    validate_patch(dup);
    FAIL("expected DuplicateTarget");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DuplicateTarget);
  }
  // modify without old
  try {
    validate_patch(R"({"edits":[{"op":"modify","sprite_id":"stage","block_id":"x",
                      "path":"opcode","new":"looks_hide"}]})");
    FAIL("expected SchemaInvalid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaInvalid);
  }
  // not JSON at all
  CHECK_THROWS_AS(validate_patch("]]]"), Error);
}

TEST_CASE("removing a mid-chain block reconnects its neighbors") {
  ProjectIR p = chain_project();
  const Block& a = set_block_of(p, "a");
  const Block& b = set_block_of(p, "b");
  const Block& c = set_block_of(p, "c");

  Patch patch;
  patch.source = Patch::Source::Model;
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Remove;
  e.sprite_id = "stage";
  e.block_id = b.id;
  e.content = BlockContent::of(b);
  e.slot = AtomicEdit::Slot::Next;
  e.parent = a.id;
  e.next = c.id;
  patch.edits.push_back(e);

  ProjectIR q = apply_patch(p, patch);
  const Target& stage = q.targets.front();
  CHECK(stage.blocks.count(b.id) == 0);
  CHECK(*stage.blocks.at(a.id).next == c.id);
  CHECK(*stage.blocks.at(c.id).parent == a.id);

  // And the inverse restores everything, byte-identically.
  ProjectIR back = apply_patch(q, inverse_patch(patch));
  CHECK(serialize_project(back) == serialize_project(p));
}

TEST_CASE("apply failures are typed and abort the whole patch") {
  ProjectIR p = chain_project();
  // add referencing a nonexistent parent
  Patch patch;
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Add;
  e.sprite_id = "stage";
  e.block_id = "fresh.1";
  e.content.opcode = Opcode::looks_show;
  e.slot = AtomicEdit::Slot::Next;
  e.parent = "ghost";
  patch.edits.push_back(e);
  try {
    apply_patch(p, patch);
    FAIL("expected NotApplicable");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::NotApplicable);
  }

  // modify whose old value does not match reality
  Patch p2 = validate_patch(R"({"edits":[)" + modify_edit_json(p, "a", 9) + "]}");
  p2.edits[0].old_value->input = InputValue::lit(Scalar(int64_t{777}));
  CHECK_THROWS_AS(apply_patch(p, p2), Error);

  // a patch that damages the graph is ResultInvalid: retarget an input to
  // a nonexistent block
  Patch p3;
  AtomicEdit m;
  m.kind = AtomicEdit::Kind::Modify;
  m.sprite_id = "stage";
  m.block_id = set_block_of(p, "a").id;
  m.path = "input:VALUE";
  EditValue old_v, new_v;
  old_v.input = set_block_of(p, "a").inputs.at("VALUE");
  new_v.input = InputValue::block("ghost");
  m.old_value = old_v;
  m.new_value = new_v;
  p3.edits.push_back(m);
  try {
    apply_patch(p, p3);
    FAIL("expected ResultInvalid");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::ResultInvalid);
  }
}

TEST_CASE("normalization is order-independent for independent edits") {
  ProjectIR p = chain_project();
  std::string e1 = modify_edit_json(p, "a", 9);
  std::string e2 = modify_edit_json(p, "b", 8);
  Patch fwd = validate_patch(R"({"edits":[)" + e1 + "," + e2 + "]}");
  Patch rev = validate_patch(R"({"edits":[)" + e2 + "," + e1 + "]}");
  CHECK(normalize(fwd) == normalize(rev));
}

TEST_CASE("adds with different fresh ids but identical content normalize identically") {
  ProjectIR p = chain_project();
  const Block& c = set_block_of(p, "c");
  auto make_add = [&](const std::string& fresh) {
    Patch patch;
    AtomicEdit e;
    e.kind = AtomicEdit::Kind::Add;
    e.sprite_id = "stage";
    e.block_id = fresh;
    e.content.opcode = Opcode::data_setvariableto;
    e.content.fields.emplace("VARIABLE", FieldValue{Scalar("a"), "stage.var.a"});
    e.content.inputs.emplace("VALUE", InputValue::lit(Scalar(int64_t{4})));
    e.slot = AtomicEdit::Slot::Next;
    e.parent = c.id;
    patch.edits.push_back(e);
    return patch;
  };
  CHECK(normalize(make_add("fresh.one")) == normalize(make_add("fresh.two")));
  CHECK(normalize(Patch{}) == NormalizedEditSet{});
}

TEST_CASE("edit distance is the symmetric difference size") {
  NormalizedEditSet e1{"k1"};
  NormalizedEditSet big{"k1", "k2", "k3", "k4"};
  CHECK(edit_distance(e1, e1) == 0);
  CHECK(edit_distance(e1, big) == 3);
  CHECK(edit_distance(big, e1) == 3);
  CHECK(edit_distance({"k1"}, {"k2"}) == 2);
}

TEST_CASE("edit distance is a metric on normalized sets") {
  SplitMix64 rng(99);
  auto random_set = [&rng]() {
    NormalizedEditSet s;
    int n = static_cast<int>(rng.next_below(6));
    for (int i = 0; i < n; ++i) s.insert("k" + std::to_string(rng.next_below(8)));
    return s;
  };
  for (int i = 0; i < 200; ++i) {
    NormalizedEditSet x = random_set(), y = random_set(), z = random_set();
    CHECK(edit_distance(x, x) == 0);
    CHECK(edit_distance(x, y) == edit_distance(y, x));
    CHECK(edit_distance(x, z) <= edit_distance(x, y) + edit_distance(y, z));
    if (x != y) CHECK(edit_distance(x, y) > 0);
  }
}

TEST_CASE("inverse is an involution on forge-made patches") {
  ProjectIR p = testgen::random_project(5);
  SplitMix64 rng(1);
  for (BugPatternTag tag : pattern_catalog()) {
    std::vector<Site> sites = eligible_sites(p, tag, rng);
    if (sites.empty()) continue;
    auto [buggy, fwd] = apply_operator(p, tag, sites.front());
    Patch inv = inverse_patch(fwd);
    CHECK(patch_to_json(inverse_patch(inv)) == patch_to_json(fwd));
    // Round-trip through apply as well.
    CHECK(serialize_project(apply_patch(buggy, inv)) == serialize_project(p));
  }
}

TEST_CASE("inverse of a modify lacking its old value is NonInvertibleEdit") {
  Patch patch;
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Modify;
  e.sprite_id = "stage";
  e.block_id = "b";
  e.path = "opcode";
  e.new_value.opcode_name = "looks_hide";
  patch.edits.push_back(e);
  try {
    inverse_patch(patch);
    FAIL("expected NonInvertibleEdit");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::NonInvertibleEdit);
  }
}

TEST_CASE("fuzzed edits either apply to a valid project or fail with a typed error") {
  SplitMix64 rng(2024);
  int applied = 0, rejected = 0;
  for (int round = 0; round < 300; ++round) {
    ProjectIR p = testgen::random_project(rng.next_below(20) + 1);
    std::vector<std::string> block_ids, target_ids;
    for (const auto& t : p.targets) {
      target_ids.push_back(t.id);
      for (const auto& [id, b] : t.blocks) block_ids.push_back(id);
    }
    if (block_ids.empty()) continue;
    auto any_block = [&] { return block_ids[rng.next_below(block_ids.size())]; };
    auto any_target = [&] { return target_ids[rng.next_below(target_ids.size())]; };

    Patch patch;
    int n_edits = 1 + static_cast<int>(rng.next_below(3));
    for (int k = 0; k < n_edits; ++k) {
      AtomicEdit e;
      e.sprite_id = any_target();
      e.block_id = any_block();
      switch (rng.next_below(4)) {
        case 0: {  // opcode flip to a random catalog entry
          e.kind = AtomicEdit::Kind::Modify;
          e.path = "opcode";
          EditValue old_v, new_v;
          const Target* t = p.owner_of_block(e.block_id);
          old_v.opcode_name =
              t != nullptr ? opcode_name(t->blocks.at(e.block_id).opcode) : "looks_show";
          new_v.opcode_name =
              opcode_name(opcode_catalog()[rng.next_below(opcode_catalog().size())]);
          if (old_v.opcode_name == new_v.opcode_name) new_v.opcode_name = "looks_hide";
          e.old_value = old_v;
          e.new_value = new_v;
          break;
        }
        case 1: {  // random literal write into a random input
          e.kind = AtomicEdit::Kind::Modify;
          e.path = "input:VALUE";
          EditValue old_v, new_v;
          const Target* t = p.owner_of_block(e.block_id);
          if (t != nullptr) {
            auto it = t->blocks.at(e.block_id).inputs.find("VALUE");
            if (it != t->blocks.at(e.block_id).inputs.end()) old_v.input = it->second;
          }
          new_v.input = InputValue::lit(Scalar(static_cast<int64_t>(rng.next_below(100))));
          e.old_value = old_v;
          e.new_value = new_v;
          break;
        }
        case 2: {  // remove with (often wrong) recorded payload
          e.kind = AtomicEdit::Kind::Remove;
          const Target* t = p.owner_of_block(e.block_id);
          if (t != nullptr && rng.next_below(2) == 0) {
            const Block& b = t->blocks.at(e.block_id);
            e.content = BlockContent::of(b);
            e.next = b.next;
            e.parent = b.parent;
            e.slot = b.parent ? AtomicEdit::Slot::Next : AtomicEdit::Slot::Top;
          } else {
            e.content.opcode = Opcode::looks_show;  // will not match
          }
          break;
        }
        default: {  // add somewhere
          e.kind = AtomicEdit::Kind::Add;
          e.block_id = "fuzz." + std::to_string(rng.next_below(1000));
          e.content.opcode = Opcode::looks_hide;
          e.slot = rng.next_below(2) == 0 ? AtomicEdit::Slot::Top : AtomicEdit::Slot::Next;
          if (e.slot == AtomicEdit::Slot::Next) e.parent = any_block();
          break;
        }
      }
      patch.edits.push_back(std::move(e));
    }

    try {
      ProjectIR q = apply_patch(p, patch);
      validate_project(q);  // apply_patch guarantees this; double-check
      ++applied;
    } catch (const Error& err) {
      bool typed = err.kind() == ErrorKind::NotApplicable ||
                   err.kind() == ErrorKind::ResultInvalid;
      CHECK_MESSAGE(typed, err.what());
      ++rejected;
    }
  }
  // The fuzz must exercise both outcomes to mean anything.
  CHECK(applied > 20);
  CHECK(rejected > 20);
}

TEST_CASE("patch JSON round-trips") {
  ProjectIR p = chain_project();
  Patch patch = validate_patch(R"({"source":"forge","edits":[)" + modify_edit_json(p, "a", 9) +
                               "]}");
  std::string text = patch_to_json(patch);
  Patch again = validate_patch(text);
  CHECK(patch_to_json(again) == text);
}
