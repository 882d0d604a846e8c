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

// Regenerates the bundled sample corpus under samples/ (and the scenario
// template resource). Output is canonical JSON, so regeneration is
// byte-stable.

#include <filesystem>
#include <iostream>
#include <string>

#include "sbforge/builder.hpp"
#include "sbforge/bundle.hpp"
#include "sbforge/config.hpp"
#include "sbforge/forge.hpp"
#include "sbforge/scenario_gen.hpp"

namespace fs = std::filesystem;
using namespace sbforge;
using namespace sbforge::build;

namespace {

// Shared "catch game" skeleton: 5 sprites, 16 hat scripts, 6 broadcast
// uses, one custom block. Passes the complexity filter with a little
// headroom, and every signal it produces is deterministic (no RNG).
//
// Score is stored as 57 in the project file, as if the project had been
// saved mid-game; the green-flag init script resets it.
ProjectBuilder base_game() {
  ProjectBuilder pb;
  pb.backdrop("day").backdrop("night");
  pb.stage()
      .variable("score", 57)
      .variable("lives", 3)
      .variable("t", 0)
      .variable("low", 0)
      .variable("high", 0)
      .variable("active", 0)
      .variable("spawn_mark", 0)
      .variable("wave_done", 0)
      .on_flag({switch_backdrop(lit("day"))});

  pb.sprite("player")
      .costume("idle", 30, 30)
      .costume("jump", 30, 30)
      .at(0, 0)
      .on_flag({goto_xy(lit(0), lit(-100)), show()})
      .on_key("space", {change_y(lit(10))})
      .on_key("left arrow", {change_x(lit(-10))})
      .on_key("right arrow", {change_x(lit(10))});

  pb.sprite("ball")
      .costume("round", 20, 20)
      .on_flag({set_var("score", lit(0)), broadcast("round_start")})
      .on_receive("round_start",
                  {repeat(lit(20), {change_var("t", lit(1)),
                                    if_else(lt(var("t"), lit(10)),
                                            {change_var("low", lit(1))},
                                            {change_var("high", lit(1))})})})
      .on_flag({wait_until(gt(var("score"), lit(4))), broadcast("game_over")})
      .on_receive("round_start", {repeat(lit(5), {change_var("score", lit(1))})});

  pb.sprite("bonus")
      .costume("star", 24, 24)
      .on_click({change_var("score", lit(5))})
      .on_receive("round_start", {show()})
      .on_receive("game_over", {hide()});

  pb.sprite("spawner")
      .costume("dot", 8, 8)
      .on_flag({repeat(lit(3), {create_clone_of("_myself_"), wait_secs(lit(0.2))}),
                set_var("wave_done", lit(1))})
      .on_clone_start({set_var("spawn_mark", lit(1)), change_var("active", lit(1)),
                       wait_secs(lit(0.5)), change_var("active", lit(-1)),
                       delete_this_clone()});

  pb.sprite("hud")
      .costume("idle", 40, 12)
      .costume("over", 40, 12)
      .hidden()
      .on_flag({call_proc("reset hud", {})})
      .on_receive("game_over", {switch_costume(lit("over")), show()})
      .define_proc("reset hud", {}, false, {hide(), switch_costume(lit("idle"))});

  return pb;
}

ProjectIR race_min() {
  // base_game plus a barrier: the sender hands off through
  // broadcast-and-wait and reads what the loader produced.
  ProjectBuilder pb = base_game();
  pb.stage().variable("loaded", 0).variable("total", 0).variable("ready", 0).variable("done", 0);
  pb.sprite("loader")
      .costume("box", 16, 16)
      .on_flag({broadcast_and_wait(std::string("load")), set_var("total", var("loaded")),
                set_var("done", lit(1))})
      .on_receive("load", {wait_secs(lit(0.5)), set_var("loaded", lit(10)),
                           set_var("ready", lit(1))});
  return pb.build();
}

ProjectIR nonterminating_demo() {
  ProjectBuilder pb = base_game();
  pb.stage().variable("phase", 0).variable("steps", 0);
  pb.sprite("pacer")
      .costume("tick", 10, 10)
      .on_flag({repeat_until(gt(var("steps"), lit(4)),
                             {change_var("steps", lit(1)), wait_secs(lit(0.1))}),
                set_var("phase", lit(1))});
  return pb.build();
}

ProjectIR sprite_state_demo() {
  ProjectBuilder pb = base_game();
  pb.sprite("lamp")
      .costume("off", 12, 12)
      .costume("on", 12, 12)
      .hidden()
      .on_receive("round_start", {switch_costume(lit("on")), show()})
      .on_receive("game_over", {switch_costume(lit("off")), hide()});
  return pb.build();
}

ProjectIR sync_pair() {
  ProjectBuilder pb;
  pb.backdrop("plain");
  pb.stage().variable("ready", 0).variable("done", 0);
  pb.sprite("sender")
      .costume("s", 10, 10)
      .on_flag({broadcast_and_wait(std::string("sync")), set_var("done", lit(1))});
  pb.sprite("receiver")
      .costume("r", 10, 10)
      .on_receive("sync", {wait_secs(lit(0.5)), set_var("ready", lit(1))});
  return pb.build();
}

ProjectIR flappy_min() {
  // 5 targets, 16 hat scripts. Deliberately one sprite short of the
  // complexity filter.
  ProjectBuilder pb;
  pb.backdrop("sky").backdrop("over");
  pb.stage()
      .variable("score", 0)
      .variable("lives", 3)
      .variable("airborne", 0)
      .on_flag({switch_backdrop(lit("sky"))});

  pb.sprite("bird")
      .costume("mid", 24, 18)
      .costume("up", 24, 18)
      .at(-120, 0)
      .on_flag({goto_xy(lit(-120), lit(0)), show(), set_var("score", lit(0))})
      .on_key("space", {call_proc("flap %s", std::map<std::string, Arg>{{"strength", lit(12)}})})
      .on_receive("start", {set_var("airborne", lit(1))})
      .on_receive("game_over", {hide()})
      .define_proc("flap %s", {"strength"}, false,
                   {change_y(expr(proc_arg("strength"))), next_costume()});

  pb.sprite("pipe")
      .costume("pipe", 30, 120)
      .on_flag({repeat(lit(3), {create_clone_of("_myself_"), wait_secs(lit(1))})})
      .on_clone_start({goto_xy(expr(pick_random(lit(100), lit(200))), lit(0)),
                       wait_secs(lit(2)), delete_this_clone()})
      .on_receive("game_over", {hide()})
      .on_receive("start", {show()});

  pb.sprite("ground")
      .costume("flat", 480, 20)
      .at(0, -170)
      .on_flag({goto_xy(lit(0), lit(-170)), show()})
      .on_receive("start", {set_var("lives", lit(3))})
      .on_key("r", {broadcast("start")});

  pb.sprite("counter")
      .costume("digits", 20, 20)
      .on_flag({broadcast("start")})
      .on_receive("start", {switch_costume(lit(1))})
      .on_receive("game_over", {switch_backdrop(lit("over"))});

  return pb.build();
}

ProjectIR overedit_counter() {
  // Straight-line init project for the over-editing fixtures: every
  // signal settles at tick 0, so drift is a closed-form count.
  ProjectBuilder pb;
  pb.backdrop("plain");
  pb.stage()
      .variable("a", 0)
      .variable("b", 0)
      .variable("c", 0)
      .variable("d", 0)
      .variable("e", 0)
      .on_flag({set_var("a", lit(1)), set_var("b", lit(2)), set_var("c", lit(3))});
  pb.sprite("marker").costume("m", 10, 10);
  return pb.build();
}

const Block* find_set_block(const ProjectIR& p, const std::string& var_name) {
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      if (b.opcode != Opcode::data_setvariableto) continue;
      auto f = b.fields.find("VARIABLE");
      if (f != b.fields.end() && f->second.value.to_display_string() == var_name) {
        return &b;
      }
    }
  }
  return nullptr;
}

AtomicEdit modify_value_edit(const ProjectIR& p, const std::string& var_name, Scalar to) {
  const Block* b = find_set_block(p, var_name);
  const Target* t = p.owner_of_block(b->id);
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Modify;
  e.sprite_id = t->id;
  e.block_id = b->id;
  e.path = "input:VALUE";
  EditValue old_v, new_v;
  old_v.input = b->inputs.at("VALUE");
  new_v.input = InputValue::lit(std::move(to));
  e.old_value = old_v;
  e.new_value = new_v;
  return e;
}

AtomicEdit append_set_edit(const std::string& after_block,
                           const std::string& sprite_id, const std::string& fresh_id,
                           const std::string& var_name, const std::string& var_id, Scalar value) {
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Add;
  e.sprite_id = sprite_id;
  e.block_id = fresh_id;
  e.content.opcode = Opcode::data_setvariableto;
  e.content.fields.emplace("VARIABLE", FieldValue{Scalar(var_name), var_id});
  e.content.inputs.emplace("VALUE", InputValue::lit(std::move(value)));
  e.slot = AtomicEdit::Slot::Next;
  e.parent = after_block;
  e.next = std::nullopt;
  return e;
}

void write_overedit_fixtures(const fs::path& fixtures_dir) {
  ProjectIR counter = overedit_counter();
  PipelineConfig cfg;
  cfg.tick_budget = 40;
  cfg.checkpoint_interval = 10;
  cfg.seed = 1;
  ForgeResult res = forge(counter, cfg, {}, BugPatternTag::MissingInit);
  if (!res.instance) {
    std::cerr << "fixture forge failed\n";
    std::exit(1);
  }
  write_bundle(fixtures_dir / "overedit_bundle", *res.instance);

  // Over-editing model patches: the gold fix plus gratuitous extra edits.
  const ProjectIR& buggy = res.instance->buggy;
  const Target* stage = &buggy.targets.front();
  std::string var_d, var_e;
  for (const auto& [id, decl] : stage->variables) {
    if (decl.name == "d") var_d = id;
    if (decl.name == "e") var_e = id;
  }
  const Block* set_c = find_set_block(buggy, "c");

  Patch p4;
  p4.source = Patch::Source::Model;
  for (const auto& e : res.instance->inverse.edits) p4.edits.push_back(e);
  p4.edits.push_back(modify_value_edit(buggy, "b", Scalar(5)));
  p4.edits.push_back(modify_value_edit(buggy, "c", Scalar(30)));
  p4.edits.push_back(
      append_set_edit(set_c->id, stage->id, "stage.fix.d", "d", var_d, Scalar(7)));
  write_file(fixtures_dir / "overedit_4.patch.json", patch_to_json(p4));

  Patch p5 = p4;
  p5.edits.push_back(
      append_set_edit("stage.fix.d", stage->id, "stage.fix.e", "e", var_e, Scalar(9)));
  write_file(fixtures_dir / "overedit_5.patch.json", patch_to_json(p5));
}

}  // namespace

int main(int argc, char** argv) {
  fs::path out = argc > 1 ? argv[1] : "samples";
  fs::path resources = argc > 2 ? argv[2] : "resources";
  fs::create_directories(out / "forge");
  fs::create_directories(out / "fixtures");
  fs::create_directories(resources);

  write_file(out / "flappy_min.json", serialize_project(flappy_min()));
  write_file(out / "sync_pair.json", serialize_project(sync_pair()));

  ProjectIR base = base_game().build();
  write_file(out / "forge" / "missing_init_demo.json", serialize_project(base));
  write_file(out / "forge" / "untriggered_event_demo.json", serialize_project(base));
  write_file(out / "forge" / "incorrect_conditional_demo.json", serialize_project(base));
  write_file(out / "forge" / "clone_mgmt_demo.json", serialize_project(base));
  write_file(out / "forge" / "handler_conflict_demo.json", serialize_project(base));
  write_file(out / "forge" / "race_min.json", serialize_project(race_min()));
  write_file(out / "forge" / "nonterminating_loop_demo.json",
             serialize_project(nonterminating_demo()));
  write_file(out / "forge" / "sprite_state_demo.json", serialize_project(sprite_state_demo()));

  write_overedit_fixtures(out / "fixtures");

  write_file(resources / "scenario_templates.json", template_library_json());

  std::cout << "samples written to " << out << "\n";
  return 0;
}
