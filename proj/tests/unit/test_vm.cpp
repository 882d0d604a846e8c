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
#include "sbforge/oracle.hpp"
#include "sbforge/vm.hpp"

using namespace sbforge;
using namespace sbforge::build;

namespace {

Scenario idle_scenario(int budget = 60, int interval = 10) {
  Scenario s;
  s.id = "idle";
  s.events = {{0, InputEvent{InputEvent::Kind::GreenFlag, ""}}};
  s.tick_budget = budget;
  s.checkpoint_interval = interval;
  return s;
}

Scalar final_var(const Trace& t, const ProjectIR& p, const std::string& name) {
  for (const auto& target : p.targets) {
    for (const auto& [id, decl] : target.variables) {
      if (decl.name == name) {
        auto v = signal_value(t.checkpoints.back().state, {SignalRef::Kind::Var, target.id, id});
        REQUIRE(v.has_value());
        return *v;
      }
    }
  }
  FAIL("no variable named ", name);
  return Scalar();
}

ProjectIR score_project() {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("score", 0);
  pb.sprite("s").costume("c", 10, 10).on_flag(
      {set_var("score", lit(0)), change_var("score", lit(7))});
  return pb.build();
}

}  // namespace

TEST_CASE("empty project runs to budget with checkpoints 0,10,20") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(20, 10), 1);
  REQUIRE(t.checkpoints.size() == 3);
  CHECK(t.checkpoints[0].tick == 0);
  CHECK(t.checkpoints[1].tick == 10);
  CHECK(t.checkpoints[2].tick == 20);
  CHECK(t.completed());
  for (const auto& cp : t.checkpoints) {
    CHECK(cp.state.targets[0].second.variables.empty());
    CHECK(cp.state.broadcasts.empty());
  }
}

TEST_CASE("set then change leaves score at 7") {
  ProjectIR p = score_project();
  Trace t = run(p, idle_scenario(), 1);
  CHECK(Scalar::feature_equal(final_var(t, p, "score"), Scalar(7.0)));
}

TEST_CASE("same seed twice is byte-identical; the contract behind replay") {
  ProjectIR p = score_project();
  Trace a = run(p, idle_scenario(), 99);
  Trace b = run(p, idle_scenario(), 99);
  CHECK(a.to_jsonl() == b.to_jsonl());
}

TEST_CASE("run_reruns under a fixed seed policy gives identical traces") {
  ProjectIR p = score_project();
  Scenario s = idle_scenario();
  s.seed_policy = {SeedPolicy::Kind::Fixed, 42};
  std::vector<Trace> traces = run_reruns(p, s, 5);
  REQUIRE(traces.size() == 5);
  for (const auto& t : traces) CHECK(t.to_jsonl() == traces[0].to_jsonl());
  // R=1 with a fixed seed equals a direct run with that seed.
  CHECK(run_reruns(p, s, 1)[0].to_jsonl() == run(p, s, 42).to_jsonl());
}

TEST_CASE("per-rerun seeds only disturb RNG-derived signals") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("r", 0).variable("k", 0);
  pb.sprite("s").costume("c", 10, 10).on_flag(
      {set_var("r", expr(pick_random(lit(1), lit(1000000)))), set_var("k", lit(9))});
  ProjectIR p = pb.build();
  std::vector<Trace> traces = run_reruns(p, idle_scenario(), 5);

  bool r_varies = false;
  for (int i = 1; i < 5; ++i) {
    if (!(final_var(traces[i], p, "r") == final_var(traces[0], p, "r"))) r_varies = true;
    // Everything except the RNG-fed variable matches rerun 1.
    CHECK(final_var(traces[i], p, "k") == final_var(traces[0], p, "k"));
    for (size_t cp = 0; cp < traces[0].checkpoints.size(); ++cp) {
      const auto& a = traces[i].checkpoints[cp].state;
      const auto& b = traces[0].checkpoints[cp].state;
      for (const SignalRef& sig : enumerate_signals(b)) {
        if (sig.kind == SignalRef::Kind::Var) {
          const Target* t = p.find_target(sig.target_id);
          if (t != nullptr && p.resolve_variable(*t, sig.id) != nullptr &&
              p.resolve_variable(*t, sig.id)->name == "r") {
            continue;
          }
        }
        CHECK(signal_value(a, sig) == signal_value(b, sig));
      }
    }
  }
  CHECK(r_varies);
}

TEST_CASE("wait suspends for max(1, round(30*n)) ticks") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("a", 0).variable("b", 0);
  pb.sprite("s").costume("c", 10, 10).on_flag(
      {set_var("a", lit(1)), wait_secs(lit(0.5)), set_var("b", lit(1))});
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(40, 10), 1);
  // a is set at tick 0; the wait covers ticks 1..14, b lands at tick 15.
  auto at = [&](int tick) { return t.checkpoints[static_cast<size_t>(tick / 10)].state; };
  CHECK(signal_value(at(0), {SignalRef::Kind::Var, "stage", "stage.var.a"})->to_number() == 1);
  CHECK(signal_value(at(10), {SignalRef::Kind::Var, "stage", "stage.var.b"})->to_number() == 0);
  CHECK(signal_value(at(20), {SignalRef::Kind::Var, "stage", "stage.var.b"})->to_number() == 1);
}

TEST_CASE("broadcast-and-wait is a barrier; plain broadcast races") {
  auto build_pair = [](bool with_wait) {
    ProjectBuilder pb;
    pb.backdrop("bg");
    pb.stage().variable("ready", 0).variable("done", 0);
    Script sender = with_wait
                        ? Script{broadcast_and_wait(std::string("m")), set_var("done", lit(1))}
                        : Script{broadcast(std::string("m")), set_var("done", lit(1))};
    pb.sprite("sender").costume("c", 10, 10).on_flag(std::move(sender));
    pb.sprite("receiver")
        .costume("c", 10, 10)
        .on_receive("m", {wait_secs(lit(0.5)), set_var("ready", lit(1))});
    return pb.build();
  };

  auto first_done_has_ready = [](const Trace& t) {
    for (const auto& cp : t.checkpoints) {
      auto done = signal_value(cp.state, {SignalRef::Kind::Var, "stage", "stage.var.done"});
      auto ready = signal_value(cp.state, {SignalRef::Kind::Var, "stage", "stage.var.ready"});
      if (done->to_number() == 1) return ready->to_number() == 1;
    }
    return true;  // done never observed
  };

  ProjectIR barrier = build_pair(true);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Trace t = run(barrier, idle_scenario(60, 10), seed);
    CHECK(first_done_has_ready(t));
  }

  // The race witness: without the wait, done=1 is visible before ready=1.
  ProjectIR racy = build_pair(false);
  Trace t = run(racy, idle_scenario(60, 10), 1);
  CHECK_FALSE(first_done_has_ready(t));
}

TEST_CASE("clone count equals creations minus deletions") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("n", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_flag({repeat(lit(5), {create_clone_of("_myself_")})})
      .on_clone_start({change_var("n", lit(1)),
                       if_then(lt(var("n"), lit(3)), {delete_this_clone()})});
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(60, 10), 1);
  auto clones =
      signal_value(t.checkpoints.back().state, {SignalRef::Kind::CloneCount, "spr.s", ""});
  CHECK(clones->to_number() == 3);  // 5 created, clones 1 and 2 deleted themselves
}

TEST_CASE("clone creation beyond the cap is a silent no-op") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("n", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_flag({repeat(lit(400), {create_clone_of("_myself_")})});
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(500, 50), 1);
  auto clones =
      signal_value(t.checkpoints.back().state, {SignalRef::Kind::CloneCount, "spr.s", ""});
  CHECK(clones->to_number() == kCloneCap);
  CHECK(t.completed());
}

TEST_CASE("renaming a variable's display name does not change traces; retargeting does") {
  auto build = [](const std::string& display, bool retarget) {
    ProjectBuilder pb;
    pb.backdrop("bg");
    pb.stage().variable(display, 0).variable("other", 0);
    pb.sprite("s").costume("c", 10, 10).on_flag({set_var(display, lit(5))});
    ProjectIR p = pb.build();
    if (retarget) {
      // Point the set block's VARIABLE field at `other` instead.
      for (auto& t : p.targets) {
        for (auto& [id, b] : t.blocks) {
          if (b.opcode == Opcode::data_setvariableto) {
            b.fields["VARIABLE"].ref_id = "stage.var.other";
          }
        }
      }
    }
    return p;
  };
  // Same ids, different display name: byte-identical traces.
  ProjectIR a = build("score", false);
  ProjectIR b = build("score", false);
  for (auto& t : b.targets) {
    for (auto& [id, v] : t.variables) {
      if (v.name == "score") v.name = "points";
    }
  }
  CHECK(run(a, idle_scenario(), 3).to_jsonl() == run(b, idle_scenario(), 3).to_jsonl());

  // Retargeted id: the write lands on the other variable.
  ProjectIR c = build("score", true);
  Trace t = run(c, idle_scenario(), 3);
  CHECK(signal_value(t.checkpoints.back().state, {SignalRef::Kind::Var, "stage", "stage.var.other"})
            ->to_number() == 5);
  CHECK(signal_value(t.checkpoints.back().state, {SignalRef::Kind::Var, "stage", "stage.var.score"})
            ->to_number() == 0);
}

TEST_CASE("checkpoint ticks strictly increase") {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    ProjectIR p = testgen::random_project(seed);
    Scenario s = idle_scenario(100, 7);
    Trace t = run(p, s, seed);
    for (size_t i = 1; i < t.checkpoints.size(); ++i) {
      CHECK(t.checkpoints[i].tick > t.checkpoints[i - 1].tick);
    }
  }
}

TEST_CASE("runaway warp loops crash the run with reason runaway") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("x", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_flag({call_proc("spin", {})})
      .define_proc("spin", {}, true, {forever({change_var("x", lit(1))})});
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(), 1);
  REQUIRE_FALSE(t.completed());
  CHECK(*t.crash_reason == "runaway");
}

TEST_CASE("unbounded recursion crashes with reason recursion") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("x", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_flag({call_proc("rec", {})})
      .define_proc("rec", {}, false, {change_var("x", lit(1)), call_proc("rec", {})});
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(), 1);
  REQUIRE_FALSE(t.completed());
  CHECK(*t.crash_reason == "recursion");
}

TEST_CASE("key hats fire on the press edge only; sensing reflects held state") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("presses", 0).variable("held", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_key("space", {change_var("presses", lit(1))})
      .on_flag({forever({if_then(key_pressed("space"), {change_var("held", lit(1))})})});
  ProjectIR p = pb.build();
  Scenario s;
  s.id = "hold";
  s.events = {{0, {InputEvent::Kind::GreenFlag, ""}},
              {10, {InputEvent::Kind::KeyDown, "space"}},
              {20, {InputEvent::Kind::KeyUp, "space"}}};
  s.tick_budget = 40;
  s.checkpoint_interval = 10;
  Trace t = run(p, s, 1);
  CHECK(final_var(t, p, "presses").to_number() == 1);  // edge only, no repeat
  // Held for ticks 10..19: the polling loop sees it 10 times.
  CHECK(final_var(t, p, "held").to_number() == 10);
}

TEST_CASE("broadcast restarts a running receiver from its hat") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("starts", 0).variable("finished", 0);
  pb.sprite("s").costume("c", 10, 10).on_receive(
      "go", {change_var("starts", lit(1)), wait_secs(lit(1)), set_var("finished", lit(1))});
  ProjectIR p = pb.build();
  Scenario s;
  s.id = "two";
  s.events = {{0, {InputEvent::Kind::InjectBroadcast, "go"}},
              {10, {InputEvent::Kind::InjectBroadcast, "go"}}};
  s.tick_budget = 60;
  s.checkpoint_interval = 10;
  Trace t = run(p, s, 1);
  CHECK(final_var(t, p, "starts").to_number() == 2);
  CHECK(final_var(t, p, "finished").to_number() == 1);
  // The first wait never completed: finished flips at tick 10+30=40.
  auto at30 = signal_value(t.checkpoints[3].state, {SignalRef::Kind::Var, "stage", "stage.var.finished"});
  CHECK(at30->to_number() == 0);
}

TEST_CASE("touching uses costume-scaled bounding boxes and stage edges") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("hit", 0).variable("edge", 0);
  pb.sprite("a")
      .costume("c", 40, 40)
      .at(0, 0)
      .on_flag({if_then(touching("b"), {set_var("hit", lit(1))}),
                if_then(touching("_edge_"), {set_var("edge", lit(1))})});
  pb.sprite("b").costume("c", 40, 40).at(30, 0);
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(20, 10), 1);
  CHECK(final_var(t, p, "hit").to_number() == 1);  // |dx|=30 <= (40+40)/2
  CHECK(final_var(t, p, "edge").to_number() == 0);

  // Move them apart and to the edge.
  ProjectBuilder pb2;
  pb2.backdrop("bg");
  pb2.stage().variable("hit", 0).variable("edge", 0);
  pb2.sprite("a")
      .costume("c", 40, 40)
      .at(-230, 0)
      .on_flag({if_then(touching("b"), {set_var("hit", lit(1))}),
                if_then(touching("_edge_"), {set_var("edge", lit(1))})});
  pb2.sprite("b").costume("c", 40, 40).at(200, 0);
  Trace t2 = run(pb2.build(), idle_scenario(20, 10), 1);
  CHECK(final_var(t2, pb2.build(), "hit").to_number() == 0);
  CHECK(final_var(t2, pb2.build(), "edge").to_number() == 1);
}

TEST_CASE("stop all / stop this script / stop other scripts") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("a", 0).variable("b", 0).variable("c", 0);
  pb.sprite("s")
      .costume("c", 10, 10)
      .on_flag({wait_secs(lit(0.2)), set_var("a", lit(1)), stop_all(), set_var("a", lit(2))})
      .on_flag({wait_secs(lit(1)), set_var("b", lit(1))});
  ProjectIR p = pb.build();
  Trace t = run(p, idle_scenario(60, 10), 1);
  CHECK(final_var(t, p, "a").to_number() == 1);  // stop all killed the tail
  CHECK(final_var(t, p, "b").to_number() == 0);  // and the sibling's pending wait
}

TEST_CASE("scenario referencing a missing sprite or message throws TargetNotFound") {
  ProjectIR p = score_project();
  Scenario s;
  s.id = "bad";
  s.events = {{0, {InputEvent::Kind::SpriteClick, "spr.nope"}}};
  s.tick_budget = 10;
  s.checkpoint_interval = 5;
  CHECK_THROWS_AS(run(p, s, 1), Error);
  Scenario s2;
  s2.id = "bad2";
  s2.events = {{0, {InputEvent::Kind::InjectBroadcast, "ghost"}}};
  s2.tick_budget = 10;
  s2.checkpoint_interval = 5;
  try {
    run(p, s2, 1);
    FAIL("expected TargetNotFound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TargetNotFound);
  }
}

TEST_CASE("evaluate_assertion basics") {
  ProjectIR p = score_project();
  Trace t = run(p, idle_scenario(), 1);

  Feature f;
  f.kind = Feature::Kind::FinalEquals;
  f.signal = {SignalRef::Kind::Var, "stage", "stage.var.score"};
  f.value = Scalar(7.0);
  CHECK(evaluate_assertion({f, "idle"}, t));

  Feature g;
  g.kind = Feature::Kind::BroadcastOccurred;
  g.message = "game_over";
  CHECK_FALSE(evaluate_assertion({g, "idle"}, t));  // nothing was broadcast

  // A crash fails every assertion, even broadcast_absent.
  Trace crashed = t;
  crashed.crash_reason = "runaway";
  CHECK_FALSE(evaluate_assertion({f, "idle"}, crashed));
  Feature h;
  h.kind = Feature::Kind::BroadcastAbsent;
  h.message = "anything";
  CHECK_FALSE(evaluate_assertion({h, "idle"}, crashed));

  // Unknown signals are reported as such.
  Feature u;
  u.kind = Feature::Kind::FinalEquals;
  u.signal = {SignalRef::Kind::Var, "stage", "stage.var.ghost"};
  u.value = Scalar(0);
  CHECK_THROWS_AS(evaluate_assertion({u, "idle"}, t), Error);
}

TEST_CASE("trace JSONL round-trips") {
  ProjectIR p = testgen::random_project(11);
  Trace t = run(p, idle_scenario(50, 10), 4);
  Trace u = Trace::from_jsonl(t.to_jsonl());
  CHECK(t == u);
  CHECK(u.to_jsonl() == t.to_jsonl());
}
