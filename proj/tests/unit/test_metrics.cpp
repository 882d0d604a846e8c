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

#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sbforge/builder.hpp"
#include "sbforge/bundle.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/metrics.hpp"
#include "sbforge/vm.hpp"

using namespace sbforge;
using namespace sbforge::build;

namespace {

std::string sample(const std::string& name) {
  std::string path = std::string(SBFORGE_SAMPLES_DIR) + "/" + name;
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Builds a bare trace with stage variables a,b (strings), 5 checkpoints.
/// Per checkpoint the drift denominator is 4: two vars, backdrop, and the
/// broadcast interval set.
Trace two_var_trace(const std::string& a_val, const std::string& b_val) {
  Trace t;
  t.scenario_id = "s";
  t.seed = 1;
  for (int tick = 0; tick <= 40; tick += 10) {
    Checkpoint cp;
    cp.tick = tick;
    TargetSnapshot stage;
    stage.variables.emplace("va", Scalar(a_val));
    stage.variables.emplace("vb", Scalar(b_val));
    cp.state.targets.emplace_back("stage", std::move(stage));
    cp.state.backdrop = 0;
    t.checkpoints.push_back(std::move(cp));
  }
  return t;
}

}  // namespace

TEST_CASE("drift of identical traces is zero") {
  std::vector<Trace> a{two_var_trace("x", "y")};
  CHECK(semantic_drift(a, a) == 0.0);
}

TEST_CASE("one categorical mismatch among 4 signals at 1 of 5 checkpoints is 0.05") {
  Trace gold = two_var_trace("x", "y");
  Trace patched = two_var_trace("x", "y");
  // Mutate vb at exactly one checkpoint.
  patched.checkpoints[2].state.targets[0].second.variables["vb"] = Scalar("z");
  double drift = semantic_drift({patched}, {gold});
  CHECK(drift == doctest::Approx(0.05).epsilon(1e-12));  // 1 / (4 * 5)
}

TEST_CASE("all-categorical full mismatch is exactly 1") {
  Trace gold = two_var_trace("x", "y");
  Trace patched = two_var_trace("p", "q");
  for (auto& cp : patched.checkpoints) {
    cp.state.backdrop = 1;                       // categorical mismatch
    cp.state.broadcasts = {"m1"};                // Jaccard 1 vs empty set
  }
  CHECK(semantic_drift({patched}, {gold}) == 1.0);
}

TEST_CASE("drift is symmetric and bounded on live traces") {
  ProjectBuilder pb;
  pb.backdrop("bg");
  pb.stage().variable("n", 0);
  pb.sprite("s").costume("c", 10, 10).on_flag(
      {repeat(lit(10), {change_var("n", lit(3)), wait_secs(lit(0.1))})});
  ProjectIR p1 = pb.build();

  ProjectBuilder pb2;
  pb2.backdrop("bg");
  pb2.stage().variable("n", 0);
  pb2.sprite("s").costume("c", 10, 10).on_flag(
      {repeat(lit(10), {change_var("n", lit(5)), wait_secs(lit(0.1))})});
  ProjectIR p2 = pb2.build();

  Scenario s;
  s.id = "idle";
  s.events = {{0, {InputEvent::Kind::GreenFlag, ""}}};
  s.tick_budget = 60;
  s.checkpoint_interval = 10;
  std::vector<Trace> a = run_reruns(p1, s, 3);
  std::vector<Trace> b = run_reruns(p2, s, 3);
  double ab = semantic_drift(a, b);
  double ba = semantic_drift(b, a);
  CHECK(ab == ba);
  CHECK(ab > 0.0);
  CHECK(ab <= 1.0);
  CHECK(semantic_drift(a, a) == 0.0);
}

TEST_CASE("missing checkpoints (early crash) score 1 for the remaining grid") {
  Trace gold = two_var_trace("x", "y");
  Trace crashed = two_var_trace("x", "y");
  crashed.checkpoints.resize(2);  // lost 3 of 5 checkpoints
  crashed.crash_reason = "runaway";
  double drift = semantic_drift({crashed}, {gold});
  // 3 missing checkpoints x 4 signals scored 1, of 20 total slots.
  CHECK(drift == doctest::Approx(12.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("misaligned traces are an error") {
  Trace a = two_var_trace("x", "y");
  Trace b = two_var_trace("x", "y");
  b.scenario_id = "other";
  CHECK_THROWS_AS(semantic_drift({a}, {b}), Error);
  CHECK_THROWS_AS(semantic_drift({a}, {}), Error);
}

TEST_CASE("trigger canonicalization: synonyms, case folding, ambiguity") {
  CHECK(canonicalize_trigger("when the green flag is clicked") == "green_flag");
  CHECK(canonicalize_trigger("KEY: Space") == "key:space");
  CHECK(canonicalize_trigger("pressing space") == "key:space");
  CHECK(canonicalize_trigger("message game_over") == "broadcast:game_over");
  CHECK(canonicalize_trigger("when I receive go") == "broadcast:go");
  CHECK(canonicalize_trigger("when the sprite Bonus is clicked") == "click:bonus");
  CHECK(canonicalize_trigger("when I start as a clone") == "clone_start");
  CHECK(canonicalize_trigger("green_flag") == "green_flag");
  CHECK(canonicalize_trigger("broadcast:game_over") == "broadcast:game_over");
  // Two plausible triggers: conservatively ambiguous.
  CHECK_FALSE(canonicalize_trigger("when the game starts or space is pressed").has_value());
  CHECK_FALSE(canonicalize_trigger("").has_value());
  CHECK_FALSE(canonicalize_trigger("sometime later").has_value());
}

TEST_CASE("understanding score is strict joint correctness") {
  BugSpec truth;
  truth.ground_truth.mechanism = BugPatternTag::DesyncMissingWait;
  truth.ground_truth.trigger_token = "green_flag";
  Feature outcome;
  outcome.kind = Feature::Kind::FinalEquals;
  outcome.signal = {SignalRef::Kind::Var, "stage", "stage.var.total"};
  outcome.value = Scalar(int64_t{10});
  truth.ground_truth.outcome = outcome;
  ReferenceSemantics refsem;

  TmoAnswer exact;
  exact.trigger_text = "green flag clicked";
  exact.mechanism = "desync_missing_wait";
  exact.outcome_predicate = outcome;
  UnderstandingScore s = score_understanding(exact, truth, refsem);
  CHECK(s.trigger_correct);
  CHECK(s.mechanism_correct);
  CHECK(s.outcome_correct);
  CHECK(s.u_acc_joint);

  TmoAnswer wrong_mech = exact;
  wrong_mech.mechanism = "missing_init";
  s = score_understanding(wrong_mech, truth, refsem);
  CHECK(s.trigger_correct);
  CHECK_FALSE(s.mechanism_correct);
  CHECK_FALSE(s.u_acc_joint);  // strict joint rule

  TmoAnswer ambiguous = exact;
  ambiguous.trigger_text = "when the game starts or space is pressed";
  s = score_understanding(ambiguous, truth, refsem);
  CHECK_FALSE(s.trigger_correct);
  CHECK_FALSE(s.u_acc_joint);

  // Prose-only outcome routes to the judge seam.
  TmoAnswer prose = exact;
  prose.outcome_predicate.reset();
  prose.outcome_text = "the total ends at ten";
  s = score_understanding(prose, truth, refsem);
  CHECK(s.outcome_needs_judge);
  CHECK_FALSE(s.outcome_correct);
  NullJudge null_judge;
  s = score_understanding(prose, truth, refsem, &null_judge);
  CHECK(s.outcome_needs_judge);  // the null judge never answers
}

TEST_CASE("trigger F1: perfect, disjoint, and the mixed 2/3 case") {
  using Rows = std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>;
  Rows perfect = {{{"green_flag"}, {"green_flag"}}, {{"key:space"}, {"key:space"}}};
  CHECK(trigger_f1(perfect) == 1.0);

  Rows disjoint = {{{"green_flag"}, {"key:space"}}};
  CHECK(trigger_f1(disjoint) == 0.0);

  // One truth token per instance, two predicted with one correct:
  // precision 0.5, recall 1.0, F1 = 2/3.
  Rows mixed = {{{"green_flag", "key:space"}, {"green_flag"}},
                {{"key:a", "broadcast:go"}, {"key:a"}}};
  CHECK(trigger_f1(mixed) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  CHECK(trigger_f1({}) == 0.0);
}

TEST_CASE("exact McNemar reproduces the reference p-values") {
  CHECK(mcnemar_exact(6, 0) == 0.03125);
  CHECK(mcnemar_exact(3, 0) == 0.25);
  CHECK(mcnemar_exact(0, 0) == 1.0);
}

TEST_CASE("McNemar symmetry, range, and monotonicity in the imbalance") {
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= 8; ++b) {
      double p = mcnemar_exact(a, b);
      CHECK(p == mcnemar_exact(b, a));
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
    }
  }
  // Fixed n = 10: p shrinks as the split grows more lopsided.
  double prev = 1.1;
  for (int a = 5; a <= 10; ++a) {
    double p = mcnemar_exact(a, 10 - a);
    CHECK(p <= prev + 1e-15);
    prev = p;
  }
}

TEST_CASE("score_repair on the bundled fixture: gold fix and over-edits") {
  BugInstance bug = read_bundle(std::string(SBFORGE_SAMPLES_DIR) + "/fixtures/overedit_bundle");

  // Gold-fix fixpoint.
  RepairScore gold_fix = score_repair(bug, patch_to_json(bug.inverse), 5);
  CHECK(gold_fix.functional_success);
  CHECK(gold_fix.d_edit == 0);
  CHECK(gold_fix.drift == 0.0);
  CHECK(gold_fix.failure == RepairScore::Failure::None);

  // Schema-invalid bytes.
  RepairScore bad = score_repair(bug, "{]", 5);
  CHECK_FALSE(bad.functional_success);
  CHECK(bad.failure == RepairScore::Failure::Schema);
  CHECK(bad.d_edit == static_cast<int>(normalize(bug.inverse).size()));

  // Empty patch leaves the bug in place.
  RepairScore empty = score_repair(bug, R"({"edits":[]})", 5);
  CHECK_FALSE(empty.functional_success);
  CHECK(empty.failure == RepairScore::Failure::AssertionFailed);
  CHECK(empty.d_edit == static_cast<int>(normalize(bug.inverse).size()));
  CHECK(empty.drift > 0.0);

  // Unapplicable patch (unknown block).
  RepairScore unapplicable = score_repair(
      bug,
      R"({"edits":[{"op":"modify","sprite_id":"stage","block_id":"ghost",
          "path":"opcode","old":"looks_show","new":"looks_hide"}]})",
      5);
  CHECK(unapplicable.failure == RepairScore::Failure::NotApplicable);
  CHECK(unapplicable.drift == 1.0);
}

TEST_CASE("score_global strict field matching") {
  ReferenceSemantics refsem;
  refsem.project_goal = "a game";
  refsem.roles = {{"spr.a", "the player"}, {"spr.b", "the enemy"}};
  RefsemHook h1;
  h1.trigger = "green_flag";
  RefsemHook h2;
  h2.trigger = "key:space";
  refsem.hooks = {h1, h2};

  GlobalAnswer full;
  full.goal = "a game";
  full.roles = {{"spr.a", "player"}, {"spr.b", "enemy"}};
  full.hooks = {"green_flag", "key:space"};
  GAcc g = score_global(full, refsem);
  CHECK(g.roles_matched);
  CHECK(g.hooks_matched);
  CHECK(g.goal_needs_judge);  // prose goal needs the judge seam

  GlobalAnswer missing_hook = full;
  missing_hook.hooks = {"green_flag"};
  CHECK_FALSE(score_global(missing_hook, refsem).hooks_matched);

  GlobalAnswer empty;
  g = score_global(empty, refsem);
  CHECK_FALSE(g.roles_matched);
  CHECK_FALSE(g.hooks_matched);
  CHECK_FALSE(g.goal_matched);
}

TEST_CASE("aggregation mirrors the report columns") {
  RepairScore r1;
  r1.functional_success = true;
  r1.d_edit = 0;
  r1.drift = 0.0;
  RepairScore r2;
  r2.functional_success = false;
  r2.d_edit = 3;
  r2.drift = 0.3;
  r2.failure = RepairScore::Failure::AssertionFailed;
  RepairScore r3 = r2;
  r3.d_edit = 4;

  UnderstandingScore u;
  u.trigger_correct = true;
  u.mechanism_correct = true;
  u.outcome_correct = true;
  u.u_acc_joint = true;
  u.predicted_triggers = {"green_flag"};
  u.truth_triggers = {"green_flag"};

  Aggregate agg = aggregate_scores({r1.to_json(), r2.to_json(), r3.to_json(), u.to_json()});
  CHECK(agg.repair_n == 3);
  CHECK(agg.success_rate == doctest::Approx(1.0 / 3.0));
  CHECK(agg.mean_d_edit == doctest::Approx(7.0 / 3.0));
  CHECK(agg.understanding_n == 1);
  CHECK(agg.u_acc == 1.0);
  CHECK(agg.m_acc == 1.0);
  CHECK(agg.t_f1 == 1.0);
  CHECK(agg.to_table().find("33%") != std::string::npos);
}
