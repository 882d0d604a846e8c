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

// Drives the installed binary end to end and pins the exit-code contract:
// 0 success, 1 evaluation-negative, 2 input error, 3 policy failure,
// 4 forge exhaustion.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sbforge/bundle.hpp"
#include "sbforge/util.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args, bool prepend_bin = true) {
  std::string cmd = (prepend_bin ? std::string(SBFORGE_CLI_BIN) + " " + args : args) + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
  int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string samples(const std::string& rel) {
  return std::string(SBFORGE_SAMPLES_DIR) + "/" + rel;
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "sbforge_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string dir_digest(const fs::path& dir) {
  std::string all;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    all += f.filename().string() + ":" + sbforge::digest_hex(sbforge::read_file(f)) + "\n";
  }
  return sbforge::digest_hex(all);
}

}  // namespace

TEST_CASE("validate: complexity report and exit codes") {
  CliResult ok = run_cli("validate " + samples("forge/race_min.json") + " --require-complexity");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("\"passes\":true") != std::string::npos);

  // flappy_min parses but is one sprite short of the filter.
  CliResult sparse = run_cli("validate " + samples("flappy_min.json") + " --require-complexity");
  CHECK(sparse.exit_code == 3);

  fs::path bad = scratch_dir() / "bad.json";
  sbforge::write_file(bad, "{nope");
  CliResult malformed = run_cli("validate " + bad.string());
  CHECK(malformed.exit_code == 2);
}

TEST_CASE("forge: bundle layout, exhaustion, and digest determinism") {
  fs::path out = scratch_dir() / "bundle_a";
  fs::remove_all(out);
  CliResult forged = run_cli("forge " + samples("forge/race_min.json") + " --out " + out.string() +
                             " --pattern desync_missing_wait --seed 11 --tick-budget 300");
  CHECK(forged.exit_code == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    (void)e;
    ++files;
  }
  CHECK(files == 7);

  // No clone blocks anywhere in sync_pair: clone_mgmt_error cannot apply.
  CliResult exhausted = run_cli("forge " + samples("sync_pair.json") + " --out " +
                                (scratch_dir() / "bundle_none").string() +
                                " --pattern clone_mgmt_error --tick-budget 300");
  CHECK(exhausted.exit_code == 4);

  // Same seed, same bytes.
  fs::path out2 = scratch_dir() / "bundle_b";
  fs::remove_all(out2);
  CliResult forged2 = run_cli("forge " + samples("forge/race_min.json") + " --out " +
                              out2.string() +
                              " --pattern desync_missing_wait --seed 11 --tick-budget 300");
  CHECK(forged2.exit_code == 0);
  CHECK(dir_digest(out) == dir_digest(out2));
}

TEST_CASE("run: gold passes, buggy fails, foreign suites are input errors") {
  fs::path out = scratch_dir() / "bundle_run";
  fs::remove_all(out);
  REQUIRE(run_cli("forge " + samples("forge/race_min.json") + " --out " + out.string() +
                  " --pattern desync_missing_wait --seed 3 --tick-budget 300")
              .exit_code == 0);

  CliResult gold = run_cli("run " + (out / "gold.json").string() + " " +
                           (out / "testsuite.json").string());
  CHECK(gold.exit_code == 0);
  CHECK(gold.output.find("pass_rate 5/5") != std::string::npos);

  CliResult buggy = run_cli("run " + (out / "buggy.json").string() + " " +
                            (out / "testsuite.json").string());
  CHECK(buggy.exit_code == 1);
  CHECK(buggy.output.find("pass_rate 0/5") != std::string::npos);

  // A suite for a different project references unknown signals.
  CliResult foreign = run_cli("run " + samples("flappy_min.json") + " " +
                              (out / "testsuite.json").string());
  CHECK(foreign.exit_code == 2);
  CHECK(foreign.output.find("UnknownSignal") != std::string::npos);
}

TEST_CASE("score: inverse patch, empty patch, malformed patch") {
  fs::path out = scratch_dir() / "bundle_score";
  fs::remove_all(out);
  REQUIRE(run_cli("forge " + samples("forge/missing_init_demo.json") + " --out " + out.string() +
                  " --pattern missing_init --seed 5 --tick-budget 300")
              .exit_code == 0);

  CliResult inverse = run_cli("score " + out.string() + " --patch " +
                              (out / "inverse.patch.json").string());
  CHECK(inverse.exit_code == 0);
  CHECK(inverse.output.find("\"functional_success\":true") != std::string::npos);
  CHECK(inverse.output.find("\"d_edit\":0") != std::string::npos);

  fs::path empty = scratch_dir() / "empty.patch.json";
  sbforge::write_file(empty, R"({"edits":[]})");
  CliResult failed = run_cli("score " + out.string() + " --patch " + empty.string());
  CHECK(failed.exit_code == 0);  // scoring succeeded; the repair did not
  CHECK(failed.output.find("\"functional_success\":false") != std::string::npos);

  fs::path bad = scratch_dir() / "bad.patch.json";
  sbforge::write_file(bad, "not json");
  CliResult schema = run_cli("score " + out.string() + " --patch " + bad.string());
  CHECK(schema.exit_code == 0);
  CHECK(schema.output.find("\"failure_reason\":\"schema\"") != std::string::npos);
}

TEST_CASE("score: structured TMO answers") {
  fs::path out = scratch_dir() / "bundle_tmo";
  fs::remove_all(out);
  REQUIRE(run_cli("forge " + samples("forge/handler_conflict_demo.json") + " --out " +
                  out.string() + " --pattern handler_conflict --seed 5 --tick-budget 300")
              .exit_code == 0);
  sbforge::BugInstance bug = sbforge::read_bundle(out);
  nlohmann::json answer;
  answer["trigger"] = bug.spec.ground_truth.trigger_token;
  answer["mechanism"] = "handler_conflict";
  answer["outcome"] =
      nlohmann::json{{"text", "acts twice"},
                     {"predicate", nlohmann::json::parse(bug.spec.ground_truth.outcome.to_json())}};
  fs::path ans = scratch_dir() / "answer.json";
  sbforge::write_file(ans, answer.dump());
  CliResult scored = run_cli("score " + out.string() + " --answer " + ans.string());
  CHECK(scored.exit_code == 0);
  CHECK(scored.output.find("\"u_acc_joint\":true") != std::string::npos);
}

TEST_CASE("report: aggregates a directory and rejects an empty one") {
  fs::path dir = scratch_dir() / "scores";
  fs::remove_all(dir);
  fs::create_directories(dir);
  sbforge::write_file(dir / "a.json",
                      R"({"repair":{"functional_success":true,"pass_rate":1.0,"d_edit":0,)"
                      R"("drift":0.0,"failure_reason":null}})");
  sbforge::write_file(dir / "b.json",
                      R"({"repair":{"functional_success":false,"pass_rate":0.0,"d_edit":4,)"
                      R"("drift":0.25,"failure_reason":"assertion_failed"}})");
  sbforge::write_file(dir / "c.json",
                      R"({"repair":{"functional_success":false,"pass_rate":0.0,"d_edit":2,)"
                      R"("drift":0.5,"failure_reason":"crash"},)"
                      R"("understanding":{"trigger_correct":true,"mechanism_correct":true,)"
                      R"("outcome_correct":true,"u_acc_joint":true,"outcome_needs_judge":false,)"
                      R"("predicted_triggers":["green_flag"],"truth_triggers":["green_flag"]}})");

  CliResult rep = run_cli("report " + dir.string());
  CHECK(rep.exit_code == 0);
  CHECK(rep.output.find("33%") != std::string::npos);         // 1 of 3 repairs
  CHECK(rep.output.find("\"u_acc\":1.0") != std::string::npos);

  fs::path empty = scratch_dir() / "scores_empty";
  fs::remove_all(empty);
  fs::create_directories(empty);
  CliResult none = run_cli("report " + empty.string());
  CHECK(none.exit_code == 3);
  CHECK(none.output.find("no scores") != std::string::npos);
}

TEST_CASE("validate --refsem checks a record against the project") {
  fs::path out = scratch_dir() / "bundle_refsem";
  fs::remove_all(out);
  REQUIRE(run_cli("forge " + samples("forge/missing_init_demo.json") + " --out " + out.string() +
                  " --pattern missing_init --seed 5 --tick-budget 300")
              .exit_code == 0);
  // The bundle's own record validates against its gold project.
  CliResult clean = run_cli("validate " + (out / "gold.json").string() + " --refsem " +
                            (out / "refsem.json").string());
  CHECK(clean.exit_code == 0);
  CHECK(clean.output.find("\"refsem_violations\":[]") != std::string::npos);

  // Against an unrelated project the triggers and signals fail to resolve.
  CliResult foreign = run_cli("validate " + samples("sync_pair.json") + " --refsem " +
                              (out / "refsem.json").string());
  CHECK(foreign.exit_code == 3);
  CHECK(foreign.output.find("unknown_signal") != std::string::npos);
}

TEST_CASE("run --trace-dir dumps one trace file per scenario and rerun") {
  fs::path out = scratch_dir() / "bundle_traces";
  fs::remove_all(out);
  REQUIRE(run_cli("forge " + samples("sync_pair.json") + " --out " + out.string() +
                  " --pattern desync_missing_wait --seed 3 --tick-budget 100")
              .exit_code == 0);
  fs::path traces = scratch_dir() / "traces";
  fs::remove_all(traces);
  CliResult res = run_cli("run " + (out / "gold.json").string() + " " +
                          (out / "testsuite.json").string() + " --trace-dir " + traces.string());
  CHECK(res.exit_code == 0);
  int n = 0;
  for (const auto& e : fs::directory_iterator(traces)) {
    CHECK(e.path().string().find(".trace.jsonl") != std::string::npos);
    std::string text = sbforge::read_file(e.path());
    CHECK(text.find("\"type\":\"header\"") != std::string::npos);
    CHECK(text.find("\"type\":\"end\"") != std::string::npos);
    ++n;
  }
  CHECK(n > 0);
}

TEST_CASE("environment variables override defaults but not flags") {
  // SBFORGE_TICK_BUDGET shapes the scenario files gen-scenarios writes.
  std::string base = "gen-scenarios " + samples("sync_pair.json");
  CliResult via_env = run_cli("env SBFORGE_TICK_BUDGET=123 " + std::string(SBFORGE_CLI_BIN) +
                                  " gen-scenarios " + samples("sync_pair.json"),
                              /*prepend_bin=*/false);
  CHECK(via_env.exit_code == 0);
  CHECK(via_env.output.find("\"tick_budget\":123") != std::string::npos);

  CliResult flag_wins = run_cli("env SBFORGE_TICK_BUDGET=123 " + std::string(SBFORGE_CLI_BIN) +
                                    " gen-scenarios " + samples("sync_pair.json") +
                                    " --tick-budget 77",
                                /*prepend_bin=*/false);
  CHECK(flag_wins.exit_code == 0);
  CHECK(flag_wins.output.find("\"tick_budget\":77") != std::string::npos);
}

TEST_CASE("gen-scenarios and synth-tests and apply") {
  fs::path scen = scratch_dir() / "race.scenario.json";
  CliResult gen = run_cli("gen-scenarios " + samples("forge/race_min.json") + " --out " +
                          scen.string());
  CHECK(gen.exit_code == 0);
  CHECK(fs::exists(scen));

  // gold vs itself discriminates nothing.
  CliResult nothing = run_cli("synth-tests " + samples("forge/race_min.json") + " " +
                              samples("forge/race_min.json") + " --tick-budget 200");
  CHECK(nothing.exit_code == 1);
  CHECK(nothing.output.find("no discriminating assertion") != std::string::npos);

  // apply with a malformed patch is an input error.
  fs::path bad = scratch_dir() / "bad2.patch.json";
  sbforge::write_file(bad, "[1,2,3]");
  CliResult apply = run_cli("apply " + samples("forge/race_min.json") + " " + bad.string());
  CHECK(apply.exit_code == 2);
}
