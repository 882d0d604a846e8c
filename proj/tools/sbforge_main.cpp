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

// Command-line front end. Exit codes: 0 success, 1 evaluation-negative,
// 2 input error, 3 policy failure, 4 forge exhaustion.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbforge/bundle.hpp"
#include "sbforge/config.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/forge.hpp"
#include "sbforge/metrics.hpp"
#include "sbforge/oracle.hpp"
#include "sbforge/project_ir.hpp"
#include "sbforge/refsem.hpp"
#include "sbforge/scenario_gen.hpp"
#include "sbforge/vm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sbforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitEvalNegative = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPolicyFailure = 3;
constexpr int kExitForgeFail = 4;

struct ConfigFlags {
  std::optional<uint64_t> seed;
  std::optional<int> reruns;
  std::optional<std::string> theta_pass;
  std::optional<std::string> theta_fail;
  std::optional<int> max_trials;
  std::optional<int> tick_budget;
  std::optional<int> checkpoint_interval;
  std::string config_file;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Pipeline seed; all randomness derives from it");
    cmd->add_option("--reruns", reruns, "Reruns R per validation (default 5)");
    cmd->add_option("--theta-pass", theta_pass, "Gold pass-rate threshold (default 0.9)");
    cmd->add_option("--theta-fail", theta_fail, "Buggy pass-rate threshold (default 0.1)");
    cmd->add_option("--max-trials", max_trials, "Forge trial budget K (default 20)");
    cmd->add_option("--tick-budget", tick_budget, "VM tick budget H (default 2000)");
    cmd->add_option("--checkpoint-interval", checkpoint_interval,
                    "Checkpoint every N ticks (default 10)");
    cmd->add_option("--config", config_file, "JSON config file (flags and env override it)");
  }

  /// Precedence: flags > SBFORGE_* env > config file > defaults.
  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!config_file.empty()) cfg = PipelineConfig::from_json(read_file(config_file));

    auto env_str = [](const char* name) -> std::optional<std::string> {
      const char* v = std::getenv(name);
      if (v == nullptr || *v == '\0') return std::nullopt;
      return std::string(v);
    };
    if (auto v = env_str("SBFORGE_SEED")) cfg.seed = std::stoull(*v);
    if (auto v = env_str("SBFORGE_RERUNS")) cfg.reruns = std::stoi(*v);
    if (auto v = env_str("SBFORGE_THETA_PASS")) cfg.theta_pass = Rational::from_decimal(*v);
    if (auto v = env_str("SBFORGE_THETA_FAIL")) cfg.theta_fail = Rational::from_decimal(*v);
    if (auto v = env_str("SBFORGE_MAX_TRIALS")) cfg.max_trials = std::stoi(*v);
    if (auto v = env_str("SBFORGE_TICK_BUDGET")) cfg.tick_budget = std::stoi(*v);
    if (auto v = env_str("SBFORGE_CHECKPOINT_INTERVAL")) cfg.checkpoint_interval = std::stoi(*v);

    if (seed) cfg.seed = *seed;
    if (reruns) cfg.reruns = *reruns;
    if (theta_pass) cfg.theta_pass = Rational::from_decimal(*theta_pass);
    if (theta_fail) cfg.theta_fail = Rational::from_decimal(*theta_fail);
    if (max_trials) cfg.max_trials = *max_trials;
    if (tick_budget) cfg.tick_budget = *tick_budget;
    if (checkpoint_interval) cfg.checkpoint_interval = *checkpoint_interval;
    cfg.check();
    return cfg;
  }
};

int cmd_validate(const std::string& path, bool require_complexity,
                 const std::string& refsem_path) {
  ProjectIR p = parse_project(read_file(path));
  ComplexityReport r = complexity_metrics(p);
  json j;
  j["sprites"] = r.sprites;
  j["scripts"] = r.scripts;
  j["broadcast_uses"] = r.broadcast_uses;
  j["custom_blocks"] = r.custom_blocks;
  j["passes"] = r.passes;
  bool refsem_clean = true;
  if (!refsem_path.empty()) {
    ReferenceSemantics rs = ReferenceSemantics::from_json(read_file(refsem_path));
    json violations = json::array();
    for (const RefsemViolation& v : validate_reference_semantics(rs, p)) {
      const char* kind = v.kind == RefsemViolation::Kind::UnresolvableTrigger
                             ? "unresolvable_trigger"
                             : (v.kind == RefsemViolation::Kind::UnknownSignal ? "unknown_signal"
                                                                               : "unknown_sprite");
      violations.push_back(json{{"kind", kind}, {"detail", v.detail}});
    }
    refsem_clean = violations.empty();
    j["refsem_violations"] = std::move(violations);
  }
  std::cout << j.dump() << "\n";
  if (require_complexity && !r.passes) return kExitPolicyFailure;
  if (!refsem_clean) return kExitPolicyFailure;
  return kExitOk;
}

int cmd_forge(const std::string& gold_path, const std::string& out_dir,
              const std::string& pattern, const ConfigFlags& flags) {
  PipelineConfig cfg = flags.resolve();
  ProjectIR gold = parse_project(read_file(gold_path));
  std::optional<BugPatternTag> override_tag;
  if (!pattern.empty()) {
    override_tag = pattern_from_name(pattern);
    if (!override_tag) {
      std::cerr << "unknown pattern: " << pattern << "\n";
      return kExitInputError;
    }
  }
  ForgeResult res = forge(gold, cfg, {}, override_tag);
  if (!res.instance) {
    std::cerr << "forge failed after " << res.trials_used << " trials\n";
    return kExitForgeFail;
  }
  write_bundle(out_dir, *res.instance);
  json j;
  j["pattern"] = pattern_name(res.instance->spec.ground_truth.mechanism);
  j["trials"] = res.trials_used;
  j["bundle"] = out_dir;
  j["assertions"] = res.instance->suite.assertions.size();
  j["scenarios"] = res.instance->suite.scenarios.size();
  j["config_digest"] = cfg.digest();
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_gen_scenarios(const std::string& project_path, const std::string& out_path,
                      const ConfigFlags& flags) {
  PipelineConfig cfg = flags.resolve();
  ProjectIR p = parse_project(read_file(project_path));
  InteractionMetadata meta = extract_metadata(p);
  std::vector<Scenario> scenarios =
      instantiate(template_library(), meta, cfg.tick_budget, cfg.checkpoint_interval);
  json j;
  j["config_digest"] = cfg.digest();
  json arr = json::array();
  for (const auto& s : scenarios) arr.push_back(json::parse(s.to_json()));
  j["scenarios"] = std::move(arr);
  std::string text = j.dump();
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    write_file(out_path, text);
    std::cout << "wrote " << scenarios.size() << " scenarios to " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_synth_tests(const std::string& gold_path, const std::string& buggy_path,
                    const std::string& out_path, const ConfigFlags& flags) {
  PipelineConfig cfg = flags.resolve();
  ProjectIR gold = parse_project(read_file(gold_path));
  ProjectIR buggy = parse_project(read_file(buggy_path));
  InteractionMetadata meta = extract_metadata(gold);
  std::vector<Scenario> scenarios =
      instantiate(template_library(), meta, cfg.tick_budget, cfg.checkpoint_interval);
  std::optional<TestSuite> suite = synthesize(gold, buggy, scenarios, cfg.synthesis());
  if (!suite) {
    std::cerr << "no discriminating assertion\n";
    return kExitEvalNegative;
  }
  std::string text = suite->to_json();
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    write_file(out_path, text);
    std::cout << "wrote suite with " << suite->assertions.size() << " assertions to " << out_path
              << "\n";
  }
  return kExitOk;
}

int cmd_run(const std::string& project_path, const std::string& suite_path,
            std::optional<int> reruns_flag, const std::string& trace_dir) {
  ProjectIR p = parse_project(read_file(project_path));
  TestSuite suite = TestSuite::from_json(read_file(suite_path));
  check_suite_signals(suite, p);  // a foreign suite fails fast, not mid-run
  int reruns = reruns_flag.value_or(suite.config.reruns);

  // One pass over (scenario, rerun); traces are reused for every assertion
  // of the scenario and optionally dumped as .trace.jsonl files.
  std::map<std::string, std::vector<Trace>> traces;
  for (const Scenario& s : suite.scenarios) {
    std::vector<Trace>& per = traces[s.id];
    for (int r = 1; r <= reruns; ++r) {
      per.push_back(run(p, s, s.seed_for_rerun(r)));
      if (!trace_dir.empty()) {
        fs::create_directories(trace_dir);
        std::string name = s.id + ".r" + std::to_string(r) + ".trace.jsonl";
        for (auto& c : name) {
          if (c == ':' || c == '/' || c == '+') c = '_';
        }
        write_file(fs::path(trace_dir) / name, per.back().to_jsonl());
      }
    }
  }
  for (const Assertion& a : suite.assertions) {
    int holds = 0;
    for (const Trace& t : traces.at(a.scenario_id)) {
      if (evaluate_assertion(a, t)) ++holds;
    }
    std::string label = a.feature.sort_key();
    label = label.substr(label.find(':') + 1);  // drop the rank prefix
    std::cout << (holds == reruns ? "PASS " : "FAIL ") << a.scenario_id << " " << label << " ("
              << holds << "/" << reruns << ")\n";
  }
  Rational rate = pass_rate(p, suite, reruns);
  std::cout << "pass_rate " << rate.num << "/" << rate.den << " = " << rate.to_double() << "\n";
  return rate >= suite.config.theta_pass ? kExitOk : kExitEvalNegative;
}

int cmd_apply(const std::string& project_path, const std::string& patch_path,
              const std::string& out_path) {
  ProjectIR p = parse_project(read_file(project_path));
  Patch patch = validate_patch(read_file(patch_path));
  ProjectIR patched = apply_patch(p, patch);
  std::string text = serialize_project(patched);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int cmd_score(const std::string& bundle_dir, const std::string& patch_path,
              const std::string& answer_path, const std::string& out_path,
              std::optional<int> reruns_flag) {
  BugInstance bug = read_bundle(bundle_dir);
  int reruns = reruns_flag.value_or(bug.suite.config.reruns);
  json out = json::object();
  if (!patch_path.empty()) {
    RepairScore rs = score_repair(bug, read_file(patch_path), reruns);
    out.update(json::parse(rs.to_json()));
  }
  if (!answer_path.empty()) {
    std::string text = read_file(answer_path);
    TmoAnswer ans = TmoAnswer::from_json(text);
    UnderstandingScore us = score_understanding(ans, bug.spec, bug.refsem);
    json uj = json::parse(us.to_json());
    json answer = json::parse(text, nullptr, false);
    if (answer.is_object() && answer.contains("global")) {
      GlobalAnswer ga;
      const json& g = answer["global"];
      ga.goal = g.value("goal", "");
      if (auto it = g.find("roles"); it != g.end()) {
        for (const auto& r : *it) {
          ga.roles.emplace_back(r.value("sprite_id", ""), r.value("role", ""));
        }
      }
      if (auto it = g.find("hooks"); it != g.end()) {
        for (const auto& h : *it) ga.hooks.push_back(h.get<std::string>());
      }
      GAcc gacc = score_global(ga, bug.refsem);
      uj["understanding"]["global"] =
          json{{"goal_matched", gacc.goal_matched},
               {"goal_needs_judge", gacc.goal_needs_judge},
               {"roles_matched", gacc.roles_matched},
               {"hooks_matched", gacc.hooks_matched}};
    }
    out.update(uj);
  }
  if (out.empty()) {
    std::cerr << "nothing to score: pass --patch and/or --answer\n";
    return kExitInputError;
  }
  std::string text = out.dump();
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    write_file(out_path, text);
    std::cout << text << "\n";
  }
  return kExitOk;
}

int cmd_report(const std::string& scores_dir, const std::string& out_path) {
  std::vector<std::string> files;
  if (fs::is_directory(scores_dir)) {
    for (const auto& entry : fs::directory_iterator(scores_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path().string());
      }
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::cerr << "no scores in " << scores_dir << "\n";
    return kExitPolicyFailure;
  }
  std::vector<std::string> texts;
  texts.reserve(files.size());
  for (const auto& f : files) texts.push_back(read_file(f));
  Aggregate agg = aggregate_scores(texts);
  std::cout << agg.to_table();
  std::cout << agg.to_json() << "\n";
  if (!out_path.empty()) write_file(out_path, agg.to_json());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic bug-forge and repair-evaluation pipeline for block projects"};
  app.require_subcommand(1);

  // validate
  std::string v_project, v_refsem;
  bool v_require = false;
  CLI::App* validate = app.add_subcommand("validate", "Parse a project and report complexity");
  validate->add_option("project", v_project, "project.json or zip container")->required();
  validate->add_flag("--require-complexity", v_require, "Exit 3 unless complexity thresholds pass");
  validate->add_option("--refsem", v_refsem, "Check a .refsem.json record against the project");

  // forge
  std::string f_gold, f_out, f_pattern;
  ConfigFlags f_flags;
  CLI::App* forge_cmd = app.add_subcommand("forge", "Inject one validated reversible bug");
  forge_cmd->add_option("gold", f_gold, "Gold project path")->required();
  forge_cmd->add_option("--out", f_out, "Bundle output directory")->required();
  forge_cmd->add_option("--pattern", f_pattern, "Force one bug pattern tag");
  f_flags.add_to(forge_cmd);

  // gen-scenarios
  std::string g_project, g_out;
  ConfigFlags g_flags;
  CLI::App* gen = app.add_subcommand("gen-scenarios", "Instantiate interaction scenarios");
  gen->add_option("project", g_project, "Project path")->required();
  gen->add_option("--out", g_out, "Output .scenario.json file");
  g_flags.add_to(gen);

  // synth-tests
  std::string s_gold, s_buggy, s_out;
  ConfigFlags s_flags;
  CLI::App* synth = app.add_subcommand("synth-tests", "Synthesize a differential test suite");
  synth->add_option("gold", s_gold, "Gold project path")->required();
  synth->add_option("buggy", s_buggy, "Buggy project path")->required();
  synth->add_option("--out", s_out, "Output .testsuite.json file");
  s_flags.add_to(synth);

  // run
  std::string r_project, r_suite, r_trace_dir;
  std::optional<int> r_reruns;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a test suite against a project");
  run_cmd->add_option("project", r_project, "Project path")->required();
  run_cmd->add_option("suite", r_suite, "Test suite path")->required();
  run_cmd->add_option("--reruns", r_reruns, "Override rerun count");
  run_cmd->add_option("--trace-dir", r_trace_dir, "Dump .trace.jsonl files here");

  // apply
  std::string a_project, a_patch, a_out;
  CLI::App* apply_cmd = app.add_subcommand("apply", "Apply a patch to a project");
  apply_cmd->add_option("project", a_project, "Project path")->required();
  apply_cmd->add_option("patch", a_patch, "Patch path")->required();
  apply_cmd->add_option("--out", a_out, "Output project path");

  // score
  std::string sc_bundle, sc_patch, sc_answer, sc_out;
  std::optional<int> sc_reruns;
  CLI::App* score_cmd = app.add_subcommand("score", "Score a repair patch and/or a TMO answer");
  score_cmd->add_option("bundle", sc_bundle, "Bug instance bundle directory")->required();
  score_cmd->add_option("--patch", sc_patch, "Model patch to score");
  score_cmd->add_option("--answer", sc_answer, "Structured TMO answer to score");
  score_cmd->add_option("--out", sc_out, "Write the score JSON here");
  score_cmd->add_option("--reruns", sc_reruns, "Override rerun count");

  // report
  std::string rp_dir, rp_out;
  CLI::App* report_cmd = app.add_subcommand("report", "Aggregate a directory of score files");
  report_cmd->add_option("scores", rp_dir, "Directory of score JSON files")->required();
  report_cmd->add_option("--out", rp_out, "Write the aggregate JSON here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(v_project, v_require, v_refsem);
    if (forge_cmd->parsed()) return cmd_forge(f_gold, f_out, f_pattern, f_flags);
    if (gen->parsed()) return cmd_gen_scenarios(g_project, g_out, g_flags);
    if (synth->parsed()) return cmd_synth_tests(s_gold, s_buggy, s_out, s_flags);
    if (run_cmd->parsed()) return cmd_run(r_project, r_suite, r_reruns, r_trace_dir);
    if (apply_cmd->parsed()) return cmd_apply(a_project, a_patch, a_out);
    if (score_cmd->parsed()) return cmd_score(sc_bundle, sc_patch, sc_answer, sc_out, sc_reruns);
    if (report_cmd->parsed()) return cmd_report(rp_dir, rp_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
