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

// Scoring: functional repair success, patch minimality (edit distance),
// behavioral drift, structured trigger-mechanism-outcome answers, and the
// paired-outcome significance test.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbforge/forge.hpp"
#include "sbforge/trace.hpp"

namespace sbforge {

struct RepairScore {
  enum class Failure { None, Schema, NotApplicable, Crash, AssertionFailed };
  bool functional_success = false;
  double pass_rate = 0.0;
  int d_edit = 0;
  double drift = 1.0;
  Failure failure = Failure::None;

  std::string to_json() const;
  static RepairScore from_json(std::string_view text);
};

/// validate -> apply to buggy -> run the bundle's suite over R reruns ->
/// d_edit against the gold (inverse) patch -> drift against fresh gold
/// traces on the same scenarios and seeds. Failures are encoded, never
/// thrown; unexecutable patches score drift 1.
RepairScore score_repair(const BugInstance& bug, std::string_view patch_bytes, int reruns);

/// Mean per-signal discrepancy over aligned (scenario, seed, checkpoint,
/// signal) tuples: numeric signals scale by the observed range, looks and
/// lists are 0/1, per-interval broadcast sets use Jaccard distance, and
/// checkpoints missing on either side (early crash) count 1 for every
/// signal. Symmetric; 0 iff traces identical on the logged signals.
double semantic_drift(const std::vector<Trace>& patched, const std::vector<Trace>& gold);

/// Rule-based mapping of free text onto the canonical trigger vocabulary,
/// with a conservative fuzzy fallback. nullopt when zero or multiple
/// candidates match (ambiguous).
std::optional<std::string> canonicalize_trigger(std::string_view text);

struct JudgeVerdict {
  bool available = false;  // false: no judge wired in, caller records needs_judge
  bool match = false;
  int score = 0;  // 1..5 rubric scale
};

/// Seam for an external explanation judge. The library ships only
/// NullJudge; wiring a real one is out of scope by design.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict judge(const std::string& predicted, const std::string& reference) = 0;
};

class NullJudge : public Judge {
 public:
  JudgeVerdict judge(const std::string&, const std::string&) override { return {}; }
};

struct TmoAnswer {
  std::string trigger_text;
  std::string mechanism;  // one of the eight pattern tags
  std::string outcome_text;
  std::optional<Feature> outcome_predicate;

  static TmoAnswer from_json(std::string_view text);
};

struct GlobalAnswer {
  std::string goal;
  std::vector<std::pair<std::string, std::string>> roles;  // sprite id -> text
  std::vector<std::string> hooks;  // trigger tokens
};

struct GAcc {
  bool goal_matched = false;
  bool goal_needs_judge = false;
  bool roles_matched = false;
  bool hooks_matched = false;
};

struct UnderstandingScore {
  bool trigger_correct = false;
  bool mechanism_correct = false;
  bool outcome_correct = false;
  bool outcome_needs_judge = false;
  bool u_acc_joint = false;
  std::vector<std::string> predicted_triggers;
  std::vector<std::string> truth_triggers;
  std::optional<GAcc> global;

  std::string to_json() const;
};

UnderstandingScore score_understanding(const TmoAnswer& ans, const BugSpec& truth,
                                       const ReferenceSemantics& refsem, Judge* judge = nullptr);

GAcc score_global(const GlobalAnswer& ans, const ReferenceSemantics& refsem,
                  Judge* judge = nullptr);

/// Micro-averaged F1 over trigger-token multisets.
double trigger_f1(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& instances);

/// Two-sided exact McNemar test on discordant counts: binomial(n01+n10,
/// 1/2), p = min(1, 2*min(P[X<=n01], P[X>=n01])); 1.0 when there are no
/// discordant pairs.
double mcnemar_exact(int n01, int n10);

/// Aggregate over per-instance score files (cmd_report).
struct Aggregate {
  int repair_n = 0;
  double success_rate = 0.0;
  double mean_d_edit = 0.0;
  double mean_drift = 0.0;
  int understanding_n = 0;
  double g_acc = 0.0;
  double u_acc = 0.0;
  double t_f1 = 0.0;
  double m_acc = 0.0;

  std::string to_json() const;
  std::string to_table() const;
};

Aggregate aggregate_scores(const std::vector<std::string>& score_jsons);

}  // namespace sbforge
