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

// Bug forge: injects exactly one reversible, localized fault (at most
// three blocks touched, one target) from an eight-pattern catalog, then
// validates it with the inject-and-validate loop: synthesized differential
// tests must pass the gold project (rate >= theta_pass) and fail the buggy
// variant (rate <= theta_fail) over R reruns, within K trials.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbforge/config.hpp"
#include "sbforge/oracle.hpp"
#include "sbforge/patch.hpp"
#include "sbforge/project_ir.hpp"
#include "sbforge/refsem.hpp"
#include "sbforge/scenario_gen.hpp"
#include "sbforge/util.hpp"

namespace sbforge {

enum class BugPatternTag {
  MissingInit,
  DesyncMissingWait,
  UntriggeredEvent,
  NonterminatingLoop,
  IncorrectConditional,
  SpriteStateMismatch,
  CloneMgmtError,
  HandlerConflict,
};

const std::vector<BugPatternTag>& pattern_catalog();  // fixed order
const char* pattern_name(BugPatternTag tag);
std::optional<BugPatternTag> pattern_from_name(std::string_view name);

/// Candidate injection site: the primary block plus the concrete operator
/// variant realizing the pattern there.
struct Site {
  BugPatternTag pattern = BugPatternTag::MissingInit;
  std::string target_id;
  std::string block_id;
  std::string variant;  // e.g. "delete", "perturb", "flip", "not_wrap"
  // Ranking signals: prefer sites on a hat-to-observable-write chain.
  bool hat_reachable = false;
  int downstream_writes = 0;
  int script_length = 0;
};

/// Coverage-aware pattern choice: minimal current count wins, ties break
/// by catalog order.
BugPatternTag select_pattern(const std::vector<BugPatternTag>& catalog,
                             const std::map<BugPatternTag, int>& coverage);

/// All eligible sites for a pattern, best first. Deterministic given the
/// rng state (rng only shuffles rank ties).
std::vector<Site> eligible_sites(const ProjectIR& p, BugPatternTag pattern, SplitMix64& rng);

/// The top-ranked site, or nullopt when the pattern has no eligible site.
std::optional<Site> select_site(const ProjectIR& p, BugPatternTag pattern, SplitMix64& rng);

/// Applies the pattern's reversible operator at the site. The forward
/// patch touches at most 3 blocks in one target. Throws
/// Error(IneligibleSite) when the site does not fit the pattern.
std::pair<ProjectIR, Patch> apply_operator(const ProjectIR& p, BugPatternTag pattern,
                                           const Site& site);

struct BugSpec {
  struct ModelFacing {
    std::string symptom;
    std::string expected;
    std::string reproduce_scenario;
  };
  struct GroundTruth {
    BugPatternTag mechanism = BugPatternTag::MissingInit;
    std::string target_id;
    std::vector<std::string> block_ids;
    std::string trigger_token;
    Feature outcome;
    std::string inverse_patch_digest;
  };
  ModelFacing model_facing;
  GroundTruth ground_truth;
  std::string config_digest;

  std::string to_json() const;
  static BugSpec from_json(std::string_view text);
};

struct BugInstance {
  ProjectIR gold;
  ProjectIR buggy;
  Patch forward;
  Patch inverse;
  BugSpec spec;
  TestSuite suite;
  ReferenceSemantics refsem;
};

/// Fraction of the R reruns in which every assertion of every scenario
/// holds, as an exact rational holds/R.
Rational pass_rate(const ProjectIR& p, const TestSuite& suite, int reruns);

struct ForgeResult {
  std::optional<BugInstance> instance;  // nullopt == fail
  int trials_used = 0;
};

/// The inject-and-validate loop. Patterns are visited in coverage order
/// (or only `pattern_override`), sites in rank order; each applied
/// operator counts one trial against cfg.max_trials.
ForgeResult forge(const ProjectIR& gold, const PipelineConfig& cfg,
                  const std::map<BugPatternTag, int>& coverage,
                  std::optional<BugPatternTag> pattern_override = std::nullopt);

/// Reference semantics derived from the gold project and its synthesized
/// suite. Contains no block ids at all, hence none from any patch.
ReferenceSemantics emit_reference_semantics(const ProjectIR& gold, const TestSuite& suite);

}  // namespace sbforge
