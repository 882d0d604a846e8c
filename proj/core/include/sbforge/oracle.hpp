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

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbforge/project_ir.hpp"
#include "sbforge/rational.hpp"
#include "sbforge/scenario.hpp"
#include "sbforge/trace.hpp"

namespace sbforge {

/// A candidate oracle predicate extracted from gold traces. Values always
/// describe gold behavior; the buggy side only gates which candidates
/// survive the differential pre-filter.
struct Feature {
  enum class Kind {
    FinalEquals,
    CheckpointEquals,
    BroadcastOccurred,
    BroadcastAbsent,
    ReachesThreshold,
    FinalCloneCount,
    FinalVisibility,
    FinalCostume,
    FinalBackdrop,
  };
  enum class Cmp { Le, Ge };

  Kind kind = Kind::FinalEquals;
  SignalRef signal;     // all kinds except the broadcast pair
  std::string message;  // BroadcastOccurred / BroadcastAbsent
  int tick = 0;         // CheckpointEquals
  int by_tick = 0;      // ReachesThreshold
  Cmp cmp = Cmp::Ge;    // ReachesThreshold
  Scalar value;

  // Where the value was read from (gold rerun index, checkpoint tick).
  int provenance_rerun = 0;
  int provenance_tick = 0;

  /// Identity ignores provenance.
  std::string sort_key() const;
  bool same_predicate(const Feature& o) const { return sort_key() == o.sort_key(); }

  std::string to_json() const;
  static Feature from_json(std::string_view text);
};

struct Assertion {
  Feature feature;
  std::string scenario_id;
};

/// Pure trace predicate. Crashed traces fail every assertion. Throws
/// Error(UnknownSignal) when the trace does not log the referenced signal.
bool evaluate_assertion(const Assertion& a, const Trace& t);

/// Fraction of traces on which the feature holds.
double hold_prob(const Feature& f, const std::vector<Trace>& traces);
int hold_count(const Feature& f, const std::vector<Trace>& traces);

/// Candidates from R aligned gold/buggy rerun pairs of one scenario,
/// restricted to signals that differ in at least one pair. Deterministic
/// order (feature sort key).
std::vector<Feature> extract_features(const std::vector<Trace>& gold_traces,
                                      const std::vector<Trace>& buggy_traces);

struct SynthesisConfig {
  int reruns = 5;
  Rational theta_pass{9, 10};
  Rational theta_fail{1, 10};
  int tick_budget = 2000;
  int checkpoint_interval = 10;
  int max_assertions_per_scenario = 5;

  std::string to_json() const;
  static SynthesisConfig from_json(std::string_view text);
  std::string digest() const;
};

struct TestSuite {
  std::vector<Scenario> scenarios;  // only scenarios carrying assertions
  std::vector<Assertion> assertions;
  SynthesisConfig config;
  std::string config_digest;

  std::string to_json() const;  // .testsuite.json, self-contained
  static TestSuite from_json(std::string_view text);
};

/// Verifies every assertion signal resolves against the project's
/// declarations (a suite made for a different project fails here).
/// Throws Error(UnknownSignal).
void check_suite_signals(const TestSuite& suite, const ProjectIR& p);

/// Algorithm: per scenario, R aligned reruns of gold and buggy under the
/// same seeds; candidates filtered by hold probabilities
/// (p_gold >= theta_pass, p_buggy <= theta_fail, exact rational compare),
/// ranked by margin and capped per scenario. Returns nullopt when no
/// assertion discriminates (a rejected forge trial).
std::optional<TestSuite> synthesize(const ProjectIR& gold, const ProjectIR& buggy,
                                    const std::vector<Scenario>& scenarios,
                                    const SynthesisConfig& cfg);

}  // namespace sbforge
