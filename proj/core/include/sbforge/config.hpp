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

#include <cstdint>
#include <string>

#include "sbforge/oracle.hpp"
#include "sbforge/rational.hpp"

namespace sbforge {

/// Whole-pipeline knobs. Defaults: R=5, theta_pass=0.9, theta_fail=0.1,
/// K=20 trials, H=2000 ticks, checkpoints every 10 ticks.
struct PipelineConfig {
  int reruns = 5;
  Rational theta_pass{9, 10};
  Rational theta_fail{1, 10};
  int max_trials = 20;
  int tick_budget = 2000;
  int checkpoint_interval = 10;
  uint64_t seed = 0;

  /// Throws Error(MalformedJson) on out-of-range values
  /// (0 <= theta_fail < theta_pass <= 1, positive counts).
  void check() const;

  SynthesisConfig synthesis() const;

  std::string to_json() const;
  static PipelineConfig from_json(std::string_view text);
  /// Digest of the effective configuration, embedded in artifacts.
  std::string digest() const;
};

}  // namespace sbforge
