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
#include <vector>

#include "sbforge/project_ir.hpp"
#include "sbforge/scenario.hpp"
#include "sbforge/trace.hpp"

namespace sbforge {

// Deterministic tick-based interpreter. One scheduler frame per tick at a
// nominal 30 ticks/second; threads step in a fixed order (target order,
// clones after originals in creation order, then script id); a thread
// yields at loop-iteration boundaries, waits, and thread end. Traces are a
// pure function of (project, scenario, seed), byte-identical across runs
// and platforms.

inline constexpr int kTicksPerSecond = 30;
inline constexpr int kStepQuotaPerTick = 10000;  // per thread; exceeding => crashed("runaway")
inline constexpr int kCloneCap = 300;
inline constexpr int kMaxCallDepth = 64;  // exceeding => crashed("recursion")

/// Executes the scenario. Crashes are reported in Trace::crash_reason,
/// never thrown; Error(TargetNotFound) is thrown when the scenario
/// references a missing sprite or undeclared broadcast message.
Trace run(const ProjectIR& project, const Scenario& scenario, uint64_t seed);

/// R reruns; rerun r (1-based) is seeded by the scenario's seed policy.
std::vector<Trace> run_reruns(const ProjectIR& project, const Scenario& scenario, int reruns);

}  // namespace sbforge
