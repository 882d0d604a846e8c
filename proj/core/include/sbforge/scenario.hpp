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
#include <vector>

namespace sbforge {

/// One interaction injected into the VM at a fixed tick.
struct InputEvent {
  enum class Kind { GreenFlag, KeyDown, KeyUp, SpriteClick, InjectBroadcast };
  Kind kind = Kind::GreenFlag;
  std::string arg;  // key name / target id / message name

  bool operator==(const InputEvent&) const = default;
};

struct SeedPolicy {
  enum class Kind { PerRerun, Fixed };
  Kind kind = Kind::PerRerun;
  uint64_t fixed_seed = 0;

  bool operator==(const SeedPolicy&) const = default;
};

/// Deterministic, tick-stamped interaction script. Everything the VM
/// needs besides the project and the seed.
struct Scenario {
  std::string id;
  std::vector<std::pair<int, InputEvent>> events;  // sorted by tick, ticks in [0, H]
  SeedPolicy seed_policy;
  int tick_budget = 2000;        // H
  int checkpoint_interval = 10;  // ticks

  uint64_t seed_for_rerun(int r) const {
    return seed_policy.kind == SeedPolicy::Kind::Fixed ? seed_policy.fixed_seed
                                                       : static_cast<uint64_t>(r);
  }

  bool operator==(const Scenario&) const = default;

  /// Throws Error(MalformedJson) when invariants are violated
  /// (unsorted events, ticks outside [0, H], non-positive budget/interval).
  void check() const;

  std::string to_json() const;
  static Scenario from_json(std::string_view text);
};

}  // namespace sbforge
