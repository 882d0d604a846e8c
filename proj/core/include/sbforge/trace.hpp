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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sbforge/scalar.hpp"

namespace sbforge {

/// VM-observable state of one target at a checkpoint. Stage entries carry
/// variables and lists only; pose fields are sprite-only.
struct TargetSnapshot {
  std::map<std::string, Scalar> variables;
  // list id -> (length, content digest)
  std::map<std::string, std::pair<int64_t, std::string>> lists;
  double x = 0, y = 0, direction = 90, size = 100;
  int costume = 0;
  bool visible = true;
  int clone_count = 0;

  bool operator==(const TargetSnapshot&) const = default;
};

struct SignalSnapshot {
  std::vector<std::pair<std::string, TargetSnapshot>> targets;  // project order
  int backdrop = 0;
  std::vector<std::string> broadcasts;  // fired since previous checkpoint, sorted unique

  bool operator==(const SignalSnapshot&) const = default;
};

struct Checkpoint {
  int tick = 0;
  SignalSnapshot state;

  bool operator==(const Checkpoint&) const = default;
};

struct Trace {
  std::string scenario_id;
  uint64_t seed = 0;
  std::string config_digest;
  std::vector<Checkpoint> checkpoints;
  std::optional<std::string> crash_reason;  // empty optional == completed
  std::vector<std::pair<int, std::string>> events_log;  // broadcasts fired, by tick

  bool completed() const { return !crash_reason.has_value(); }

  bool operator==(const Trace&) const = default;

  /// JSON Lines: header, one checkpoint per line, end record with terminal
  /// state and the cumulative broadcast log. Extension `.trace.jsonl`.
  std::string to_jsonl() const;
  static Trace from_jsonl(std::string_view text);
};

/// Stable address of one logged signal.
///   var:<target-id>:<var-id>    list:<target-id>:<list-id>
///   x:<target-id>  y:...  dir:...  size:...  costume:...  visible:...
///   clones:<target-id>          backdrop
struct SignalRef {
  enum class Kind { Var, List, X, Y, Direction, Size, Costume, Visible, CloneCount, Backdrop };
  Kind kind = Kind::Var;
  std::string target_id;
  std::string id;  // var/list id

  std::string to_string() const;
  static std::optional<SignalRef> parse(std::string_view text);

  bool operator==(const SignalRef&) const = default;
  bool operator<(const SignalRef& o) const;
};

/// Value of a signal in a snapshot, or nullopt when the snapshot has no
/// such signal. Lists surface as "<length>:<digest>" strings; visibility
/// as Bool; costume/backdrop/clone counts as Int.
std::optional<Scalar> signal_value(const SignalSnapshot& s, const SignalRef& ref);

/// Every signal present in a snapshot, in canonical order (target order,
/// then kind, then id; backdrop last).
std::vector<SignalRef> enumerate_signals(const SignalSnapshot& s);

/// True for signals whose drift discrepancy is numeric (|a-b|/scale);
/// the rest are categorical.
bool signal_is_numeric(const SignalRef& ref);

}  // namespace sbforge
