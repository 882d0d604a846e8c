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
#include <string_view>
#include <vector>

#include "sbforge/opcodes.hpp"
#include "sbforge/scalar.hpp"

namespace sbforge {

// Block-graph IR for a documented subset of the sb3 project.json schema.
// The format is specified in docs/FORMATS.md and docs/schemas/. Identifiers
// (blocks, variables, lists, broadcasts, targets) are stable strings and
// globally unique; everything downstream addresses state through them.

/// One slot of a block's `inputs` map.
struct InputValue {
  enum class Kind { Literal, BlockRef, VarRef, ListRef, BroadcastRef };
  Kind kind = Kind::Literal;
  Scalar literal;    // Literal
  std::string id;    // BlockRef / VarRef / ListRef / BroadcastRef
  std::string name;  // VarRef / ListRef / BroadcastRef display name

  static InputValue lit(Scalar v);
  static InputValue block(std::string block_id);
  static InputValue variable(std::string name, std::string id);
  static InputValue list(std::string name, std::string id);
  static InputValue broadcast(std::string name, std::string id);

  bool operator==(const InputValue&) const = default;
};

/// One entry of a block's `fields` map: a value plus an optional
/// referenced declaration id (variable/list/broadcast).
struct FieldValue {
  Scalar value;
  std::string ref_id;  // empty when the field references nothing

  bool operator==(const FieldValue&) const = default;
};

/// Custom-block metadata carried by procedures_definition (signature) and
/// procedures_call (callee). The subset hoists this onto the block itself
/// instead of sb3's separate prototype block.
struct Mutation {
  std::string proccode;
  std::vector<std::string> argument_names;  // definition only
  bool warp = false;                        // "run without screen refresh"

  bool operator==(const Mutation&) const = default;
};

struct Block {
  std::string id;
  Opcode opcode = Opcode::event_whenflagclicked;
  std::optional<std::string> parent;
  std::optional<std::string> next;
  std::map<std::string, InputValue> inputs;
  std::map<std::string, FieldValue> fields;
  bool top_level = false;
  std::optional<Mutation> mutation;

  bool operator==(const Block&) const = default;
};

struct VariableDecl {
  std::string name;
  Scalar init;
  bool operator==(const VariableDecl&) const = default;
};

struct ListDecl {
  std::string name;
  std::vector<Scalar> init;
  bool operator==(const ListDecl&) const = default;
};

struct AssetMeta {
  enum class Kind { Image, Sound };
  std::string asset_id;
  std::string name;
  Kind kind = Kind::Image;
  int width = 0;        // images, pixels, > 0
  int height = 0;       // images, pixels, > 0
  double duration = 0;  // sounds, seconds, >= 0
  std::string payload_digest;  // hex; bytes are never decoded

  bool operator==(const AssetMeta&) const = default;
};

struct Target {
  std::string id;
  std::string name;
  bool is_stage = false;
  std::map<std::string, VariableDecl> variables;
  std::map<std::string, ListDecl> lists;
  std::map<std::string, Block> blocks;
  std::vector<AssetMeta> costumes;
  std::vector<AssetMeta> sounds;
  // Motion state; ignored when is_stage.
  double x = 0;
  double y = 0;
  double direction = 90;
  double size = 100;
  bool visible = true;
  int current_costume = 0;
  int layer = 0;

  bool operator==(const Target&) const = default;
};

struct ProjectIR {
  std::vector<Target> targets;  // first is the stage
  std::map<std::string, std::string> broadcasts;  // id -> message name
  std::string monitors_json = "[]";  // preserved opaque
  std::string format_version = "3.0.0";

  bool operator==(const ProjectIR&) const = default;

  const Target& stage() const { return targets.front(); }
  const Target* find_target(std::string_view id) const;
  const Target* find_target_by_name(std::string_view name) const;
  /// Target owning a given block id, or nullptr.
  const Target* owner_of_block(std::string_view block_id) const;
  /// Variable declaration visible from `target`: local first, then stage.
  const VariableDecl* resolve_variable(const Target& target, std::string_view var_id) const;
  const ListDecl* resolve_list(const Target& target, std::string_view list_id) const;
  /// Broadcast id whose message name equals `name` (exact match).
  std::optional<std::string> broadcast_id_for_name(std::string_view name) const;
};

struct ComplexityReport {
  int sprites = 0;
  int scripts = 0;
  int broadcast_uses = 0;
  int custom_blocks = 0;
  bool passes = false;
};

/// Parses raw project.json bytes, or a zip container holding a
/// `project.json` entry. Validates every IR invariant; throws Error with
/// kind MalformedJson / UnknownOpcode / DanglingReference /
/// LinkInconsistency / DuplicateIdentifier.
ProjectIR parse_project(std::string_view bytes);

/// Canonical JSON: lexicographically sorted keys, integers without
/// exponent, shortest round-trip floats. parse(serialize(p)) == p, and
/// structurally equal projects serialize to identical bytes.
std::string serialize_project(const ProjectIR& p);

ComplexityReport complexity_metrics(const ProjectIR& p);

/// Re-checks all IR invariants on an in-memory project (used after patch
/// application). Throws like parse_project.
void validate_project(const ProjectIR& p);

/// Derives parent pointers and top_level flags from next-chains and input
/// references, the one source of truth for linkage. Used by the patch
/// engine after structural edits.
void rederive_links(ProjectIR& p);

bool is_zip_container(std::string_view bytes);

}  // namespace sbforge
