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

// Machine-applicable patches: ordered lists of atomic block edits
// (remove / add / modify) over the project IR. This is the model-facing
// repair contract; the JSON format is documented in docs/FORMATS.md and
// docs/schemas/patch.schema.json.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sbforge/project_ir.hpp"

namespace sbforge {

/// Block payload carried by add/remove edits: everything except identity
/// and linkage.
struct BlockContent {
  Opcode opcode = Opcode::event_whenflagclicked;
  std::map<std::string, InputValue> inputs;
  std::map<std::string, FieldValue> fields;
  std::optional<Mutation> mutation;

  static BlockContent of(const Block& b);
  Block materialize(const std::string& id) const;
  bool matches(const Block& b) const;

  bool operator==(const BlockContent&) const = default;
};

/// What a modify edit's old/new holds, depending on the path:
///   "opcode"      -> opcode_name
///   "field:NAME"  -> field
///   "input:NAME"  -> input (nullopt == empty slot)
struct EditValue {
  std::string opcode_name;
  FieldValue field;
  std::optional<InputValue> input;

  bool operator==(const EditValue&) const = default;
};

struct AtomicEdit {
  enum class Kind { Remove, Add, Modify };
  /// How an added/removed block attaches to its parent.
  enum class Slot { Next, Input, Top, Detached };

  Kind kind = Kind::Modify;
  std::string sprite_id;
  std::string block_id;

  // Remove / Add payload and linkage (recorded for invertibility).
  BlockContent content;
  Slot slot = Slot::Next;
  std::string input_name;  // when slot == Input
  std::optional<std::string> parent;
  std::optional<std::string> next;

  // Modify.
  std::string path;  // "opcode" | "field:NAME" | "input:NAME"
  std::optional<EditValue> old_value;  // required by the schema
  EditValue new_value;
};

struct Patch {
  enum class Source { Gold, Model, Forge };
  std::vector<AtomicEdit> edits;
  Source source = Source::Model;
};

/// Canonical normalized-edit keys; symmetric difference of two of these
/// is the paper-facing edit distance. Added blocks are keyed by a
/// structural hash that ignores fresh block-id choices.
using NormalizedEditSet = std::set<std::string>;

/// Schema validation. Throws Error(SchemaInvalid) / Error(DuplicateTarget).
Patch validate_patch(std::string_view bytes);
std::string patch_to_json(const Patch& p);

/// Applies edits strictly in order; any failure aborts the whole patch
/// (no partial application). Throws Error(NotApplicable) when an edit
/// cannot be applied, Error(ResultInvalid) when the patched project
/// violates IR invariants.
ProjectIR apply_patch(const ProjectIR& p, const Patch& patch);

/// Exact inverse: apply(apply(p, f), inverse(f)) == p structurally.
/// Throws Error(NonInvertibleEdit) on a modify lacking its old value.
Patch inverse_patch(const Patch& forward);

NormalizedEditSet normalize(const Patch& p);

/// |gold symmetric-difference model|.
int edit_distance(const NormalizedEditSet& gold, const NormalizedEditSet& model);

}  // namespace sbforge
