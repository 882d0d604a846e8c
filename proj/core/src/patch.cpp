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

#include "sbforge/patch.hpp"

#include <algorithm>

#include "ir_json.hpp"
#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/util.hpp"

namespace sbforge {

using jio::json;

BlockContent BlockContent::of(const Block& b) {
  BlockContent c;
  c.opcode = b.opcode;
  c.inputs = b.inputs;
  c.fields = b.fields;
  c.mutation = b.mutation;
  return c;
}

Block BlockContent::materialize(const std::string& id) const {
  Block b;
  b.id = id;
  b.opcode = opcode;
  b.inputs = inputs;
  b.fields = fields;
  b.mutation = mutation;
  return b;
}

bool BlockContent::matches(const Block& b) const {
  return opcode == b.opcode && inputs == b.inputs && fields == b.fields && mutation == b.mutation;
}

namespace {

const char* slot_name(AtomicEdit::Slot s) {
  switch (s) {
    case AtomicEdit::Slot::Next: return "next";
    case AtomicEdit::Slot::Input: return "input";
    case AtomicEdit::Slot::Top: return "top";
    case AtomicEdit::Slot::Detached: return "detached";
  }
  return "?";
}

AtomicEdit::Slot slot_from(const std::string& s) {
  if (s == "next") return AtomicEdit::Slot::Next;
  if (s == "input") return AtomicEdit::Slot::Input;
  if (s == "top") return AtomicEdit::Slot::Top;
  if (s == "detached") return AtomicEdit::Slot::Detached;
  throw Error(ErrorKind::SchemaInvalid, "unknown slot: " + s);
}

json content_to_json(const BlockContent& c) {
  json j;
  j["opcode"] = opcode_name(c.opcode);
  json inputs = json::object();
  for (const auto& [name, iv] : c.inputs) inputs[name] = irj::input_to_json(iv);
  j["inputs"] = std::move(inputs);
  json fields = json::object();
  for (const auto& [name, fv] : c.fields) fields[name] = irj::field_to_json(fv);
  j["fields"] = std::move(fields);
  if (c.mutation) j["mutation"] = irj::mutation_to_json(*c.mutation);
  return j;
}

BlockContent content_from_json(const json& j, const std::string& ctx) {
  if (!j.is_object()) throw Error(ErrorKind::SchemaInvalid, ctx + ": block must be an object");
  BlockContent c;
  std::string op = jio::member(j, "opcode", ctx.c_str()).get<std::string>();
  auto oc = opcode_from_name(op);
  if (!oc) throw Error(ErrorKind::SchemaInvalid, ctx + ": unknown opcode " + op);
  c.opcode = *oc;
  if (auto it = j.find("inputs"); it != j.end()) {
    for (auto& [name, val] : it->items()) {
      if (auto iv = irj::input_from_json(val, ctx + " input " + name)) {
        c.inputs.emplace(name, std::move(*iv));
      }
    }
  }
  if (auto it = j.find("fields"); it != j.end()) {
    for (auto& [name, val] : it->items()) {
      c.fields.emplace(name, irj::field_from_json(val, ctx));
    }
  }
  if (auto it = j.find("mutation"); it != j.end() && it->is_object()) {
    c.mutation = irj::mutation_from_json(*it);
  }
  return c;
}

enum class PathKind { Opcode, Field, Input };

PathKind path_kind(const std::string& path, std::string* name) {
  if (path == "opcode") return PathKind::Opcode;
  if (path.rfind("field:", 0) == 0) {
    *name = path.substr(6);
    return PathKind::Field;
  }
  if (path.rfind("input:", 0) == 0) {
    *name = path.substr(6);
    return PathKind::Input;
  }
  throw Error(ErrorKind::SchemaInvalid, "bad modify path: " + path);
}

json edit_value_to_json(const std::string& path, const EditValue& v) {
  std::string name;
  switch (path_kind(path, &name)) {
    case PathKind::Opcode:
      return v.opcode_name;
    case PathKind::Field:
      return irj::field_to_json(v.field);
    case PathKind::Input:
      return v.input ? irj::input_to_json(*v.input) : json(nullptr);
  }
  return nullptr;
}

EditValue edit_value_from_json(const std::string& path, const json& j, const std::string& ctx) {
  EditValue v;
  std::string name;
  switch (path_kind(path, &name)) {
    case PathKind::Opcode: {
      if (!j.is_string()) throw Error(ErrorKind::SchemaInvalid, ctx + ": opcode value");
      std::string op = j.get<std::string>();
      if (!opcode_from_name(op)) {
        throw Error(ErrorKind::SchemaInvalid, ctx + ": unknown opcode " + op);
      }
      v.opcode_name = op;
      return v;
    }
    case PathKind::Field:
      v.field = irj::field_from_json(j, ctx);
      return v;
    case PathKind::Input:
      v.input = irj::input_from_json(j, ctx);
      return v;
  }
  return v;
}

const char* source_name(Patch::Source s) {
  switch (s) {
    case Patch::Source::Gold: return "gold";
    case Patch::Source::Model: return "model";
    case Patch::Source::Forge: return "forge";
  }
  return "?";
}

}  // namespace

std::string patch_to_json(const Patch& p) {
  json j;
  j["source"] = source_name(p.source);
  json edits = json::array();
  for (const auto& e : p.edits) {
    json ej;
    ej["sprite_id"] = e.sprite_id;
    ej["block_id"] = e.block_id;
    switch (e.kind) {
      case AtomicEdit::Kind::Modify:
        ej["op"] = "modify";
        ej["path"] = e.path;
        if (e.old_value) ej["old"] = edit_value_to_json(e.path, *e.old_value);
        ej["new"] = edit_value_to_json(e.path, e.new_value);
        break;
      case AtomicEdit::Kind::Remove:
      case AtomicEdit::Kind::Add:
        ej["op"] = e.kind == AtomicEdit::Kind::Remove ? "remove" : "add";
        ej["block"] = content_to_json(e.content);
        ej["slot"] = slot_name(e.slot);
        if (e.slot == AtomicEdit::Slot::Input) ej["input_name"] = e.input_name;
        ej["parent"] = e.parent ? json(*e.parent) : json(nullptr);
        ej["next"] = e.next ? json(*e.next) : json(nullptr);
        break;
    }
    edits.push_back(std::move(ej));
  }
  j["edits"] = std::move(edits);
  return jio::canon(j);
}

Patch validate_patch(std::string_view bytes) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorKind::SchemaInvalid, "patch is not a JSON object");
  }
  Patch p;
  std::string source = j.value("source", "model");
  if (source == "gold") p.source = Patch::Source::Gold;
  else if (source == "forge") p.source = Patch::Source::Forge;
  else if (source == "model") p.source = Patch::Source::Model;
  else throw Error(ErrorKind::SchemaInvalid, "unknown source: " + source);

  auto edits_it = j.find("edits");
  if (edits_it == j.end() || !edits_it->is_array()) {
    throw Error(ErrorKind::SchemaInvalid, "patch needs an edits array");
  }
  std::set<std::pair<std::string, std::string>> touched;  // (block_id, path)
  int index = 0;
  for (const auto& ej : *edits_it) {
    const std::string ctx = "edit " + std::to_string(index++);
    if (!ej.is_object()) throw Error(ErrorKind::SchemaInvalid, ctx + ": not an object");
    AtomicEdit e;
    std::string op = jio::member(ej, "op", ctx.c_str()).get<std::string>();
    auto sid = ej.find("sprite_id");
    if (sid == ej.end() || !sid->is_string()) {
      throw Error(ErrorKind::SchemaInvalid, ctx + ": missing sprite_id");
    }
    e.sprite_id = sid->get<std::string>();
    auto bid = ej.find("block_id");
    if (bid == ej.end() || !bid->is_string()) {
      throw Error(ErrorKind::SchemaInvalid, ctx + ": missing block_id");
    }
    e.block_id = bid->get<std::string>();

    if (op == "modify") {
      e.kind = AtomicEdit::Kind::Modify;
      e.path = jio::member(ej, "path", ctx.c_str()).get<std::string>();
      auto old_it = ej.find("old");
      if (old_it == ej.end()) {
        // old is mandatory: it is what makes every modify checkable and
        // invertible.
        throw Error(ErrorKind::SchemaInvalid, ctx + ": modify requires old");
      }
      e.old_value = edit_value_from_json(e.path, *old_it, ctx);
      e.new_value = edit_value_from_json(e.path, jio::member(ej, "new", ctx.c_str()), ctx);
      if (*e.old_value == e.new_value) {
        throw Error(ErrorKind::SchemaInvalid, ctx + ": modify with old == new");
      }
    } else if (op == "remove" || op == "add") {
      e.kind = op == "remove" ? AtomicEdit::Kind::Remove : AtomicEdit::Kind::Add;
      e.content = content_from_json(jio::member(ej, "block", ctx.c_str()), ctx);
      e.slot = slot_from(ej.value("slot", "next"));
      if (e.slot == AtomicEdit::Slot::Input) {
        e.input_name = jio::member(ej, "input_name", ctx.c_str()).get<std::string>();
      }
      if (auto it = ej.find("parent"); it != ej.end() && !it->is_null()) {
        e.parent = it->get<std::string>();
      }
      if (auto it = ej.find("next"); it != ej.end() && !it->is_null()) {
        e.next = it->get<std::string>();
      }
      e.path.clear();
    } else {
      throw Error(ErrorKind::SchemaInvalid, ctx + ": unknown op " + op);
    }

    auto key = std::make_pair(e.block_id, e.path);
    if (!touched.insert(key).second) {
      throw Error(ErrorKind::DuplicateTarget, e.block_id + " " + (e.path.empty() ? "<block>" : e.path));
    }
    p.edits.push_back(std::move(e));
  }
  return p;
}

namespace {

Target* find_target_mut(ProjectIR& p, const std::string& id) {
  for (auto& t : p.targets) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

[[noreturn]] void not_applicable(int index, const std::string& reason) {
  throw Error(ErrorKind::NotApplicable, "edit " + std::to_string(index) + ": " + reason);
}

/// Derives how `b` is currently attached inside `t`.
struct Attachment {
  AtomicEdit::Slot slot = AtomicEdit::Slot::Top;
  std::string input_name;
  std::optional<std::string> parent;
};

Attachment current_attachment(const Target& t, const Block& b) {
  Attachment a;
  if (!b.parent) {
    a.slot = AtomicEdit::Slot::Top;
    return a;
  }
  const Block& p = t.blocks.at(*b.parent);
  a.parent = *b.parent;
  if (p.next && *p.next == b.id) {
    a.slot = AtomicEdit::Slot::Next;
    return a;
  }
  for (const auto& [name, iv] : p.inputs) {
    if (iv.kind == InputValue::Kind::BlockRef && iv.id == b.id) {
      a.slot = AtomicEdit::Slot::Input;
      a.input_name = name;
      return a;
    }
  }
  a.slot = AtomicEdit::Slot::Detached;
  return a;
}

void apply_remove(ProjectIR&, Target& t, const AtomicEdit& e, int index) {
  auto it = t.blocks.find(e.block_id);
  if (it == t.blocks.end()) not_applicable(index, "unknown block " + e.block_id);
  Block& b = it->second;
  if (!e.content.matches(b)) not_applicable(index, "recorded payload does not match " + e.block_id);

  Attachment at = current_attachment(t, b);
  // Top and Detached both mean parentless; they compare equal here.
  auto norm = [](AtomicEdit::Slot s) {
    return s == AtomicEdit::Slot::Detached ? AtomicEdit::Slot::Top : s;
  };
  if (norm(at.slot) != norm(e.slot) || at.parent != e.parent ||
      (e.slot == AtomicEdit::Slot::Input && at.input_name != e.input_name) ||
      b.next != e.next) {
    not_applicable(index, "recorded linkage does not match " + e.block_id);
  }

  switch (e.slot) {
    case AtomicEdit::Slot::Next: {
      Block& parent = t.blocks.at(*e.parent);
      parent.next = b.next;  // reconnect the chain around the removed block
      break;
    }
    case AtomicEdit::Slot::Input: {
      Block& parent = t.blocks.at(*e.parent);
      if (b.next) {
        parent.inputs[e.input_name] = InputValue::block(*b.next);
      } else {
        parent.inputs.erase(e.input_name);
      }
      break;
    }
    case AtomicEdit::Slot::Top:
    case AtomicEdit::Slot::Detached:
      break;  // the chain below (if any) becomes a detached root
  }
  t.blocks.erase(it);
}

void apply_add(ProjectIR& p, Target& t, const AtomicEdit& e, int index) {
  if (p.owner_of_block(e.block_id) != nullptr) {
    not_applicable(index, "block id already exists: " + e.block_id);
  }
  switch (e.slot) {
    case AtomicEdit::Slot::Next: {
      if (!e.parent) not_applicable(index, "add with slot next requires a parent");
      auto pit = t.blocks.find(*e.parent);
      if (pit == t.blocks.end()) not_applicable(index, "unknown parent " + *e.parent);
      if (pit->second.next != e.next) {
        not_applicable(index, "linkage conflict at " + *e.parent);
      }
      pit->second.next = e.block_id;
      break;
    }
    case AtomicEdit::Slot::Input: {
      if (!e.parent) not_applicable(index, "add with slot input requires a parent");
      auto pit = t.blocks.find(*e.parent);
      if (pit == t.blocks.end()) not_applicable(index, "unknown parent " + *e.parent);
      auto slot = pit->second.inputs.find(e.input_name);
      std::optional<std::string> occupant;
      if (slot != pit->second.inputs.end()) {
        if (slot->second.kind != InputValue::Kind::BlockRef) {
          not_applicable(index, "slot " + e.input_name + " holds a non-block value");
        }
        occupant = slot->second.id;
      }
      if (occupant != e.next) not_applicable(index, "linkage conflict at " + e.input_name);
      pit->second.inputs[e.input_name] = InputValue::block(e.block_id);
      break;
    }
    case AtomicEdit::Slot::Top:
    case AtomicEdit::Slot::Detached:
      if (e.parent) not_applicable(index, "top-level add cannot declare a parent");
      break;
  }
  Block b = e.content.materialize(e.block_id);
  b.next = e.next;
  t.blocks.emplace(e.block_id, std::move(b));
}

void apply_modify(Target& t, const AtomicEdit& e, int index) {
  auto it = t.blocks.find(e.block_id);
  if (it == t.blocks.end()) not_applicable(index, "unknown block " + e.block_id);
  Block& b = it->second;
  std::string name;
  switch (path_kind(e.path, &name)) {
    case PathKind::Opcode: {
      if (e.old_value && e.old_value->opcode_name != opcode_name(b.opcode)) {
        not_applicable(index, "old opcode does not match " + e.block_id);
      }
      b.opcode = *opcode_from_name(e.new_value.opcode_name);
      return;
    }
    case PathKind::Field: {
      auto fit = b.fields.find(name);
      if (fit == b.fields.end()) not_applicable(index, "no field " + name + " on " + e.block_id);
      if (e.old_value && !(e.old_value->field == fit->second)) {
        not_applicable(index, "old field value does not match " + e.block_id);
      }
      fit->second = e.new_value.field;
      return;
    }
    case PathKind::Input: {
      auto iit = b.inputs.find(name);
      std::optional<InputValue> current;
      if (iit != b.inputs.end()) current = iit->second;
      if (e.old_value && e.old_value->input != current) {
        not_applicable(index, "old input value does not match " + e.block_id);
      }
      if (e.new_value.input) {
        b.inputs[name] = *e.new_value.input;
      } else {
        b.inputs.erase(name);
      }
      return;
    }
  }
}

}  // namespace

ProjectIR apply_patch(const ProjectIR& p, const Patch& patch) {
  ProjectIR work = p;
  int index = 0;
  for (const auto& e : patch.edits) {
    Target* t = find_target_mut(work, e.sprite_id);
    if (t == nullptr) not_applicable(index, "unknown target " + e.sprite_id);
    switch (e.kind) {
      case AtomicEdit::Kind::Remove:
        apply_remove(work, *t, e, index);
        break;
      case AtomicEdit::Kind::Add:
        apply_add(work, *t, e, index);
        break;
      case AtomicEdit::Kind::Modify:
        apply_modify(*t, e, index);
        break;
    }
    // Keep parent pointers truthful between edits: later edits inspect
    // attachments (remove linkage checks) on the intermediate state.
    rederive_links(work);
    ++index;
  }
  try {
    validate_project(work);
  } catch (const Error& err) {
    throw Error(ErrorKind::ResultInvalid, err.what());
  }
  return work;
}

Patch inverse_patch(const Patch& forward) {
  Patch inv;
  // The inverse of a bug-injecting patch is the gold fix and vice versa;
  // model patches invert to model patches. Keeps inversion an involution.
  switch (forward.source) {
    case Patch::Source::Forge:
      inv.source = Patch::Source::Gold;
      break;
    case Patch::Source::Gold:
      inv.source = Patch::Source::Forge;
      break;
    case Patch::Source::Model:
      inv.source = Patch::Source::Model;
      break;
  }
  for (auto it = forward.edits.rbegin(); it != forward.edits.rend(); ++it) {
    AtomicEdit e = *it;
    switch (it->kind) {
      case AtomicEdit::Kind::Modify:
        if (!it->old_value) {
          throw Error(ErrorKind::NonInvertibleEdit,
                      "modify of " + it->block_id + " lacks its old value");
        }
        e.new_value = *it->old_value;
        e.old_value = it->new_value;
        break;
      case AtomicEdit::Kind::Remove:
        e.kind = AtomicEdit::Kind::Add;
        break;
      case AtomicEdit::Kind::Add:
        e.kind = AtomicEdit::Kind::Remove;
        break;
    }
    inv.edits.push_back(std::move(e));
  }
  return inv;
}

namespace {

/// Structural hash of added content, fresh-id independent: references to
/// blocks added by the same patch recurse into their content.
std::string structural_hash(const BlockContent& c,
                            const std::map<std::string, const BlockContent*>& added, int depth);

json hashable_input(const InputValue& iv, const std::map<std::string, const BlockContent*>& added,
                    int depth) {
  switch (iv.kind) {
    case InputValue::Kind::Literal:
      return json::array({"lit", jio::scalar_to_json(iv.literal)});
    case InputValue::Kind::BlockRef: {
      auto it = added.find(iv.id);
      if (it != added.end() && depth < 64) {
        return json::array({"sub", structural_hash(*it->second, added, depth + 1)});
      }
      return json::array({"blk", iv.id});  // pre-existing stable id
    }
    case InputValue::Kind::VarRef:
      return json::array({"var", iv.id});
    case InputValue::Kind::ListRef:
      return json::array({"list", iv.id});
    case InputValue::Kind::BroadcastRef:
      return json::array({"bcast", iv.id});
  }
  return nullptr;
}

std::string structural_hash(const BlockContent& c,
                            const std::map<std::string, const BlockContent*>& added, int depth) {
  json j;
  j["op"] = opcode_name(c.opcode);
  json inputs = json::object();
  for (const auto& [name, iv] : c.inputs) inputs[name] = hashable_input(iv, added, depth);
  j["in"] = std::move(inputs);
  json fields = json::object();
  for (const auto& [name, fv] : c.fields) fields[name] = irj::field_to_json(fv);
  j["f"] = std::move(fields);
  if (c.mutation) j["m"] = irj::mutation_to_json(*c.mutation);
  return digest_hex(jio::canon(j));
}

json hashable_edit_value(const std::string& path, const EditValue& v,
                         const std::map<std::string, const BlockContent*>& added) {
  std::string name;
  if (path_kind(path, &name) == PathKind::Input && v.input &&
      v.input->kind == InputValue::Kind::BlockRef) {
    auto it = added.find(v.input->id);
    if (it != added.end()) {
      return json::array({"sub", structural_hash(*it->second, added, 0)});
    }
  }
  return edit_value_to_json(path, v);
}

}  // namespace

NormalizedEditSet normalize(const Patch& p) {
  std::map<std::string, const BlockContent*> added;
  for (const auto& e : p.edits) {
    if (e.kind == AtomicEdit::Kind::Add) added.emplace(e.block_id, &e.content);
  }
  NormalizedEditSet out;
  for (const auto& e : p.edits) {
    switch (e.kind) {
      case AtomicEdit::Kind::Remove:
        out.insert("remove|" + e.sprite_id + "|" + e.block_id);
        break;
      case AtomicEdit::Kind::Modify:
        out.insert("modify|" + e.sprite_id + "|" + e.block_id + "|" + e.path + "|" +
                   jio::canon(hashable_edit_value(e.path, e.new_value, added)));
        break;
      case AtomicEdit::Kind::Add: {
        std::string anchor = slot_name(e.slot);
        if (e.slot == AtomicEdit::Slot::Input) anchor += ":" + e.input_name;
        if (e.parent) {
          auto it = added.find(*e.parent);
          anchor += "@" + (it != added.end() ? "#" + structural_hash(*it->second, added, 0)
                                             : *e.parent);
        }
        out.insert("add|" + e.sprite_id + "|" + anchor + "|" +
                   structural_hash(e.content, added, 0));
        break;
      }
    }
  }
  return out;
}

int edit_distance(const NormalizedEditSet& gold, const NormalizedEditSet& model) {
  int d = 0;
  for (const auto& k : gold) {
    if (!model.count(k)) ++d;
  }
  for (const auto& k : model) {
    if (!gold.count(k)) ++d;
  }
  return d;
}

}  // namespace sbforge
