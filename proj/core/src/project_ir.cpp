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

#include "sbforge/project_ir.hpp"

#include <algorithm>
#include <set>

#include "ir_json.hpp"
#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/util.hpp"
#include "zip_archive.hpp"

namespace sbforge {

using jio::json;

InputValue InputValue::lit(Scalar v) {
  InputValue iv;
  iv.kind = Kind::Literal;
  iv.literal = std::move(v);
  return iv;
}
InputValue InputValue::block(std::string block_id) {
  InputValue iv;
  iv.kind = Kind::BlockRef;
  iv.id = std::move(block_id);
  return iv;
}
InputValue InputValue::variable(std::string name, std::string id) {
  InputValue iv;
  iv.kind = Kind::VarRef;
  iv.name = std::move(name);
  iv.id = std::move(id);
  return iv;
}
InputValue InputValue::list(std::string name, std::string id) {
  InputValue iv;
  iv.kind = Kind::ListRef;
  iv.name = std::move(name);
  iv.id = std::move(id);
  return iv;
}
InputValue InputValue::broadcast(std::string name, std::string id) {
  InputValue iv;
  iv.kind = Kind::BroadcastRef;
  iv.name = std::move(name);
  iv.id = std::move(id);
  return iv;
}

const Target* ProjectIR::find_target(std::string_view id) const {
  for (const auto& t : targets) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const Target* ProjectIR::find_target_by_name(std::string_view name) const {
  for (const auto& t : targets) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Target* ProjectIR::owner_of_block(std::string_view block_id) const {
  for (const auto& t : targets) {
    if (t.blocks.count(std::string(block_id))) return &t;
  }
  return nullptr;
}

const VariableDecl* ProjectIR::resolve_variable(const Target& target,
                                                std::string_view var_id) const {
  auto it = target.variables.find(std::string(var_id));
  if (it != target.variables.end()) return &it->second;
  auto sit = stage().variables.find(std::string(var_id));
  if (sit != stage().variables.end()) return &sit->second;
  return nullptr;
}

const ListDecl* ProjectIR::resolve_list(const Target& target, std::string_view list_id) const {
  auto it = target.lists.find(std::string(list_id));
  if (it != target.lists.end()) return &it->second;
  auto sit = stage().lists.find(std::string(list_id));
  if (sit != stage().lists.end()) return &sit->second;
  return nullptr;
}

std::optional<std::string> ProjectIR::broadcast_id_for_name(std::string_view name) const {
  for (const auto& [id, msg] : broadcasts) {
    if (msg == name) return id;
  }
  return std::nullopt;
}

namespace irj {

// ---- shared fragment codecs ----

namespace {

InputValue parse_input_payload(const json& payload, const std::string& ctx) {
  if (payload.is_string()) return InputValue::block(payload.get<std::string>());
  if (!payload.is_array() || payload.empty() || !payload[0].is_number_integer()) {
    throw Error(ErrorKind::MalformedJson, ctx + ": bad input payload");
  }
  int t = payload[0].get<int>();
  if (t >= 4 && t <= 10) {
    if (payload.size() < 2) throw Error(ErrorKind::MalformedJson, ctx + ": bad literal input");
    Scalar v = jio::scalar_from_json(payload[1]);
    // Numeric slots (4..8) store numbers even when the file writes them as
    // strings; booleans become their display strings so round-trips are
    // stable.
    if (t <= 8 && v.kind() == Scalar::Kind::Str && v.is_numeric_like()) {
      double d = v.to_number();
      if (d == std::trunc(d) && std::abs(d) < 9.007199254740992e15 &&
          v.as_str_raw().find_first_of(".eE") == std::string::npos) {
        v = Scalar(static_cast<int64_t>(d));
      } else {
        v = Scalar(d);
      }
    }
    if (v.kind() == Scalar::Kind::Bool) v = Scalar(v.to_display_string());
    return InputValue::lit(std::move(v));
  }
  if ((t == 11 || t == 12 || t == 13) && payload.size() >= 3 && payload[1].is_string() &&
      payload[2].is_string()) {
    std::string name = payload[1].get<std::string>();
    std::string id = payload[2].get<std::string>();
    if (t == 11) return InputValue::broadcast(std::move(name), std::move(id));
    if (t == 12) return InputValue::variable(std::move(name), std::move(id));
    return InputValue::list(std::move(name), std::move(id));
  }
  throw Error(ErrorKind::MalformedJson, ctx + ": unsupported input payload");
}

}  // namespace

std::optional<InputValue> input_from_json(const json& j, const std::string& ctx) {
  // Inputs are sb3-shaped: [shadow, payload, (obscured shadow)]. A null
  // payload is an empty slot and is dropped.
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::MalformedJson, ctx + ": bad input");
  const json* payload = nullptr;
  if (j.size() >= 2) payload = &j[1];
  if (payload == nullptr || payload->is_null()) return std::nullopt;
  return parse_input_payload(*payload, ctx);
}

json input_to_json(const InputValue& iv) {
  switch (iv.kind) {
    case InputValue::Kind::Literal: {
      int t = iv.literal.kind() == Scalar::Kind::Str ? 10 : 4;
      return json::array({1, json::array({t, jio::scalar_to_json(iv.literal)})});
    }
    case InputValue::Kind::BlockRef:
      return json::array({2, iv.id});
    case InputValue::Kind::VarRef:
      return json::array({2, json::array({12, iv.name, iv.id})});
    case InputValue::Kind::ListRef:
      return json::array({2, json::array({13, iv.name, iv.id})});
    case InputValue::Kind::BroadcastRef:
      return json::array({1, json::array({11, iv.name, iv.id})});
  }
  return nullptr;
}

json field_to_json(const FieldValue& fv) {
  return json::array(
      {jio::scalar_to_json(fv.value), fv.ref_id.empty() ? json(nullptr) : json(fv.ref_id)});
}

FieldValue field_from_json(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw Error(ErrorKind::MalformedJson, ctx + ": bad field");
  FieldValue fv;
  fv.value = jio::scalar_from_json(j[0]);
  if (j.size() >= 2 && j[1].is_string()) fv.ref_id = j[1].get<std::string>();
  return fv;
}

json mutation_to_json(const Mutation& m) {
  json j;
  j["proccode"] = m.proccode;
  j["argumentnames"] = m.argument_names;
  j["warp"] = m.warp;
  return j;
}

Mutation mutation_from_json(const json& j) {
  Mutation m;
  if (auto p = j.find("proccode"); p != j.end() && p->is_string()) {
    m.proccode = p->get<std::string>();
  }
  if (auto a = j.find("argumentnames"); a != j.end() && a->is_array()) {
    for (const auto& n : *a) m.argument_names.push_back(n.get<std::string>());
  }
  if (auto w = j.find("warp"); w != j.end()) {
    m.warp = w->is_boolean() ? w->get<bool>() : (w->is_string() && w->get<std::string>() == "true");
  }
  return m;
}

}  // namespace irj

namespace {

// ---- parsing ----

Block parse_block(const std::string& id, const json& j) {
  const std::string ctx = "block " + id;
  Block b;
  b.id = id;
  const json& op = jio::member(j, "opcode", ctx.c_str());
  if (!op.is_string()) throw Error(ErrorKind::MalformedJson, ctx + ": opcode must be a string");
  auto oc = opcode_from_name(op.get<std::string>());
  if (!oc) throw Error(ErrorKind::UnknownOpcode, op.get<std::string>() + " at " + id);
  b.opcode = *oc;

  if (auto it = j.find("parent"); it != j.end() && !it->is_null()) {
    b.parent = it->get<std::string>();
  }
  if (auto it = j.find("next"); it != j.end() && !it->is_null()) {
    b.next = it->get<std::string>();
  }
  if (auto it = j.find("topLevel"); it != j.end()) b.top_level = it->get<bool>();

  if (auto it = j.find("inputs"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorKind::MalformedJson, ctx + ": inputs must be object");
    for (auto& [name, val] : it->items()) {
      if (auto iv = irj::input_from_json(val, ctx + " input " + name)) {
        b.inputs.emplace(name, std::move(*iv));
      }
    }
  }
  if (auto it = j.find("fields"); it != j.end()) {
    if (!it->is_object()) throw Error(ErrorKind::MalformedJson, ctx + ": fields must be object");
    for (auto& [name, val] : it->items()) {
      b.fields.emplace(name, irj::field_from_json(val, ctx + ": field " + name));
    }
  }
  if (auto it = j.find("mutation"); it != j.end() && it->is_object()) {
    b.mutation = irj::mutation_from_json(*it);
  }
  return b;
}

AssetMeta parse_asset(const json& j, AssetMeta::Kind kind, const std::string& ctx) {
  AssetMeta a;
  a.kind = kind;
  a.asset_id = jio::member(j, "assetId", ctx.c_str()).get<std::string>();
  a.name = jio::member(j, "name", ctx.c_str()).get<std::string>();
  if (kind == AssetMeta::Kind::Image) {
    a.width = jio::member(j, "width", ctx.c_str()).get<int>();
    a.height = jio::member(j, "height", ctx.c_str()).get<int>();
    if (a.width <= 0 || a.height <= 0) {
      throw Error(ErrorKind::MalformedJson, ctx + ": image dimensions must be positive");
    }
  } else {
    a.duration = jio::member(j, "duration", ctx.c_str()).get<double>();
    if (a.duration < 0) throw Error(ErrorKind::MalformedJson, ctx + ": negative duration");
  }
  if (auto it = j.find("payloadDigest"); it != j.end() && it->is_string()) {
    a.payload_digest = it->get<std::string>();
  }
  return a;
}

Target parse_target(const json& j, std::map<std::string, std::string>* broadcasts) {
  Target t;
  t.name = jio::member(j, "name", "target").get<std::string>();
  const std::string ctx = "target " + t.name;
  // Real sb3 has no target ids; fall back to the (unique) name.
  t.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : t.name;
  if (auto it = j.find("isStage"); it != j.end()) t.is_stage = it->get<bool>();

  if (auto it = j.find("variables"); it != j.end()) {
    for (auto& [id, decl] : it->items()) {
      if (!decl.is_array() || decl.size() < 2) {
        throw Error(ErrorKind::MalformedJson, ctx + ": variable " + id);
      }
      t.variables.emplace(id, VariableDecl{decl[0].get<std::string>(),
                                           jio::scalar_from_json(decl[1])});
    }
  }
  if (auto it = j.find("lists"); it != j.end()) {
    for (auto& [id, decl] : it->items()) {
      if (!decl.is_array() || decl.size() < 2 || !decl[1].is_array()) {
        throw Error(ErrorKind::MalformedJson, ctx + ": list " + id);
      }
      ListDecl ld;
      ld.name = decl[0].get<std::string>();
      for (const auto& v : decl[1]) ld.init.push_back(jio::scalar_from_json(v));
      t.lists.emplace(id, std::move(ld));
    }
  }
  if (t.is_stage) {
    if (auto it = j.find("broadcasts"); it != j.end()) {
      for (auto& [id, name] : it->items()) {
        broadcasts->emplace(id, name.get<std::string>());
      }
    }
  }
  if (auto it = j.find("blocks"); it != j.end()) {
    for (auto& [id, bj] : it->items()) {
      if (!bj.is_object()) throw Error(ErrorKind::MalformedJson, ctx + ": block " + id);
      t.blocks.emplace(id, parse_block(id, bj));
    }
  }
  if (auto it = j.find("costumes"); it != j.end()) {
    for (const auto& c : *it) t.costumes.push_back(parse_asset(c, AssetMeta::Kind::Image, ctx));
  }
  if (auto it = j.find("sounds"); it != j.end()) {
    for (const auto& s : *it) t.sounds.push_back(parse_asset(s, AssetMeta::Kind::Sound, ctx));
  }
  if (auto it = j.find("x"); it != j.end()) t.x = it->get<double>();
  if (auto it = j.find("y"); it != j.end()) t.y = it->get<double>();
  if (auto it = j.find("direction"); it != j.end()) t.direction = it->get<double>();
  if (auto it = j.find("size"); it != j.end()) t.size = it->get<double>();
  if (auto it = j.find("visible"); it != j.end()) t.visible = it->get<bool>();
  if (auto it = j.find("currentCostume"); it != j.end()) t.current_costume = it->get<int>();
  if (auto it = j.find("layerOrder"); it != j.end()) t.layer = it->get<int>();
  return t;
}

ProjectIR parse_project_json(const json& root, const zip::Archive* archive) {
  if (!root.is_object()) throw Error(ErrorKind::MalformedJson, "project root must be an object");
  ProjectIR p;
  const json& targets = jio::member(root, "targets", "project");
  if (!targets.is_array() || targets.empty()) {
    throw Error(ErrorKind::MalformedJson, "project needs a non-empty targets array");
  }
  for (const auto& tj : targets) p.targets.push_back(parse_target(tj, &p.broadcasts));

  if (auto it = root.find("monitors"); it != root.end()) p.monitors_json = jio::canon(*it);
  if (auto it = root.find("meta"); it != root.end() && it->is_object()) {
    if (auto sv = it->find("semver"); sv != it->end() && sv->is_string()) {
      p.format_version = sv->get<std::string>();
    }
  }

  // Fill missing asset digests from container bytes when available.
  if (archive != nullptr) {
    for (auto& t : p.targets) {
      for (auto* assets : {&t.costumes, &t.sounds}) {
        for (auto& a : *assets) {
          if (!a.payload_digest.empty()) continue;
          for (const auto& [name, bytes] : archive->entries) {
            if (name.rfind(a.asset_id + ".", 0) == 0) {
              a.payload_digest = digest_hex(bytes);
              break;
            }
          }
        }
      }
    }
  }

  validate_project(p);
  return p;
}

// ---- serialization ----

json block_to_json(const Block& b) {
  json j;
  j["opcode"] = opcode_name(b.opcode);
  j["parent"] = b.parent ? json(*b.parent) : json(nullptr);
  j["next"] = b.next ? json(*b.next) : json(nullptr);
  json inputs = json::object();
  for (const auto& [name, iv] : b.inputs) inputs[name] = irj::input_to_json(iv);
  j["inputs"] = std::move(inputs);
  json fields = json::object();
  for (const auto& [name, fv] : b.fields) fields[name] = irj::field_to_json(fv);
  j["fields"] = std::move(fields);
  j["topLevel"] = b.top_level;
  if (b.mutation) j["mutation"] = irj::mutation_to_json(*b.mutation);
  return j;
}

json asset_to_json(const AssetMeta& a) {
  json j;
  j["assetId"] = a.asset_id;
  j["name"] = a.name;
  if (a.kind == AssetMeta::Kind::Image) {
    j["width"] = a.width;
    j["height"] = a.height;
  } else {
    j["duration"] = a.duration;
  }
  if (!a.payload_digest.empty()) j["payloadDigest"] = a.payload_digest;
  return j;
}

json target_to_json(const Target& t, const ProjectIR& p) {
  json j;
  j["id"] = t.id;
  j["name"] = t.name;
  j["isStage"] = t.is_stage;
  json vars = json::object();
  for (const auto& [id, v] : t.variables) {
    vars[id] = json::array({v.name, jio::scalar_to_json(v.init)});
  }
  j["variables"] = std::move(vars);
  json lists = json::object();
  for (const auto& [id, l] : t.lists) {
    json init = json::array();
    for (const auto& v : l.init) init.push_back(jio::scalar_to_json(v));
    lists[id] = json::array({l.name, std::move(init)});
  }
  j["lists"] = std::move(lists);
  if (t.is_stage) {
    json bc = json::object();
    for (const auto& [id, name] : p.broadcasts) bc[id] = name;
    j["broadcasts"] = std::move(bc);
  }
  json blocks = json::object();
  for (const auto& [id, b] : t.blocks) blocks[id] = block_to_json(b);
  j["blocks"] = std::move(blocks);
  json costumes = json::array();
  for (const auto& c : t.costumes) costumes.push_back(asset_to_json(c));
  j["costumes"] = std::move(costumes);
  json sounds = json::array();
  for (const auto& s : t.sounds) sounds.push_back(asset_to_json(s));
  j["sounds"] = std::move(sounds);
  j["currentCostume"] = t.current_costume;
  j["layerOrder"] = t.layer;
  if (!t.is_stage) {
    j["x"] = t.x;
    j["y"] = t.y;
    j["direction"] = t.direction;
    j["size"] = t.size;
    j["visible"] = t.visible;
  }
  return j;
}

}  // namespace

bool is_zip_container(std::string_view bytes) { return zip::looks_like_zip(bytes); }

ProjectIR parse_project(std::string_view bytes) {
  if (zip::looks_like_zip(bytes)) {
    zip::Archive ar = zip::read_archive(bytes);
    const std::string* pj = ar.find("project.json");
    if (pj == nullptr) {
      throw Error(ErrorKind::MalformedJson, "zip container has no project.json entry");
    }
    return parse_project_json(jio::parse_or_throw(*pj, "project.json"), &ar);
  }
  return parse_project_json(jio::parse_or_throw(bytes, "project.json"), nullptr);
}

std::string serialize_project(const ProjectIR& p) {
  json root;
  root["extensions"] = json::array();
  root["meta"] = json{{"semver", p.format_version}};
  root["monitors"] = jio::parse_or_throw(p.monitors_json, "monitors");
  json targets = json::array();
  for (const auto& t : p.targets) targets.push_back(target_to_json(t, p));
  root["targets"] = std::move(targets);
  return jio::canon(root);
}

void rederive_links(ProjectIR& p) {
  for (auto& t : p.targets) {
    for (auto& [id, b] : t.blocks) {
      b.parent.reset();
    }
  }
  for (auto& t : p.targets) {
    for (auto& [id, b] : t.blocks) {
      if (b.next) {
        auto it = t.blocks.find(*b.next);
        if (it != t.blocks.end()) it->second.parent = id;
      }
      for (const auto& [name, iv] : b.inputs) {
        if (iv.kind == InputValue::Kind::BlockRef) {
          auto it = t.blocks.find(iv.id);
          if (it != t.blocks.end()) it->second.parent = id;
        }
      }
    }
    for (auto& [id, b] : t.blocks) {
      b.top_level = !b.parent.has_value();
    }
  }
}

void validate_project(const ProjectIR& p) {
  if (p.targets.empty() || !p.targets.front().is_stage) {
    throw Error(ErrorKind::MalformedJson, "first target must be the stage");
  }
  for (size_t i = 1; i < p.targets.size(); ++i) {
    if (p.targets[i].is_stage) throw Error(ErrorKind::MalformedJson, "multiple stage targets");
  }

  // Global identifier uniqueness across every category.
  std::set<std::string> ids;
  auto claim = [&ids](const std::string& id) {
    if (!ids.insert(id).second) throw Error(ErrorKind::DuplicateIdentifier, id);
  };
  for (const auto& t : p.targets) claim(t.id);
  for (const auto& [id, name] : p.broadcasts) claim(id);
  for (const auto& t : p.targets) {
    for (const auto& [id, v] : t.variables) claim(id);
    for (const auto& [id, l] : t.lists) claim(id);
    for (const auto& [id, b] : t.blocks) {
      claim(id);
      if (b.id != id) throw Error(ErrorKind::MalformedJson, "block key/id mismatch at " + id);
    }
  }

  for (const auto& t : p.targets) {
    if (t.current_costume < 0 ||
        (!t.costumes.empty() && t.current_costume >= static_cast<int>(t.costumes.size())) ||
        (t.costumes.empty() && t.current_costume != 0)) {
      throw Error(ErrorKind::MalformedJson, "costume index out of range on " + t.id);
    }
    for (const auto& c : t.costumes) {
      if (c.width <= 0 || c.height <= 0) {
        throw Error(ErrorKind::MalformedJson, "bad image metadata on " + t.id);
      }
    }
    for (const auto& s : t.sounds) {
      if (s.duration < 0) throw Error(ErrorKind::MalformedJson, "bad sound metadata on " + t.id);
    }

    // Count how many times each block is referenced as someone's next or
    // input; a block graph is a forest, so at most once.
    std::map<std::string, int> ref_count;
    for (const auto& [id, b] : t.blocks) {
      if (b.next) {
        auto it = t.blocks.find(*b.next);
        if (it == t.blocks.end()) throw Error(ErrorKind::DanglingReference, "block " + *b.next);
        if (it->second.parent != id) throw Error(ErrorKind::LinkInconsistency, *b.next);
        ref_count[*b.next]++;
      }
      for (const auto& [name, iv] : b.inputs) {
        switch (iv.kind) {
          case InputValue::Kind::BlockRef: {
            auto it = t.blocks.find(iv.id);
            if (it == t.blocks.end()) {
              throw Error(ErrorKind::DanglingReference, "block " + iv.id);
            }
            if (it->second.parent != id) throw Error(ErrorKind::LinkInconsistency, iv.id);
            ref_count[iv.id]++;
            break;
          }
          case InputValue::Kind::VarRef:
            if (p.resolve_variable(t, iv.id) == nullptr) {
              throw Error(ErrorKind::DanglingReference, "variable " + iv.id);
            }
            break;
          case InputValue::Kind::ListRef:
            if (p.resolve_list(t, iv.id) == nullptr) {
              throw Error(ErrorKind::DanglingReference, "list " + iv.id);
            }
            break;
          case InputValue::Kind::BroadcastRef:
            if (!p.broadcasts.count(iv.id)) {
              throw Error(ErrorKind::DanglingReference, "broadcast " + iv.id);
            }
            break;
          case InputValue::Kind::Literal:
            break;
        }
      }
      for (const auto& [name, fv] : b.fields) {
        if (fv.ref_id.empty()) continue;
        if (name == "VARIABLE") {
          if (p.resolve_variable(t, fv.ref_id) == nullptr) {
            throw Error(ErrorKind::DanglingReference, "variable " + fv.ref_id);
          }
        } else if (name == "LIST") {
          if (p.resolve_list(t, fv.ref_id) == nullptr) {
            throw Error(ErrorKind::DanglingReference, "list " + fv.ref_id);
          }
        } else if (name == "BROADCAST_OPTION") {
          if (!p.broadcasts.count(fv.ref_id)) {
            throw Error(ErrorKind::DanglingReference, "broadcast " + fv.ref_id);
          }
        }
      }
    }

    for (const auto& [id, b] : t.blocks) {
      int refs = ref_count.count(id) ? ref_count.at(id) : 0;
      if (refs > 1) throw Error(ErrorKind::LinkInconsistency, id);
      if (b.parent) {
        if (refs == 0) throw Error(ErrorKind::LinkInconsistency, id);
        if (!t.blocks.count(*b.parent)) {
          throw Error(ErrorKind::DanglingReference, "block " + *b.parent);
        }
      } else if (refs != 0) {
        // Someone points here but this block does not acknowledge a parent.
        throw Error(ErrorKind::LinkInconsistency, id);
      }
      if (b.top_level != !b.parent.has_value()) throw Error(ErrorKind::LinkInconsistency, id);
      if (is_hat(b.opcode) && b.parent) throw Error(ErrorKind::LinkInconsistency, id);
    }

    // Next-chains must be acyclic: walk from every root.
    std::set<std::string> visited;
    for (const auto& [id, b] : t.blocks) {
      if (b.parent) continue;
      std::set<std::string> on_path;
      std::vector<const Block*> stack{&b};
      while (!stack.empty()) {
        const Block* cur = stack.back();
        stack.pop_back();
        if (!on_path.insert(cur->id).second) throw Error(ErrorKind::LinkInconsistency, cur->id);
        visited.insert(cur->id);
        if (cur->next) stack.push_back(&t.blocks.at(*cur->next));
        for (const auto& [name, iv] : cur->inputs) {
          if (iv.kind == InputValue::Kind::BlockRef) stack.push_back(&t.blocks.at(iv.id));
        }
      }
    }
    for (const auto& [id, b] : t.blocks) {
      if (!visited.count(id)) throw Error(ErrorKind::LinkInconsistency, id);
    }
  }
}

ComplexityReport complexity_metrics(const ProjectIR& p) {
  ComplexityReport r;
  for (const auto& t : p.targets) {
    if (!t.is_stage) r.sprites++;
    for (const auto& [id, b] : t.blocks) {
      if (b.top_level && is_hat(b.opcode)) r.scripts++;
      if (b.opcode == Opcode::event_broadcast || b.opcode == Opcode::event_broadcastandwait ||
          b.opcode == Opcode::event_whenbroadcastreceived) {
        r.broadcast_uses++;
      }
      if (b.opcode == Opcode::procedures_definition) r.custom_blocks++;
    }
  }
  r.passes = r.sprites >= 5 && r.scripts >= 15 && r.broadcast_uses >= 3 && r.custom_blocks >= 1;
  return r;
}

}  // namespace sbforge
