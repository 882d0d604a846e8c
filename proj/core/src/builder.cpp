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

#include "sbforge/builder.hpp"

#include <stdexcept>

#include "sbforge/errors.hpp"

namespace sbforge::build {

Arg lit(Scalar v) {
  Arg a;
  a.kind = Arg::Kind::Literal;
  a.literal = std::move(v);
  return a;
}
Arg var(std::string name) {
  Arg a;
  a.kind = Arg::Kind::Var;
  a.name = std::move(name);
  return a;
}
Arg list_contents(std::string name) {
  Arg a;
  a.kind = Arg::Kind::List;
  a.name = std::move(name);
  return a;
}
Arg expr(Node reporter) {
  Arg a;
  a.kind = Arg::Kind::Child;
  a.child = std::make_shared<Node>(std::move(reporter));
  return a;
}

namespace {

Arg broadcast_arg(std::string name) {
  Arg a;
  a.kind = Arg::Kind::Broadcast;
  a.name = std::move(name);
  return a;
}

Node binop(Opcode op, const char* k1, const char* k2, Arg a, Arg b) {
  Node n;
  n.op = op;
  n.inputs.emplace(k1, std::move(a));
  n.inputs.emplace(k2, std::move(b));
  return n;
}

Node var_field_stmt(Opcode op, std::string name, Arg value) {
  Node n;
  n.op = op;
  n.fields.emplace("VARIABLE", FieldSpec{Scalar(std::move(name)), FieldSpec::Ref::Var});
  n.inputs.emplace("VALUE", std::move(value));
  return n;
}

Node list_field_stmt(Opcode op, std::string name) {
  Node n;
  n.op = op;
  n.fields.emplace("LIST", FieldSpec{Scalar(std::move(name)), FieldSpec::Ref::List});
  return n;
}

}  // namespace

Node add(Arg a, Arg b) { return binop(Opcode::operator_add, "NUM1", "NUM2", std::move(a), std::move(b)); }
Node sub(Arg a, Arg b) { return binop(Opcode::operator_subtract, "NUM1", "NUM2", std::move(a), std::move(b)); }
Node mul(Arg a, Arg b) { return binop(Opcode::operator_multiply, "NUM1", "NUM2", std::move(a), std::move(b)); }
Node div(Arg a, Arg b) { return binop(Opcode::operator_divide, "NUM1", "NUM2", std::move(a), std::move(b)); }
Node pick_random(Arg from, Arg to) {
  return binop(Opcode::operator_random, "FROM", "TO", std::move(from), std::move(to));
}
Node gt(Arg a, Arg b) { return binop(Opcode::operator_gt, "OPERAND1", "OPERAND2", std::move(a), std::move(b)); }
Node lt(Arg a, Arg b) { return binop(Opcode::operator_lt, "OPERAND1", "OPERAND2", std::move(a), std::move(b)); }
Node eq(Arg a, Arg b) { return binop(Opcode::operator_equals, "OPERAND1", "OPERAND2", std::move(a), std::move(b)); }
Node logic_and(Arg a, Arg b) {
  return binop(Opcode::operator_and, "OPERAND1", "OPERAND2", std::move(a), std::move(b));
}
Node logic_or(Arg a, Arg b) {
  return binop(Opcode::operator_or, "OPERAND1", "OPERAND2", std::move(a), std::move(b));
}
Node logic_not(Arg a) {
  Node n;
  n.op = Opcode::operator_not;
  n.inputs.emplace("OPERAND", std::move(a));
  return n;
}
Node join(Arg a, Arg b) {
  return binop(Opcode::operator_join, "STRING1", "STRING2", std::move(a), std::move(b));
}
Node key_pressed(std::string key) {
  Node n;
  n.op = Opcode::sensing_keypressed;
  n.inputs.emplace("KEY_OPTION", lit(Scalar(std::move(key))));
  return n;
}
Node touching(std::string object) {
  Node n;
  n.op = Opcode::sensing_touchingobject;
  n.inputs.emplace("TOUCHINGOBJECTMENU", lit(Scalar(std::move(object))));
  return n;
}
Node item_of_list(std::string list, Arg index) {
  Node n = list_field_stmt(Opcode::data_itemoflist, std::move(list));
  n.inputs.emplace("INDEX", std::move(index));
  return n;
}
Node length_of_list(std::string list) {
  return list_field_stmt(Opcode::data_lengthoflist, std::move(list));
}
Node proc_arg(std::string name) {
  Node n;
  n.op = Opcode::argument_reporter_string_number;
  n.fields.emplace("VALUE", FieldSpec{Scalar(std::move(name)), FieldSpec::Ref::None});
  return n;
}

Node set_var(std::string name, Arg value) {
  return var_field_stmt(Opcode::data_setvariableto, std::move(name), std::move(value));
}
Node change_var(std::string name, Arg delta) {
  return var_field_stmt(Opcode::data_changevariableby, std::move(name), std::move(delta));
}
Node add_to_list(std::string list, Arg item) {
  Node n = list_field_stmt(Opcode::data_addtolist, std::move(list));
  n.inputs.emplace("ITEM", std::move(item));
  return n;
}
Node delete_all_of_list(std::string list) {
  return list_field_stmt(Opcode::data_deletealloflist, std::move(list));
}
Node delete_of_list(std::string list, Arg index) {
  Node n = list_field_stmt(Opcode::data_deleteoflist, std::move(list));
  n.inputs.emplace("INDEX", std::move(index));
  return n;
}
Node broadcast(std::string message) {
  Node n;
  n.op = Opcode::event_broadcast;
  n.inputs.emplace("BROADCAST_INPUT", broadcast_arg(std::move(message)));
  return n;
}
Node broadcast_and_wait(std::string message) {
  Node n;
  n.op = Opcode::event_broadcastandwait;
  n.inputs.emplace("BROADCAST_INPUT", broadcast_arg(std::move(message)));
  return n;
}
Node wait_secs(Arg seconds) {
  Node n;
  n.op = Opcode::control_wait;
  n.inputs.emplace("DURATION", std::move(seconds));
  return n;
}
Node repeat(Arg times, Script body) {
  Node n;
  n.op = Opcode::control_repeat;
  n.inputs.emplace("TIMES", std::move(times));
  n.substack = std::move(body);
  return n;
}
Node forever(Script body) {
  Node n;
  n.op = Opcode::control_forever;
  n.substack = std::move(body);
  return n;
}
Node if_then(Node condition, Script body) {
  Node n;
  n.op = Opcode::control_if;
  n.inputs.emplace("CONDITION", expr(std::move(condition)));
  n.substack = std::move(body);
  return n;
}
Node if_else(Node condition, Script then_body, Script else_body) {
  Node n;
  n.op = Opcode::control_if_else;
  n.inputs.emplace("CONDITION", expr(std::move(condition)));
  n.substack = std::move(then_body);
  n.substack2 = std::move(else_body);
  return n;
}
Node wait_until(Node condition) {
  Node n;
  n.op = Opcode::control_wait_until;
  n.inputs.emplace("CONDITION", expr(std::move(condition)));
  return n;
}
Node repeat_until(Node condition, Script body) {
  Node n;
  n.op = Opcode::control_repeat_until;
  n.inputs.emplace("CONDITION", expr(std::move(condition)));
  n.substack = std::move(body);
  return n;
}
Node stop_all() {
  Node n;
  n.op = Opcode::control_stop;
  n.fields.emplace("STOP_OPTION", FieldSpec{Scalar("all"), FieldSpec::Ref::None});
  return n;
}
Node stop_this_script() {
  Node n;
  n.op = Opcode::control_stop;
  n.fields.emplace("STOP_OPTION", FieldSpec{Scalar("this script"), FieldSpec::Ref::None});
  return n;
}
Node create_clone_of(std::string target) {
  Node n;
  n.op = Opcode::control_create_clone_of;
  n.inputs.emplace("CLONE_OPTION", lit(Scalar(std::move(target))));
  return n;
}
Node delete_this_clone() {
  Node n;
  n.op = Opcode::control_delete_this_clone;
  return n;
}
Node goto_xy(Arg x, Arg y) { return binop(Opcode::motion_gotoxy, "X", "Y", std::move(x), std::move(y)); }
Node change_x(Arg dx) {
  Node n;
  n.op = Opcode::motion_changexby;
  n.inputs.emplace("DX", std::move(dx));
  return n;
}
Node change_y(Arg dy) {
  Node n;
  n.op = Opcode::motion_changeyby;
  n.inputs.emplace("DY", std::move(dy));
  return n;
}
Node set_x(Arg x) {
  Node n;
  n.op = Opcode::motion_setx;
  n.inputs.emplace("X", std::move(x));
  return n;
}
Node set_y(Arg y) {
  Node n;
  n.op = Opcode::motion_sety;
  n.inputs.emplace("Y", std::move(y));
  return n;
}
Node point_in_direction(Arg dir) {
  Node n;
  n.op = Opcode::motion_pointindirection;
  n.inputs.emplace("DIRECTION", std::move(dir));
  return n;
}
Node show() {
  Node n;
  n.op = Opcode::looks_show;
  return n;
}
Node hide() {
  Node n;
  n.op = Opcode::looks_hide;
  return n;
}
Node switch_costume(Arg costume) {
  Node n;
  n.op = Opcode::looks_switchcostumeto;
  n.inputs.emplace("COSTUME", std::move(costume));
  return n;
}
Node next_costume() {
  Node n;
  n.op = Opcode::looks_nextcostume;
  return n;
}
Node switch_backdrop(Arg backdrop) {
  Node n;
  n.op = Opcode::looks_switchbackdropto;
  n.inputs.emplace("BACKDROP", std::move(backdrop));
  return n;
}
Node call_proc(std::string proccode, std::map<std::string, Arg> args) {
  Node n;
  n.op = Opcode::procedures_call;
  Mutation m;
  m.proccode = std::move(proccode);
  n.mutation = std::move(m);
  for (auto& [k, v] : args) n.inputs.emplace(k, std::move(v));
  return n;
}

// ---- TargetBuilder / ProjectBuilder ----

ProjectBuilder::ProjectBuilder() {
  PendingTarget stage;
  stage.name = "Stage";
  stage.is_stage = true;
  targets_.push_back(std::move(stage));
}

TargetBuilder ProjectBuilder::stage() { return TargetBuilder(this, 0); }

TargetBuilder ProjectBuilder::sprite(std::string name) {
  PendingTarget t;
  t.name = std::move(name);
  targets_.push_back(std::move(t));
  return TargetBuilder(this, targets_.size() - 1);
}

ProjectBuilder& ProjectBuilder::backdrop(std::string name, int width, int height) {
  AssetMeta a;
  a.kind = AssetMeta::Kind::Image;
  a.asset_id = "asset." + name;
  a.name = std::move(name);
  a.width = width;
  a.height = height;
  targets_[0].costumes.push_back(std::move(a));
  return *this;
}

TargetBuilder& TargetBuilder::variable(std::string name, Scalar init) {
  owner_->targets_[index_].variables.emplace_back(std::move(name), std::move(init));
  return *this;
}
TargetBuilder& TargetBuilder::list(std::string name, std::vector<Scalar> init) {
  owner_->targets_[index_].lists.emplace_back(std::move(name), std::move(init));
  return *this;
}
TargetBuilder& TargetBuilder::costume(std::string name, int width, int height) {
  AssetMeta a;
  a.kind = AssetMeta::Kind::Image;
  a.asset_id = "asset." + owner_->targets_[index_].name + "." + name;
  a.name = std::move(name);
  a.width = width;
  a.height = height;
  owner_->targets_[index_].costumes.push_back(std::move(a));
  return *this;
}
TargetBuilder& TargetBuilder::sound(std::string name, double seconds) {
  AssetMeta a;
  a.kind = AssetMeta::Kind::Sound;
  a.asset_id = "asset." + owner_->targets_[index_].name + "." + name;
  a.name = std::move(name);
  a.duration = seconds;
  owner_->targets_[index_].sounds.push_back(std::move(a));
  return *this;
}
TargetBuilder& TargetBuilder::at(double x, double y) {
  owner_->targets_[index_].x = x;
  owner_->targets_[index_].y = y;
  return *this;
}
TargetBuilder& TargetBuilder::sized(double percent) {
  owner_->targets_[index_].size = percent;
  return *this;
}
TargetBuilder& TargetBuilder::hidden() {
  owner_->targets_[index_].visible = false;
  return *this;
}

namespace {

Node hat(Opcode op) {
  Node n;
  n.op = op;
  return n;
}

}  // namespace

TargetBuilder& TargetBuilder::on_flag(Script body) {
  owner_->targets_[index_].scripts.push_back({hat(Opcode::event_whenflagclicked), std::move(body)});
  return *this;
}
TargetBuilder& TargetBuilder::on_key(std::string key, Script body) {
  Node h = hat(Opcode::event_whenkeypressed);
  h.fields.emplace("KEY_OPTION", FieldSpec{Scalar(std::move(key)), FieldSpec::Ref::None});
  owner_->targets_[index_].scripts.push_back({std::move(h), std::move(body)});
  return *this;
}
TargetBuilder& TargetBuilder::on_click(Script body) {
  owner_->targets_[index_].scripts.push_back(
      {hat(Opcode::event_whenthisspriteclicked), std::move(body)});
  return *this;
}
TargetBuilder& TargetBuilder::on_receive(std::string message, Script body) {
  Node h = hat(Opcode::event_whenbroadcastreceived);
  h.fields.emplace("BROADCAST_OPTION",
                   FieldSpec{Scalar(std::move(message)), FieldSpec::Ref::Broadcast});
  owner_->targets_[index_].scripts.push_back({std::move(h), std::move(body)});
  return *this;
}
TargetBuilder& TargetBuilder::on_clone_start(Script body) {
  owner_->targets_[index_].scripts.push_back({hat(Opcode::control_start_as_clone), std::move(body)});
  return *this;
}
TargetBuilder& TargetBuilder::define_proc(std::string proccode, std::vector<std::string> arg_names,
                                          bool warp, Script body) {
  Node h = hat(Opcode::procedures_definition);
  Mutation m;
  m.proccode = std::move(proccode);
  m.argument_names = std::move(arg_names);
  m.warp = warp;
  h.mutation = std::move(m);
  owner_->targets_[index_].scripts.push_back({std::move(h), std::move(body)});
  return *this;
}
TargetBuilder& TargetBuilder::orphan_script(Script body) {
  owner_->targets_[index_].scripts.push_back({std::nullopt, std::move(body)});
  return *this;
}

namespace {

struct Emitter {
  const ProjectIR& project;  // partially built: declarations are in place
  Target& target;
  int counter = 0;

  std::string fresh_id() { return target.id + ".b" + std::to_string(counter++); }

  std::string resolve_var(const std::string& name) {
    for (const auto& [id, d] : target.variables) {
      if (d.name == name) return id;
    }
    for (const auto& [id, d] : project.targets.front().variables) {
      if (d.name == name) return id;
    }
    throw Error(ErrorKind::DanglingReference, "variable name " + name);
  }

  std::string resolve_list(const std::string& name) {
    for (const auto& [id, d] : target.lists) {
      if (d.name == name) return id;
    }
    for (const auto& [id, d] : project.targets.front().lists) {
      if (d.name == name) return id;
    }
    throw Error(ErrorKind::DanglingReference, "list name " + name);
  }

  std::string resolve_broadcast(const std::string& name) {
    auto id = project.broadcast_id_for_name(name);
    if (!id) throw Error(ErrorKind::DanglingReference, "broadcast name " + name);
    return *id;
  }

  // Emits a node (plus descendants), returns its id. `parent` may be empty.
  std::string emit_node(const Node& n, const std::string& parent) {
    std::string id = fresh_id();
    Block b;
    b.id = id;
    b.opcode = n.op;
    if (!parent.empty()) b.parent = parent;
    b.top_level = parent.empty();
    b.mutation = n.mutation;
    for (const auto& [name, arg] : n.inputs) {
      switch (arg.kind) {
        case Arg::Kind::Literal:
          b.inputs.emplace(name, InputValue::lit(arg.literal));
          break;
        case Arg::Kind::Child: {
          std::string cid = emit_node(*arg.child, id);
          b.inputs.emplace(name, InputValue::block(cid));
          break;
        }
        case Arg::Kind::Var:
          b.inputs.emplace(name, InputValue::variable(arg.name, resolve_var(arg.name)));
          break;
        case Arg::Kind::List:
          b.inputs.emplace(name, InputValue::list(arg.name, resolve_list(arg.name)));
          break;
        case Arg::Kind::Broadcast:
          b.inputs.emplace(name, InputValue::broadcast(arg.name, resolve_broadcast(arg.name)));
          break;
      }
    }
    for (const auto& [name, f] : n.fields) {
      FieldValue fv;
      fv.value = f.value;
      switch (f.ref) {
        case FieldSpec::Ref::None:
          break;
        case FieldSpec::Ref::Var:
          fv.ref_id = resolve_var(f.value.as_str_raw());
          break;
        case FieldSpec::Ref::List:
          fv.ref_id = resolve_list(f.value.as_str_raw());
          break;
        case FieldSpec::Ref::Broadcast:
          fv.ref_id = resolve_broadcast(f.value.as_str_raw());
          break;
      }
      b.fields.emplace(name, std::move(fv));
    }
    if (!n.substack.empty()) {
      std::string head = emit_chain(n.substack, id);
      b.inputs.emplace("SUBSTACK", InputValue::block(head));
    }
    if (!n.substack2.empty()) {
      std::string head = emit_chain(n.substack2, id);
      b.inputs.emplace("SUBSTACK2", InputValue::block(head));
    }
    target.blocks.emplace(id, std::move(b));
    return id;
  }

  // Emits a statement chain, returns the head id. First block's parent is
  // `parent` (substack owner) or empty for roots.
  std::string emit_chain(const Script& script, const std::string& parent) {
    std::string head;
    std::string prev;
    for (const auto& n : script) {
      std::string id = emit_node(n, prev.empty() ? parent : prev);
      if (head.empty()) {
        head = id;
      } else {
        target.blocks.at(prev).next = id;
      }
      prev = id;
    }
    return head;
  }
};

void collect_broadcast_names(const Node& n, std::vector<std::string>* out) {
  for (const auto& [name, arg] : n.inputs) {
    if (arg.kind == Arg::Kind::Broadcast) out->push_back(arg.name);
    if (arg.kind == Arg::Kind::Child) collect_broadcast_names(*arg.child, out);
  }
  for (const auto& [name, f] : n.fields) {
    if (f.ref == FieldSpec::Ref::Broadcast) out->push_back(f.value.as_str_raw());
  }
  for (const auto& c : n.substack) collect_broadcast_names(c, out);
  for (const auto& c : n.substack2) collect_broadcast_names(c, out);
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  }
  return out;
}

}  // namespace

ProjectIR ProjectBuilder::build() const {
  ProjectIR p;

  // Pass 1: declarations.
  for (size_t i = 0; i < targets_.size(); ++i) {
    const PendingTarget& pt = targets_[i];
    Target t;
    t.name = pt.name;
    t.id = pt.is_stage ? "stage" : "spr." + sanitize(pt.name);
    t.is_stage = pt.is_stage;
    t.x = pt.x;
    t.y = pt.y;
    t.size = pt.size;
    t.visible = pt.visible;
    t.layer = static_cast<int>(i);
    for (const auto& [name, init] : pt.variables) {
      t.variables.emplace(t.id + ".var." + sanitize(name), VariableDecl{name, init});
    }
    for (const auto& [name, init] : pt.lists) {
      t.lists.emplace(t.id + ".list." + sanitize(name), ListDecl{name, init});
    }
    t.costumes = pt.costumes;
    t.sounds = pt.sounds;
    p.targets.push_back(std::move(t));
  }

  // Broadcast declarations come from usage.
  std::vector<std::string> names;
  for (const auto& pt : targets_) {
    for (const auto& s : pt.scripts) {
      if (s.hat) collect_broadcast_names(*s.hat, &names);
      for (const auto& n : s.body) collect_broadcast_names(n, &names);
    }
  }
  for (const auto& n : names) {
    if (!p.broadcast_id_for_name(n)) p.broadcasts.emplace("bc." + sanitize(n), n);
  }

  // Pass 2: scripts.
  for (size_t i = 0; i < targets_.size(); ++i) {
    Emitter em{p, p.targets[i]};
    for (const auto& s : targets_[i].scripts) {
      if (s.hat) {
        std::string hat_id = em.emit_node(*s.hat, "");
        if (!s.body.empty()) {
          std::string head = em.emit_chain(s.body, "");
          Block& hatb = p.targets[i].blocks.at(hat_id);
          hatb.next = head;
          p.targets[i].blocks.at(head).parent = hat_id;
          p.targets[i].blocks.at(head).top_level = false;
        }
      } else if (!s.body.empty()) {
        em.emit_chain(s.body, "");
      }
    }
  }

  validate_project(p);
  return p;
}

}  // namespace sbforge::build
