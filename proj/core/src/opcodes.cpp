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

#include "sbforge/opcodes.hpp"

#include <array>
#include <map>

namespace sbforge {

namespace {

struct Entry {
  Opcode op;
  const char* name;
};

constexpr std::array<Entry, 52> kCatalog{{
    {Opcode::event_whenflagclicked, "event_whenflagclicked"},
    {Opcode::event_whenkeypressed, "event_whenkeypressed"},
    {Opcode::event_whenthisspriteclicked, "event_whenthisspriteclicked"},
    {Opcode::event_whenbroadcastreceived, "event_whenbroadcastreceived"},
    {Opcode::event_broadcast, "event_broadcast"},
    {Opcode::event_broadcastandwait, "event_broadcastandwait"},
    {Opcode::control_wait, "control_wait"},
    {Opcode::control_repeat, "control_repeat"},
    {Opcode::control_forever, "control_forever"},
    {Opcode::control_if, "control_if"},
    {Opcode::control_if_else, "control_if_else"},
    {Opcode::control_wait_until, "control_wait_until"},
    {Opcode::control_repeat_until, "control_repeat_until"},
    {Opcode::control_stop, "control_stop"},
    {Opcode::control_create_clone_of, "control_create_clone_of"},
    {Opcode::control_start_as_clone, "control_start_as_clone"},
    {Opcode::control_delete_this_clone, "control_delete_this_clone"},
    {Opcode::data_setvariableto, "data_setvariableto"},
    {Opcode::data_changevariableby, "data_changevariableby"},
    {Opcode::data_addtolist, "data_addtolist"},
    {Opcode::data_deletealloflist, "data_deletealloflist"},
    {Opcode::data_deleteoflist, "data_deleteoflist"},
    {Opcode::data_itemoflist, "data_itemoflist"},
    {Opcode::data_lengthoflist, "data_lengthoflist"},
    {Opcode::motion_gotoxy, "motion_gotoxy"},
    {Opcode::motion_changexby, "motion_changexby"},
    {Opcode::motion_changeyby, "motion_changeyby"},
    {Opcode::motion_setx, "motion_setx"},
    {Opcode::motion_sety, "motion_sety"},
    {Opcode::motion_pointindirection, "motion_pointindirection"},
    {Opcode::looks_show, "looks_show"},
    {Opcode::looks_hide, "looks_hide"},
    {Opcode::looks_switchcostumeto, "looks_switchcostumeto"},
    {Opcode::looks_nextcostume, "looks_nextcostume"},
    {Opcode::looks_switchbackdropto, "looks_switchbackdropto"},
    {Opcode::sensing_keypressed, "sensing_keypressed"},
    {Opcode::sensing_touchingobject, "sensing_touchingobject"},
    {Opcode::operator_add, "operator_add"},
    {Opcode::operator_subtract, "operator_subtract"},
    {Opcode::operator_multiply, "operator_multiply"},
    {Opcode::operator_divide, "operator_divide"},
    {Opcode::operator_random, "operator_random"},
    {Opcode::operator_gt, "operator_gt"},
    {Opcode::operator_lt, "operator_lt"},
    {Opcode::operator_equals, "operator_equals"},
    {Opcode::operator_and, "operator_and"},
    {Opcode::operator_or, "operator_or"},
    {Opcode::operator_not, "operator_not"},
    {Opcode::operator_join, "operator_join"},
    {Opcode::procedures_definition, "procedures_definition"},
    {Opcode::procedures_call, "procedures_call"},
    {Opcode::argument_reporter_string_number, "argument_reporter_string_number"},
}};

}  // namespace

std::optional<Opcode> opcode_from_name(std::string_view name) {
  static const std::map<std::string_view, Opcode> index = [] {
    std::map<std::string_view, Opcode> m;
    for (const auto& e : kCatalog) m.emplace(e.name, e.op);
    return m;
  }();
  auto it = index.find(name);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

const char* opcode_name(Opcode op) { return kCatalog[static_cast<size_t>(op)].name; }

const std::vector<Opcode>& opcode_catalog() {
  static const std::vector<Opcode> all = [] {
    std::vector<Opcode> v;
    for (const auto& e : kCatalog) v.push_back(e.op);
    return v;
  }();
  return all;
}

bool is_hat(Opcode op) {
  switch (op) {
    case Opcode::event_whenflagclicked:
    case Opcode::event_whenkeypressed:
    case Opcode::event_whenthisspriteclicked:
    case Opcode::event_whenbroadcastreceived:
    case Opcode::control_start_as_clone:
    case Opcode::procedures_definition:
      return true;
    default:
      return false;
  }
}

bool is_reporter(Opcode op) {
  switch (op) {
    case Opcode::data_itemoflist:
    case Opcode::data_lengthoflist:
    case Opcode::sensing_keypressed:
    case Opcode::sensing_touchingobject:
    case Opcode::operator_add:
    case Opcode::operator_subtract:
    case Opcode::operator_multiply:
    case Opcode::operator_divide:
    case Opcode::operator_random:
    case Opcode::operator_gt:
    case Opcode::operator_lt:
    case Opcode::operator_equals:
    case Opcode::operator_and:
    case Opcode::operator_or:
    case Opcode::operator_not:
    case Opcode::operator_join:
    case Opcode::argument_reporter_string_number:
      return true;
    default:
      return false;
  }
}

bool is_boolean_reporter(Opcode op) {
  switch (op) {
    case Opcode::sensing_keypressed:
    case Opcode::sensing_touchingobject:
    case Opcode::operator_gt:
    case Opcode::operator_lt:
    case Opcode::operator_equals:
    case Opcode::operator_and:
    case Opcode::operator_or:
    case Opcode::operator_not:
      return true;
    default:
      return false;
  }
}

bool writes_observable(Opcode op) {
  switch (op) {
    case Opcode::data_setvariableto:
    case Opcode::data_changevariableby:
    case Opcode::data_addtolist:
    case Opcode::data_deletealloflist:
    case Opcode::data_deleteoflist:
    case Opcode::motion_gotoxy:
    case Opcode::motion_changexby:
    case Opcode::motion_changeyby:
    case Opcode::motion_setx:
    case Opcode::motion_sety:
    case Opcode::motion_pointindirection:
    case Opcode::looks_show:
    case Opcode::looks_hide:
    case Opcode::looks_switchcostumeto:
    case Opcode::looks_nextcostume:
    case Opcode::looks_switchbackdropto:
    case Opcode::event_broadcast:
    case Opcode::event_broadcastandwait:
    case Opcode::control_create_clone_of:
    case Opcode::control_delete_this_clone:
      return true;
    default:
      return false;
  }
}

}  // namespace sbforge
