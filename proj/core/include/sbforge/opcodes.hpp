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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbforge {

// The supported opcode catalog, exhaustive. Anything else is a hard parse
// error: downstream oracle synthesis requires that the VM can execute
// every block it accepts.
enum class Opcode {
  event_whenflagclicked,
  event_whenkeypressed,
  event_whenthisspriteclicked,
  event_whenbroadcastreceived,
  event_broadcast,
  event_broadcastandwait,
  control_wait,
  control_repeat,
  control_forever,
  control_if,
  control_if_else,
  control_wait_until,
  control_repeat_until,
  control_stop,
  control_create_clone_of,
  control_start_as_clone,
  control_delete_this_clone,
  data_setvariableto,
  data_changevariableby,
  data_addtolist,
  data_deletealloflist,
  data_deleteoflist,
  data_itemoflist,
  data_lengthoflist,
  motion_gotoxy,
  motion_changexby,
  motion_changeyby,
  motion_setx,
  motion_sety,
  motion_pointindirection,
  looks_show,
  looks_hide,
  looks_switchcostumeto,
  looks_nextcostume,
  looks_switchbackdropto,
  sensing_keypressed,
  sensing_touchingobject,
  operator_add,
  operator_subtract,
  operator_multiply,
  operator_divide,
  operator_random,
  operator_gt,
  operator_lt,
  operator_equals,
  operator_and,
  operator_or,
  operator_not,
  operator_join,
  procedures_definition,
  procedures_call,
  argument_reporter_string_number,
};

std::optional<Opcode> opcode_from_name(std::string_view name);
const char* opcode_name(Opcode op);
const std::vector<Opcode>& opcode_catalog();

/// Event hooks that root scripts.
bool is_hat(Opcode op);
/// Value-producing blocks usable inside inputs.
bool is_reporter(Opcode op);
/// Boolean-shaped reporters.
bool is_boolean_reporter(Opcode op);
/// Blocks that write VM-observable state (variables, lists, pose,
/// looks, broadcasts, clone lifecycle). Drives injection-site ranking.
bool writes_observable(Opcode op);

}  // namespace sbforge
