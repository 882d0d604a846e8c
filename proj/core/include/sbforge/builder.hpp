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

// Programmatic project construction. Scripts are written as expression
// trees; variables, lists, and broadcasts are referenced by display name
// and resolved to stable identifiers when the project is built.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbforge/project_ir.hpp"

namespace sbforge::build {

struct Node;

/// One argument slot of a node: literal, nested reporter, or a named
/// variable / list / broadcast reference.
struct Arg {
  enum class Kind { Literal, Child, Var, List, Broadcast };
  Kind kind = Kind::Literal;
  Scalar literal;
  std::shared_ptr<Node> child;
  std::string name;
};

struct FieldSpec {
  enum class Ref { None, Var, List, Broadcast };
  Scalar value;
  Ref ref = Ref::None;
};

struct Node {
  Opcode op;
  std::map<std::string, Arg> inputs;
  std::map<std::string, FieldSpec> fields;
  std::vector<Node> substack;   // SUBSTACK
  std::vector<Node> substack2;  // SUBSTACK2
  std::optional<Mutation> mutation;
};

using Script = std::vector<Node>;

// -- expressions --
Arg lit(Scalar v);
Arg var(std::string name);
Arg list_contents(std::string name);
Arg expr(Node reporter);
Node add(Arg a, Arg b);
Node sub(Arg a, Arg b);
Node mul(Arg a, Arg b);
Node div(Arg a, Arg b);
Node pick_random(Arg from, Arg to);
Node gt(Arg a, Arg b);
Node lt(Arg a, Arg b);
Node eq(Arg a, Arg b);
Node logic_and(Arg a, Arg b);
Node logic_or(Arg a, Arg b);
Node logic_not(Arg a);
Node join(Arg a, Arg b);
Node key_pressed(std::string key);
Node touching(std::string object);  // sprite name or "_edge_"
Node item_of_list(std::string list, Arg index);
Node length_of_list(std::string list);
Node proc_arg(std::string name);

// -- statements --
Node set_var(std::string name, Arg value);
Node change_var(std::string name, Arg delta);
Node add_to_list(std::string list, Arg item);
Node delete_all_of_list(std::string list);
Node delete_of_list(std::string list, Arg index);
Node broadcast(std::string message);
Node broadcast_and_wait(std::string message);
Node wait_secs(Arg seconds);
Node repeat(Arg times, Script body);
Node forever(Script body);
Node if_then(Node condition, Script body);
Node if_else(Node condition, Script then_body, Script else_body);
Node wait_until(Node condition);
Node repeat_until(Node condition, Script body);
Node stop_all();
Node stop_this_script();
Node create_clone_of(std::string target);  // sprite name or "_myself_"
Node delete_this_clone();
Node goto_xy(Arg x, Arg y);
Node change_x(Arg dx);
Node change_y(Arg dy);
Node set_x(Arg x);
Node set_y(Arg y);
Node point_in_direction(Arg dir);
Node show();
Node hide();
Node switch_costume(Arg costume);
Node next_costume();
Node switch_backdrop(Arg backdrop);
Node call_proc(std::string proccode, std::map<std::string, Arg> args);

class ProjectBuilder;

class TargetBuilder {
 public:
  TargetBuilder& variable(std::string name, Scalar init);
  TargetBuilder& list(std::string name, std::vector<Scalar> init);
  TargetBuilder& costume(std::string name, int width, int height);
  TargetBuilder& sound(std::string name, double seconds);
  TargetBuilder& at(double x, double y);
  TargetBuilder& sized(double percent);
  TargetBuilder& hidden();

  TargetBuilder& on_flag(Script body);
  TargetBuilder& on_key(std::string key, Script body);
  TargetBuilder& on_click(Script body);
  TargetBuilder& on_receive(std::string message, Script body);
  TargetBuilder& on_clone_start(Script body);
  TargetBuilder& define_proc(std::string proccode, std::vector<std::string> arg_names, bool warp,
                             Script body);
  /// Detached script (no hat); runs never, parses fine.
  TargetBuilder& orphan_script(Script body);

 private:
  friend class ProjectBuilder;
  TargetBuilder(ProjectBuilder* owner, size_t index) : owner_(owner), index_(index) {}
  ProjectBuilder* owner_;
  size_t index_;
};

class ProjectBuilder {
 public:
  ProjectBuilder();

  TargetBuilder stage();
  TargetBuilder sprite(std::string name);
  ProjectBuilder& backdrop(std::string name, int width = 480, int height = 360);

  /// Resolves names, assigns stable ids, links blocks, validates.
  ProjectIR build() const;

 private:
  friend class TargetBuilder;
  struct PendingScript {
    std::optional<Node> hat;
    Script body;
  };
  struct PendingTarget {
    std::string name;
    bool is_stage = false;
    std::vector<std::pair<std::string, Scalar>> variables;
    std::vector<std::pair<std::string, std::vector<Scalar>>> lists;
    std::vector<AssetMeta> costumes;
    std::vector<AssetMeta> sounds;
    double x = 0, y = 0, size = 100;
    bool visible = true;
    std::vector<PendingScript> scripts;
  };
  std::vector<PendingTarget> targets_;
};

}  // namespace sbforge::build
