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

#include "sbforge/vm.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>

#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/util.hpp"

namespace sbforge {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double normalize_direction(double d) {
  d = std::fmod(d, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return d;
}

struct RunawayCrash {};
struct RecursionCrash {};

struct Instance {
  int target_index = 0;
  bool original = true;
  uint64_t creation_seq = 0;  // clone ordering
  bool alive = true;
  std::map<std::string, Scalar> variables;  // own (local) variables
  std::map<std::string, std::vector<Scalar>> lists;
  double x = 0, y = 0, direction = 90, size = 100;
  bool visible = true;
  int costume = 0;

  std::tuple<int, int, uint64_t> order_key() const {
    return {target_index, original ? 0 : 1, creation_seq};
  }
};

struct Frame {
  enum class Kind { Repeat, Forever, Until, Once, Proc };
  Kind kind = Kind::Once;
  std::string owner_block;
  std::string body_head;              // empty when the substack is empty
  std::optional<std::string> after;   // continuation past the owner block
  int64_t remaining = 0;              // Repeat
  bool warp = false;
  std::map<std::string, Scalar> args;  // Proc
};

struct Thread {
  uint64_t id = 0;
  uint64_t instance_id = 0;
  std::string top_block;
  std::optional<std::string> current;
  std::vector<Frame> frames;
  bool done = false;

  enum class Wait { None, Ticks, Until, Threads };
  Wait wait = Wait::None;
  int wake_tick = 0;
  std::string wait_cond_block;          // Until
  std::optional<std::string> wait_resume;  // statement after the wait block
  std::vector<uint64_t> wait_children;  // Threads

  bool stepped_this_tick = false;
};

class Vm {
 public:
  Vm(const ProjectIR& p, const Scenario& s, uint64_t seed)
      : project_(p), scenario_(s), rng_(seed) {
    trace_.scenario_id = s.id;
    trace_.seed = seed;
    trace_.config_digest = digest_hex(s.to_json());
    for (const auto& t : project_.targets) {
      for (const auto& [id, b] : t.blocks) block_index_.emplace(id, &b);
    }
  }

  Trace execute();

 private:
  // -- setup / events --
  void spawn_originals();
  void deliver(const InputEvent& ev);
  void green_flag();
  std::vector<uint64_t> fire_broadcast(const std::string& message);
  uint64_t start_script(uint64_t instance_id, const std::string& hat_id);
  void start_hats_everywhere(Opcode hat, const std::string& key_filter, std::vector<uint64_t>* out);

  // -- stepping --
  void step_tick();
  void step_thread(Thread& th);
  void execute_statement(Thread& th, const Block& b);
  void finish_thread(Thread& th) {
    th.done = true;
    th.current.reset();
    th.frames.clear();
    th.wait = Thread::Wait::None;
  }

  // -- evaluation --
  Scalar eval_input(const Block& b, const std::string& name, Scalar fallback);
  bool eval_condition(const Block& b, const std::string& name);
  Scalar eval_block(const std::string& block_id);
  Scalar eval_value(const InputValue& iv);

  // -- state access --
  Instance& inst(uint64_t id) { return *instances_.at(id); }
  const Target& target_of(const Instance& i) const { return project_.targets[i.target_index]; }
  const Block& block(const std::string& id) const;
  Scalar* find_variable(Instance& owner, const std::string& var_id);
  std::vector<Scalar>* find_list(Instance& owner, const std::string& list_id);
  Instance* original_instance(int target_index);
  int live_clone_count() const;
  void delete_instance(uint64_t id);
  bool touching(const Instance& self, const std::string& object);

  SignalSnapshot snapshot();
  void take_checkpoint(int tick);

  const ProjectIR& project_;
  const Scenario& scenario_;
  SplitMix64 rng_;
  Trace trace_;

  std::map<std::string, const Block*> block_index_;
  std::map<uint64_t, std::unique_ptr<Instance>> instances_;
  Instance* stage_instance_ = nullptr;
  uint64_t next_instance_id_ = 1;
  uint64_t clone_seq_ = 1;

  std::vector<std::unique_ptr<Thread>> threads_;
  std::map<std::pair<uint64_t, std::string>, Thread*> thread_index_;
  uint64_t next_thread_id_ = 1;

  std::set<std::string> keys_held_;
  int now_ = 0;
  int last_checkpoint_events_ = 0;  // index into events_log
  Thread* active_ = nullptr;        // thread being stepped
  int steps_ = 0;                   // per-thread step counter within a tick
};

const Block& Vm::block(const std::string& id) const {
  auto it = block_index_.find(id);
  if (it == block_index_.end()) throw Error(ErrorKind::Internal, "block vanished: " + id);
  return *it->second;
}

void Vm::spawn_originals() {
  for (size_t i = 0; i < project_.targets.size(); ++i) {
    const Target& t = project_.targets[i];
    auto ins = std::make_unique<Instance>();
    ins->target_index = static_cast<int>(i);
    ins->original = true;
    for (const auto& [vid, v] : t.variables) ins->variables.emplace(vid, v.init);
    for (const auto& [lid, l] : t.lists) ins->lists.emplace(lid, l.init);
    ins->x = t.x;
    ins->y = t.y;
    ins->direction = t.direction;
    ins->size = t.size;
    ins->visible = t.visible;
    ins->costume = t.current_costume;
    Instance* raw = ins.get();
    instances_.emplace(next_instance_id_++, std::move(ins));
    if (i == 0) stage_instance_ = raw;
  }
}

Instance* Vm::original_instance(int target_index) {
  for (auto& [id, ins] : instances_) {
    if (ins->alive && ins->original && ins->target_index == target_index) return ins.get();
  }
  return nullptr;
}

int Vm::live_clone_count() const {
  int n = 0;
  for (const auto& [id, ins] : instances_) {
    if (ins->alive && !ins->original) ++n;
  }
  return n;
}

void Vm::delete_instance(uint64_t id) {
  auto it = instances_.find(id);
  if (it == instances_.end()) return;
  it->second->alive = false;
  for (auto& th : threads_) {
    if (!th->done && th->instance_id == id) finish_thread(*th);
  }
}

uint64_t Vm::start_script(uint64_t instance_id, const std::string& hat_id) {
  auto key = std::make_pair(instance_id, hat_id);
  auto it = thread_index_.find(key);
  Thread* th;
  if (it != thread_index_.end()) {
    th = it->second;  // restart from the hat
  } else {
    auto owned = std::make_unique<Thread>();
    owned->id = next_thread_id_++;
    owned->instance_id = instance_id;
    owned->top_block = hat_id;
    th = owned.get();
    threads_.push_back(std::move(owned));
    thread_index_.emplace(key, th);
  }
  th->done = false;
  th->frames.clear();
  th->wait = Thread::Wait::None;
  th->current = block(hat_id).next;
  return th->id;
}

void Vm::start_hats_everywhere(Opcode hat, const std::string& key_filter,
                               std::vector<uint64_t>* out) {
  // Deterministic start order: instance order, then hat block id.
  std::vector<std::pair<std::tuple<int, int, uint64_t>, uint64_t>> order;
  for (const auto& [id, ins] : instances_) {
    if (ins->alive) order.emplace_back(ins->order_key(), id);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [key, iid] : order) {
    const Target& t = target_of(inst(iid));
    for (const auto& [bid, b] : t.blocks) {  // std::map: id-sorted
      if (b.opcode != hat || !b.top_level) continue;
      if (hat == Opcode::event_whenkeypressed) {
        auto f = b.fields.find("KEY_OPTION");
        std::string want = f == b.fields.end() ? "space" : lower(f->second.value.to_display_string());
        if (want != "any" && want != key_filter) continue;
      }
      if (hat == Opcode::event_whenbroadcastreceived) {
        auto f = b.fields.find("BROADCAST_OPTION");
        std::string want = f == b.fields.end() ? "" : f->second.value.to_display_string();
        if (want != key_filter) continue;
      }
      uint64_t tid = start_script(iid, bid);
      if (out != nullptr) out->push_back(tid);
    }
  }
}

void Vm::green_flag() {
  for (auto& th : threads_) {
    if (!th->done) finish_thread(*th);
  }
  std::vector<uint64_t> clones;
  for (const auto& [id, ins] : instances_) {
    if (ins->alive && !ins->original) clones.push_back(id);
  }
  for (uint64_t id : clones) delete_instance(id);
  start_hats_everywhere(Opcode::event_whenflagclicked, "", nullptr);
}

std::vector<uint64_t> Vm::fire_broadcast(const std::string& message) {
  trace_.events_log.emplace_back(now_, message);
  std::vector<uint64_t> started;
  start_hats_everywhere(Opcode::event_whenbroadcastreceived, message, &started);
  return started;
}

void Vm::deliver(const InputEvent& ev) {
  switch (ev.kind) {
    case InputEvent::Kind::GreenFlag:
      green_flag();
      break;
    case InputEvent::Kind::KeyDown: {
      std::string key = lower(ev.arg);
      keys_held_.insert(key);
      start_hats_everywhere(Opcode::event_whenkeypressed, key, nullptr);  // press edge
      break;
    }
    case InputEvent::Kind::KeyUp:
      keys_held_.erase(lower(ev.arg));
      break;
    case InputEvent::Kind::SpriteClick: {
      const Target* t = project_.find_target(ev.arg);
      if (t == nullptr || t->is_stage) {
        throw Error(ErrorKind::TargetNotFound, "sprite " + ev.arg);
      }
      int index = 0;
      for (size_t i = 0; i < project_.targets.size(); ++i) {
        if (&project_.targets[i] == t) index = static_cast<int>(i);
      }
      Instance* ins = original_instance(index);
      for (const auto& [bid, b] : t->blocks) {
        if (b.opcode == Opcode::event_whenthisspriteclicked && b.top_level) {
          for (auto& [iid, ip] : instances_) {
            if (ip.get() == ins) start_script(iid, bid);
          }
        }
      }
      break;
    }
    case InputEvent::Kind::InjectBroadcast: {
      if (!project_.broadcast_id_for_name(ev.arg)) {
        throw Error(ErrorKind::TargetNotFound, "broadcast " + ev.arg);
      }
      fire_broadcast(ev.arg);
      break;
    }
  }
}

// ---- evaluation ----

Scalar Vm::eval_value(const InputValue& iv) {
  switch (iv.kind) {
    case InputValue::Kind::Literal:
      return iv.literal;
    case InputValue::Kind::BlockRef:
      return eval_block(iv.id);
    case InputValue::Kind::VarRef: {
      Scalar* v = find_variable(inst(active_->instance_id), iv.id);
      return v != nullptr ? *v : Scalar(int64_t{0});
    }
    case InputValue::Kind::ListRef: {
      std::vector<Scalar>* l = find_list(inst(active_->instance_id), iv.id);
      if (l == nullptr) return Scalar(std::string());
      std::string joined;
      for (size_t i = 0; i < l->size(); ++i) {
        if (i > 0) joined += ' ';
        joined += (*l)[i].to_display_string();
      }
      return Scalar(std::move(joined));
    }
    case InputValue::Kind::BroadcastRef: {
      auto it = project_.broadcasts.find(iv.id);
      return Scalar(it == project_.broadcasts.end() ? iv.name : it->second);
    }
  }
  return Scalar(int64_t{0});
}

Scalar Vm::eval_input(const Block& b, const std::string& name, Scalar fallback) {
  auto it = b.inputs.find(name);
  if (it == b.inputs.end()) return fallback;
  return eval_value(it->second);
}

bool Vm::eval_condition(const Block& b, const std::string& name) {
  auto it = b.inputs.find(name);
  if (it == b.inputs.end()) return false;  // empty condition slot
  return eval_value(it->second).to_bool();
}

Scalar Vm::eval_block(const std::string& block_id) {
  if (++steps_ > kStepQuotaPerTick) throw RunawayCrash{};
  const Block& b = block(block_id);
  Instance& self = inst(active_->instance_id);
  switch (b.opcode) {
    case Opcode::operator_add:
      return Scalar(eval_input(b, "NUM1", Scalar(int64_t{0})).to_number() +
                    eval_input(b, "NUM2", Scalar(int64_t{0})).to_number());
    case Opcode::operator_subtract:
      return Scalar(eval_input(b, "NUM1", Scalar(int64_t{0})).to_number() -
                    eval_input(b, "NUM2", Scalar(int64_t{0})).to_number());
    case Opcode::operator_multiply:
      return Scalar(eval_input(b, "NUM1", Scalar(int64_t{0})).to_number() *
                    eval_input(b, "NUM2", Scalar(int64_t{0})).to_number());
    case Opcode::operator_divide:
      return Scalar(eval_input(b, "NUM1", Scalar(int64_t{0})).to_number() /
                    eval_input(b, "NUM2", Scalar(int64_t{0})).to_number());
    case Opcode::operator_random: {
      double lo = eval_input(b, "FROM", Scalar(int64_t{0})).to_number();
      double hi = eval_input(b, "TO", Scalar(int64_t{0})).to_number();
      if (lo > hi) std::swap(lo, hi);
      bool integral = lo == std::trunc(lo) && hi == std::trunc(hi);
      if (integral) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return Scalar(static_cast<int64_t>(lo) + static_cast<int64_t>(rng_.next_below(span)));
      }
      double v = lo + rng_.next_unit() * (hi - lo);
      return Scalar(std::round(v * 100.0) / 100.0);
    }
    case Opcode::operator_gt:
      return Scalar(Scalar::compare(eval_input(b, "OPERAND1", Scalar(std::string())),
                                    eval_input(b, "OPERAND2", Scalar(std::string()))) > 0);
    case Opcode::operator_lt:
      return Scalar(Scalar::compare(eval_input(b, "OPERAND1", Scalar(std::string())),
                                    eval_input(b, "OPERAND2", Scalar(std::string()))) < 0);
    case Opcode::operator_equals:
      return Scalar(Scalar::compare(eval_input(b, "OPERAND1", Scalar(std::string())),
                                    eval_input(b, "OPERAND2", Scalar(std::string()))) == 0);
    case Opcode::operator_and:
      return Scalar(eval_condition(b, "OPERAND1") && eval_condition(b, "OPERAND2"));
    case Opcode::operator_or:
      return Scalar(eval_condition(b, "OPERAND1") || eval_condition(b, "OPERAND2"));
    case Opcode::operator_not:
      return Scalar(!eval_condition(b, "OPERAND"));
    case Opcode::operator_join:
      return Scalar(eval_input(b, "STRING1", Scalar(std::string())).to_display_string() +
                    eval_input(b, "STRING2", Scalar(std::string())).to_display_string());
    case Opcode::data_itemoflist: {
      auto f = b.fields.find("LIST");
      std::vector<Scalar>* l =
          f == b.fields.end() ? nullptr : find_list(self, f->second.ref_id);
      if (l == nullptr || l->empty()) return Scalar(std::string());
      Scalar idx = eval_input(b, "INDEX", Scalar(int64_t{1}));
      int64_t i;
      if (idx.kind() == Scalar::Kind::Str && lower(idx.as_str_raw()) == "last") {
        i = static_cast<int64_t>(l->size());
      } else {
        i = static_cast<int64_t>(std::llround(idx.to_number()));
      }
      if (i < 1 || i > static_cast<int64_t>(l->size())) return Scalar(std::string());
      return (*l)[static_cast<size_t>(i - 1)];
    }
    case Opcode::data_lengthoflist: {
      auto f = b.fields.find("LIST");
      std::vector<Scalar>* l =
          f == b.fields.end() ? nullptr : find_list(self, f->second.ref_id);
      return Scalar(static_cast<int64_t>(l == nullptr ? 0 : l->size()));
    }
    case Opcode::sensing_keypressed: {
      std::string key = lower(eval_input(b, "KEY_OPTION", Scalar("space")).to_display_string());
      if (key == "any") return Scalar(!keys_held_.empty());
      return Scalar(keys_held_.count(key) > 0);
    }
    case Opcode::sensing_touchingobject: {
      std::string object =
          eval_input(b, "TOUCHINGOBJECTMENU", Scalar(std::string())).to_display_string();
      return Scalar(touching(self, object));
    }
    case Opcode::argument_reporter_string_number: {
      auto f = b.fields.find("VALUE");
      std::string name = f == b.fields.end() ? "" : f->second.value.to_display_string();
      for (auto it = active_->frames.rbegin(); it != active_->frames.rend(); ++it) {
        if (it->kind == Frame::Kind::Proc) {
          auto a = it->args.find(name);
          return a == it->args.end() ? Scalar(int64_t{0}) : a->second;
        }
      }
      return Scalar(int64_t{0});
    }
    default:
      // Statement opcode evaluated as a reporter: contributes nothing.
      return Scalar(int64_t{0});
  }
}

Scalar* Vm::find_variable(Instance& owner, const std::string& var_id) {
  auto it = owner.variables.find(var_id);
  if (it != owner.variables.end()) return &it->second;
  // Globals live on the stage instance.
  auto sit = stage_instance_->variables.find(var_id);
  if (sit != stage_instance_->variables.end()) return &sit->second;
  return nullptr;
}

std::vector<Scalar>* Vm::find_list(Instance& owner, const std::string& list_id) {
  auto it = owner.lists.find(list_id);
  if (it != owner.lists.end()) return &it->second;
  auto sit = stage_instance_->lists.find(list_id);
  if (sit != stage_instance_->lists.end()) return &sit->second;
  return nullptr;
}

bool Vm::touching(const Instance& self, const std::string& object) {
  const Target& t = target_of(self);
  if (t.is_stage || !self.visible || t.costumes.empty()) return false;
  double w = t.costumes[self.costume % t.costumes.size()].width * self.size / 100.0;
  double h = t.costumes[self.costume % t.costumes.size()].height * self.size / 100.0;
  if (object == "_edge_") {
    return std::abs(self.x) + w / 2 >= 240.0 || std::abs(self.y) + h / 2 >= 180.0;
  }
  const Target* other = project_.find_target_by_name(object);
  if (other == nullptr || other->is_stage || other->costumes.empty()) return false;
  int other_index = 0;
  for (size_t i = 0; i < project_.targets.size(); ++i) {
    if (&project_.targets[i] == other) other_index = static_cast<int>(i);
  }
  for (const auto& [id, ins] : instances_) {
    if (!ins->alive || ins->target_index != other_index || !ins->visible) continue;
    double ow = other->costumes[ins->costume % other->costumes.size()].width * ins->size / 100.0;
    double oh = other->costumes[ins->costume % other->costumes.size()].height * ins->size / 100.0;
    bool overlap_x = std::abs(self.x - ins->x) <= (w + ow) / 2;
    bool overlap_y = std::abs(self.y - ins->y) <= (h + oh) / 2;
    if (overlap_x && overlap_y) return true;
  }
  return false;
}

// ---- statements ----

void Vm::execute_statement(Thread& th, const Block& b) {
  Instance& self = inst(th.instance_id);
  const Target& t = target_of(self);
  auto advance = [&] { th.current = b.next; };

  switch (b.opcode) {
    case Opcode::data_setvariableto: {
      auto f = b.fields.find("VARIABLE");
      if (f != b.fields.end()) {
        Scalar* v = find_variable(self, f->second.ref_id);
        if (v != nullptr) *v = eval_input(b, "VALUE", Scalar(std::string()));
      }
      advance();
      return;
    }
    case Opcode::data_changevariableby: {
      auto f = b.fields.find("VARIABLE");
      if (f != b.fields.end()) {
        Scalar* v = find_variable(self, f->second.ref_id);
        if (v != nullptr) {
          *v = Scalar(v->to_number() + eval_input(b, "VALUE", Scalar(int64_t{0})).to_number());
        }
      }
      advance();
      return;
    }
    case Opcode::data_addtolist: {
      auto f = b.fields.find("LIST");
      if (f != b.fields.end()) {
        std::vector<Scalar>* l = find_list(self, f->second.ref_id);
        if (l != nullptr && l->size() < 200000) {
          l->push_back(eval_input(b, "ITEM", Scalar(std::string())));
        }
      }
      advance();
      return;
    }
    case Opcode::data_deletealloflist: {
      auto f = b.fields.find("LIST");
      if (f != b.fields.end()) {
        if (std::vector<Scalar>* l = find_list(self, f->second.ref_id)) l->clear();
      }
      advance();
      return;
    }
    case Opcode::data_deleteoflist: {
      auto f = b.fields.find("LIST");
      if (f != b.fields.end()) {
        std::vector<Scalar>* l = find_list(self, f->second.ref_id);
        if (l != nullptr && !l->empty()) {
          Scalar idx = eval_input(b, "INDEX", Scalar(int64_t{1}));
          if (idx.kind() == Scalar::Kind::Str && lower(idx.as_str_raw()) == "last") {
            l->pop_back();
          } else if (idx.kind() == Scalar::Kind::Str && lower(idx.as_str_raw()) == "all") {
            l->clear();
          } else {
            int64_t i = static_cast<int64_t>(std::llround(idx.to_number()));
            if (i >= 1 && i <= static_cast<int64_t>(l->size())) {
              l->erase(l->begin() + static_cast<long>(i - 1));
            }
          }
        }
      }
      advance();
      return;
    }
    case Opcode::motion_gotoxy:
      if (!t.is_stage) {
        self.x = eval_input(b, "X", Scalar(int64_t{0})).to_number();
        self.y = eval_input(b, "Y", Scalar(int64_t{0})).to_number();
      }
      advance();
      return;
    case Opcode::motion_changexby:
      if (!t.is_stage) self.x += eval_input(b, "DX", Scalar(int64_t{0})).to_number();
      advance();
      return;
    case Opcode::motion_changeyby:
      if (!t.is_stage) self.y += eval_input(b, "DY", Scalar(int64_t{0})).to_number();
      advance();
      return;
    case Opcode::motion_setx:
      if (!t.is_stage) self.x = eval_input(b, "X", Scalar(int64_t{0})).to_number();
      advance();
      return;
    case Opcode::motion_sety:
      if (!t.is_stage) self.y = eval_input(b, "Y", Scalar(int64_t{0})).to_number();
      advance();
      return;
    case Opcode::motion_pointindirection:
      if (!t.is_stage) {
        self.direction =
            normalize_direction(eval_input(b, "DIRECTION", Scalar(int64_t{90})).to_number());
      }
      advance();
      return;
    case Opcode::looks_show:
      self.visible = true;
      advance();
      return;
    case Opcode::looks_hide:
      self.visible = false;
      advance();
      return;
    case Opcode::looks_switchcostumeto:
    case Opcode::looks_switchbackdropto: {
      bool backdrop = b.opcode == Opcode::looks_switchbackdropto;
      Instance* who = backdrop ? stage_instance_ : &self;
      const Target& def = backdrop ? project_.stage() : t;
      if (who != nullptr && !def.costumes.empty()) {
        Scalar v = eval_input(b, backdrop ? "BACKDROP" : "COSTUME", Scalar(int64_t{1}));
        int count = static_cast<int>(def.costumes.size());
        int picked = -1;
        if (v.kind() == Scalar::Kind::Str) {
          for (int i = 0; i < count; ++i) {
            if (def.costumes[i].name == v.as_str_raw()) picked = i;
          }
        }
        if (picked < 0 && v.is_numeric_like()) {
          int64_t n = static_cast<int64_t>(std::llround(v.to_number()));
          picked = static_cast<int>(((n - 1) % count + count) % count);
        }
        if (picked >= 0) who->costume = picked;
      }
      advance();
      return;
    }
    case Opcode::looks_nextcostume: {
      if (!t.costumes.empty()) self.costume = (self.costume + 1) % static_cast<int>(t.costumes.size());
      advance();
      return;
    }
    case Opcode::event_broadcast: {
      std::string msg = eval_input(b, "BROADCAST_INPUT", Scalar(std::string())).to_display_string();
      fire_broadcast(msg);
      advance();
      return;
    }
    case Opcode::event_broadcastandwait: {
      std::string msg = eval_input(b, "BROADCAST_INPUT", Scalar(std::string())).to_display_string();
      std::vector<uint64_t> started = fire_broadcast(msg);
      // A receiver may be this thread itself (restarted); then the wait is
      // moot because the restart already rewrote our state.
      for (uint64_t id : started) {
        if (id == th.id) return;
      }
      if (!started.empty()) {
        th.wait = Thread::Wait::Threads;
        th.wait_children = std::move(started);
      }
      advance();
      return;
    }
    case Opcode::control_wait: {
      double secs = eval_input(b, "DURATION", Scalar(int64_t{0})).to_number();
      int ticks = std::max<int64_t>(1, std::llround(kTicksPerSecond * secs));
      th.wait = Thread::Wait::Ticks;
      th.wake_tick = now_ + ticks;
      advance();
      return;
    }
    case Opcode::control_wait_until: {
      if (eval_condition(b, "CONDITION")) {
        advance();
        return;
      }
      th.wait = Thread::Wait::Until;
      th.wait_cond_block = b.id;
      th.wait_resume = b.next;
      th.current.reset();
      return;
    }
    case Opcode::control_repeat: {
      int64_t n = std::llround(eval_input(b, "TIMES", Scalar(int64_t{0})).to_number());
      if (n <= 0) {
        advance();
        return;
      }
      Frame f;
      f.kind = Frame::Kind::Repeat;
      f.owner_block = b.id;
      auto sub = b.inputs.find("SUBSTACK");
      f.body_head = sub != b.inputs.end() && sub->second.kind == InputValue::Kind::BlockRef
                        ? sub->second.id
                        : "";
      f.after = b.next;
      f.remaining = n;
      f.warp = !th.frames.empty() && th.frames.back().warp;
      th.frames.push_back(std::move(f));
      th.current = th.frames.back().body_head.empty()
                       ? std::optional<std::string>{}
                       : std::optional<std::string>{th.frames.back().body_head};
      return;
    }
    case Opcode::control_forever:
    case Opcode::control_repeat_until: {
      if (b.opcode == Opcode::control_repeat_until && eval_condition(b, "CONDITION")) {
        advance();
        return;
      }
      Frame f;
      f.kind = b.opcode == Opcode::control_forever ? Frame::Kind::Forever : Frame::Kind::Until;
      f.owner_block = b.id;
      auto sub = b.inputs.find("SUBSTACK");
      f.body_head = sub != b.inputs.end() && sub->second.kind == InputValue::Kind::BlockRef
                        ? sub->second.id
                        : "";
      f.after = b.next;
      f.warp = !th.frames.empty() && th.frames.back().warp;
      th.frames.push_back(std::move(f));
      th.current = th.frames.back().body_head.empty()
                       ? std::optional<std::string>{}
                       : std::optional<std::string>{th.frames.back().body_head};
      return;
    }
    case Opcode::control_if:
    case Opcode::control_if_else: {
      bool cond = eval_condition(b, "CONDITION");
      const char* slot = cond ? "SUBSTACK" : (b.opcode == Opcode::control_if_else ? "SUBSTACK2" : nullptr);
      std::string head;
      if (slot != nullptr) {
        auto sub = b.inputs.find(slot);
        if (sub != b.inputs.end() && sub->second.kind == InputValue::Kind::BlockRef) {
          head = sub->second.id;
        }
      }
      if (head.empty()) {
        advance();
        return;
      }
      Frame f;
      f.kind = Frame::Kind::Once;
      f.owner_block = b.id;
      f.after = b.next;
      f.warp = !th.frames.empty() && th.frames.back().warp;
      th.frames.push_back(std::move(f));
      th.current = head;
      return;
    }
    case Opcode::control_stop: {
      auto f = b.fields.find("STOP_OPTION");
      std::string what = f == b.fields.end() ? "all" : f->second.value.to_display_string();
      if (what == "all") {
        for (auto& other : threads_) {
          if (!other->done) finish_thread(*other);
        }
        return;
      }
      if (what == "other scripts in sprite") {
        for (auto& other : threads_) {
          if (!other->done && other.get() != &th && other->instance_id == th.instance_id) {
            finish_thread(*other);
          }
        }
        advance();
        return;
      }
      finish_thread(th);  // "this script"
      return;
    }
    case Opcode::control_create_clone_of: {
      std::string who = eval_input(b, "CLONE_OPTION", Scalar("_myself_")).to_display_string();
      const Instance* source = nullptr;
      if (who == "_myself_") {
        source = &self;
      } else {
        const Target* ot = project_.find_target_by_name(who);
        if (ot != nullptr && !ot->is_stage) {
          for (size_t i = 0; i < project_.targets.size(); ++i) {
            if (&project_.targets[i] == ot) source = original_instance(static_cast<int>(i));
          }
        }
      }
      if (source != nullptr && live_clone_count() < kCloneCap) {
        auto clone = std::make_unique<Instance>(*source);
        clone->original = false;
        clone->creation_seq = clone_seq_++;
        uint64_t cid = next_instance_id_++;
        int target_index = clone->target_index;
        instances_.emplace(cid, std::move(clone));
        const Target& def = project_.targets[target_index];
        for (const auto& [bid, hb] : def.blocks) {
          if (hb.opcode == Opcode::control_start_as_clone && hb.top_level) {
            start_script(cid, bid);
          }
        }
      }
      advance();
      return;
    }
    case Opcode::control_delete_this_clone: {
      if (self.original) {
        finish_thread(th);  // cap block on the original: just ends the script
        return;
      }
      delete_instance(th.instance_id);  // also finishes this thread
      return;
    }
    case Opcode::procedures_call: {
      std::string proccode = b.mutation ? b.mutation->proccode : "";
      const Block* def = nullptr;
      for (const auto& [bid, cand] : t.blocks) {
        if (cand.opcode == Opcode::procedures_definition && cand.top_level && cand.mutation &&
            cand.mutation->proccode == proccode) {
          def = &cand;
          break;
        }
      }
      if (def == nullptr) {
        advance();  // calling an unknown procedure is a no-op
        return;
      }
      int depth = 0;
      for (const auto& fr : th.frames) {
        if (fr.kind == Frame::Kind::Proc) ++depth;
      }
      if (depth + 1 > kMaxCallDepth) throw RecursionCrash{};
      Frame f;
      f.kind = Frame::Kind::Proc;
      f.owner_block = b.id;
      f.after = b.next;
      f.warp = (def->mutation && def->mutation->warp) || (!th.frames.empty() && th.frames.back().warp);
      for (const auto& [name, iv] : b.inputs) f.args.emplace(name, eval_value(iv));
      th.frames.push_back(std::move(f));
      th.current = def->next;
      return;
    }
    case Opcode::procedures_definition:
    case Opcode::event_whenflagclicked:
    case Opcode::event_whenkeypressed:
    case Opcode::event_whenthisspriteclicked:
    case Opcode::event_whenbroadcastreceived:
    case Opcode::control_start_as_clone:
      advance();  // hats mid-chain are inert
      return;
    default:
      advance();  // reporters mid-chain are inert
      return;
  }
}

void Vm::step_thread(Thread& th) {
  active_ = &th;
  steps_ = 0;

  switch (th.wait) {
    case Thread::Wait::Ticks:
      if (now_ < th.wake_tick) return;
      th.wait = Thread::Wait::None;
      break;
    case Thread::Wait::Until: {
      const Block& b = block(th.wait_cond_block);
      if (!eval_condition(b, "CONDITION")) return;
      th.wait = Thread::Wait::None;
      th.current = th.wait_resume;
      break;
    }
    case Thread::Wait::Threads: {
      for (uint64_t id : th.wait_children) {
        for (const auto& other : threads_) {
          if (other->id == id && !other->done) return;
        }
      }
      th.wait = Thread::Wait::None;
      th.wait_children.clear();
      break;
    }
    case Thread::Wait::None:
      break;
  }

  while (true) {
    if (++steps_ > kStepQuotaPerTick) throw RunawayCrash{};
    if (th.done || th.wait != Thread::Wait::None) return;
    if (!th.current) {
      if (th.frames.empty()) {
        finish_thread(th);
        return;
      }
      Frame& f = th.frames.back();
      switch (f.kind) {
        case Frame::Kind::Once:
        case Frame::Kind::Proc: {
          std::optional<std::string> after = f.after;
          th.frames.pop_back();
          th.current = after;
          break;
        }
        case Frame::Kind::Repeat: {
          if (--f.remaining <= 0) {
            std::optional<std::string> after = f.after;
            th.frames.pop_back();
            th.current = after;
            break;
          }
          th.current = f.body_head.empty() ? std::optional<std::string>{}
                                           : std::optional<std::string>{f.body_head};
          if (!f.warp) return;  // loop-iteration boundary yield
          break;
        }
        case Frame::Kind::Forever: {
          th.current = f.body_head.empty() ? std::optional<std::string>{}
                                           : std::optional<std::string>{f.body_head};
          if (!f.warp) return;
          break;
        }
        case Frame::Kind::Until: {
          const Block& owner = block(f.owner_block);
          if (eval_condition(owner, "CONDITION")) {
            std::optional<std::string> after = f.after;
            th.frames.pop_back();
            th.current = after;
            break;
          }
          th.current = f.body_head.empty() ? std::optional<std::string>{}
                                           : std::optional<std::string>{f.body_head};
          if (!f.warp) return;
          break;
        }
      }
      continue;
    }
    const Block& b = block(*th.current);
    execute_statement(th, b);
    if (th.wait != Thread::Wait::None) return;
  }
}

void Vm::step_tick() {
  for (auto& th : threads_) th->stepped_this_tick = false;
  while (true) {
    Thread* pick = nullptr;
    std::tuple<int, int, uint64_t, std::string> best_key;
    for (auto& th : threads_) {
      if (th->done || th->stepped_this_tick) continue;
      const Instance& ins = inst(th->instance_id);
      auto [a, bo, c] = ins.order_key();
      std::tuple<int, int, uint64_t, std::string> key{a, bo, c, th->top_block};
      if (pick == nullptr || key < best_key) {
        pick = th.get();
        best_key = key;
      }
    }
    if (pick == nullptr) break;
    pick->stepped_this_tick = true;
    step_thread(*pick);
  }
  // Sweep dead clones and finished threads so long runs stay lean.
  for (auto it = instances_.begin(); it != instances_.end();) {
    it = it->second->alive ? std::next(it) : instances_.erase(it);
  }
  for (auto it = threads_.begin(); it != threads_.end();) {
    if ((*it)->done && !instances_.count((*it)->instance_id)) {
      thread_index_.erase({(*it)->instance_id, (*it)->top_block});
      it = threads_.erase(it);
    } else {
      ++it;
    }
  }
}

SignalSnapshot Vm::snapshot() {
  SignalSnapshot s;
  for (size_t i = 0; i < project_.targets.size(); ++i) {
    const Target& t = project_.targets[i];
    TargetSnapshot ts;
    // Originals persist for the whole run; snapshot their state.
    Instance* ins = nullptr;
    for (auto& [id, ip] : instances_) {
      if (ip->alive && ip->original && ip->target_index == static_cast<int>(i)) ins = ip.get();
    }
    if (ins != nullptr) {
      ts.variables = ins->variables;
      for (const auto& [lid, items] : ins->lists) {
        jio::json arr = jio::json::array();
        for (const auto& v : items) arr.push_back(jio::scalar_to_json(v));
        ts.lists.emplace(lid, std::make_pair(static_cast<int64_t>(items.size()),
                                             digest_hex(jio::canon(arr))));
      }
      if (!t.is_stage) {
        ts.x = ins->x;
        ts.y = ins->y;
        ts.direction = ins->direction;
        ts.size = ins->size;
        ts.costume = ins->costume;
        ts.visible = ins->visible;
        int clones = 0;
        for (const auto& [id, ip] : instances_) {
          if (ip->alive && !ip->original && ip->target_index == static_cast<int>(i)) ++clones;
        }
        ts.clone_count = clones;
      }
    }
    s.targets.emplace_back(t.id, std::move(ts));
  }
  s.backdrop = stage_instance_->costume;
  std::set<std::string> fired;
  for (size_t i = last_checkpoint_events_; i < trace_.events_log.size(); ++i) {
    fired.insert(trace_.events_log[i].second);
  }
  s.broadcasts.assign(fired.begin(), fired.end());
  return s;
}

void Vm::take_checkpoint(int tick) {
  trace_.checkpoints.push_back({tick, snapshot()});
  last_checkpoint_events_ = static_cast<int>(trace_.events_log.size());
}

Trace Vm::execute() {
  scenario_.check();
  spawn_originals();

  const int interval = scenario_.checkpoint_interval;
  const int budget = scenario_.tick_budget;
  size_t next_event = 0;

  for (now_ = 0; now_ <= budget; ++now_) {
    bool crashed = false;
    try {
      while (next_event < scenario_.events.size() &&
             scenario_.events[next_event].first == now_) {
        deliver(scenario_.events[next_event].second);
        ++next_event;
      }
      step_tick();
    } catch (const RunawayCrash&) {
      trace_.crash_reason = "runaway";
      crashed = true;
    } catch (const RecursionCrash&) {
      trace_.crash_reason = "recursion";
      crashed = true;
    }

    if (crashed) {
      take_checkpoint(now_);
      return std::move(trace_);
    }
    if (now_ % interval == 0) take_checkpoint(now_);

    bool any_thread = false;
    for (const auto& th : threads_) {
      if (!th->done) any_thread = true;
    }
    if (!any_thread && next_event >= scenario_.events.size()) {
      // Idle: nothing can change state anymore. Emit the remaining
      // checkpoints with the frozen snapshot and finish.
      for (int t = (now_ / interval + 1) * interval; t <= budget; t += interval) {
        take_checkpoint(t);
      }
      if (budget % interval != 0) take_checkpoint(budget);
      return std::move(trace_);
    }
  }
  if (budget % interval != 0) take_checkpoint(budget);
  return std::move(trace_);
}

}  // namespace

Trace run(const ProjectIR& project, const Scenario& scenario, uint64_t seed) {
  Vm vm(project, scenario, seed);
  return vm.execute();
}

std::vector<Trace> run_reruns(const ProjectIR& project, const Scenario& scenario, int reruns) {
  if (reruns < 1) throw Error(ErrorKind::Internal, "reruns must be >= 1");
  std::vector<Trace> out;
  out.reserve(static_cast<size_t>(reruns));
  for (int r = 1; r <= reruns; ++r) {
    out.push_back(run(project, scenario, scenario.seed_for_rerun(r)));
  }
  return out;
}

}  // namespace sbforge
