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

#include "sbforge/forge.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/trigger.hpp"
#include "sbforge/vm.hpp"

namespace sbforge {

using jio::json;

namespace {

std::string fold(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr BugPatternTag kCatalog[] = {
    BugPatternTag::MissingInit,        BugPatternTag::DesyncMissingWait,
    BugPatternTag::UntriggeredEvent,   BugPatternTag::NonterminatingLoop,
    BugPatternTag::IncorrectConditional, BugPatternTag::SpriteStateMismatch,
    BugPatternTag::CloneMgmtError,     BugPatternTag::HandlerConflict,
};

constexpr const char* kPatternNames[] = {
    "missing_init",       "desync_missing_wait",  "untriggered_event",   "nonterminating_loop",
    "incorrect_conditional", "sprite_state_mismatch", "clone_mgmt_error", "handler_conflict",
};

}  // namespace

const std::vector<BugPatternTag>& pattern_catalog() {
  static const std::vector<BugPatternTag> all(std::begin(kCatalog), std::end(kCatalog));
  return all;
}

const char* pattern_name(BugPatternTag tag) { return kPatternNames[static_cast<int>(tag)]; }

std::optional<BugPatternTag> pattern_from_name(std::string_view name) {
  for (const auto tag : pattern_catalog()) {
    if (name == pattern_name(tag)) return tag;
  }
  return std::nullopt;
}

BugPatternTag select_pattern(const std::vector<BugPatternTag>& catalog,
                             const std::map<BugPatternTag, int>& coverage) {
  if (catalog.empty()) throw Error(ErrorKind::Internal, "empty pattern catalog");
  BugPatternTag best = catalog.front();
  int best_count = INT32_MAX;
  for (const auto tag : catalog) {
    auto it = coverage.find(tag);
    int count = it == coverage.end() ? 0 : it->second;
    if (count < best_count) {
      best = tag;
      best_count = count;
    }
  }
  return best;
}

namespace {

// ---- script analysis ----

struct ScriptInfo {
  std::string root;       // top-level block of the script
  bool hat_rooted = false;
  int length = 0;         // total blocks in the script (incl. reporters)
};

/// Walks up the derived parent links to the script root.
const Block* script_root(const Target& t, const Block& b) {
  const Block* cur = &b;
  int guard = 0;
  while (cur->parent && guard++ < 100000) {
    auto it = t.blocks.find(*cur->parent);
    if (it == t.blocks.end()) return cur;
    cur = &it->second;
  }
  return cur;
}

int subtree_size(const Target& t, const std::string& head) {
  int n = 0;
  std::vector<const Block*> stack;
  auto push = [&](const std::string& id) {
    auto it = t.blocks.find(id);
    if (it != t.blocks.end()) stack.push_back(&it->second);
  };
  push(head);
  while (!stack.empty()) {
    const Block* b = stack.back();
    stack.pop_back();
    ++n;
    if (b->next) push(*b->next);
    for (const auto& [name, iv] : b->inputs) {
      if (iv.kind == InputValue::Kind::BlockRef) push(iv.id);
    }
  }
  return n;
}

int downstream_writes(const Target& t, const Block& b) {
  int n = writes_observable(b.opcode) ? 1 : 0;
  if (b.next) {
    std::vector<const Block*> stack;
    auto push = [&](const std::string& id) {
      auto it = t.blocks.find(id);
      if (it != t.blocks.end()) stack.push_back(&it->second);
    };
    push(*b.next);
    while (!stack.empty()) {
      const Block* cur = stack.back();
      stack.pop_back();
      if (writes_observable(cur->opcode)) ++n;
      if (cur->next) push(*cur->next);
      for (const auto& [name, iv] : cur->inputs) {
        if (iv.kind == InputValue::Kind::BlockRef) push(iv.id);
      }
    }
  }
  return n;
}

Site make_site(const Target& t, const Block& b, BugPatternTag pattern, std::string variant) {
  Site s;
  s.pattern = pattern;
  s.target_id = t.id;
  s.block_id = b.id;
  s.variant = std::move(variant);
  const Block* root = script_root(t, b);
  s.hat_reachable = is_hat(root->opcode);
  s.downstream_writes = downstream_writes(t, b);
  s.script_length = subtree_size(t, root->id);
  return s;
}

/// True when b sits directly in a hat's statement chain (not nested).
bool directly_under_hat(const Target& t, const Block& b) {
  const Block* cur = &b;
  int guard = 0;
  while (cur->parent && guard++ < 100000) {
    auto it = t.blocks.find(*cur->parent);
    if (it == t.blocks.end()) return false;
    const Block& parent = it->second;
    if (!(parent.next && *parent.next == cur->id)) return false;  // input attachment
    cur = &parent;
  }
  return is_hat(cur->opcode);
}

bool under_hat_of(const Target& t, const Block& b, Opcode hat) {
  const Block* root = script_root(t, b);
  return root->opcode == hat;
}

bool literal_numeric(const InputValue& iv) {
  return iv.kind == InputValue::Kind::Literal &&
         (iv.literal.kind() == Scalar::Kind::Int || iv.literal.kind() == Scalar::Kind::Float);
}

int receivers_of_message(const ProjectIR& p, const std::string& message) {
  int n = 0;
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      if (b.opcode != Opcode::event_whenbroadcastreceived || !b.top_level) continue;
      auto f = b.fields.find("BROADCAST_OPTION");
      if (f != b.fields.end() && f->second.value.to_display_string() == message) ++n;
    }
  }
  return n;
}

std::string broadcast_input_message(const Block& b) {
  auto in = b.inputs.find("BROADCAST_INPUT");
  if (in == b.inputs.end()) return "";
  if (in->second.kind == InputValue::Kind::BroadcastRef) return in->second.name;
  if (in->second.kind == InputValue::Kind::Literal) {
    return in->second.literal.to_display_string();
  }
  return "";
}

bool in_condition_slot(const Target& t, const Block& b) {
  if (!b.parent) return false;
  auto it = t.blocks.find(*b.parent);
  if (it == t.blocks.end()) return false;
  auto slot = it->second.inputs.find("CONDITION");
  return slot != it->second.inputs.end() && slot->second.kind == InputValue::Kind::BlockRef &&
         slot->second.id == b.id;
}

// ---- edit constructors ----

AtomicEdit remove_edit(const Target& t, const Block& b) {
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Remove;
  e.sprite_id = t.id;
  e.block_id = b.id;
  e.content = BlockContent::of(b);
  e.next = b.next;
  if (!b.parent) {
    e.slot = AtomicEdit::Slot::Top;
    return e;
  }
  const Block& parent = t.blocks.at(*b.parent);
  e.parent = *b.parent;
  if (parent.next && *parent.next == b.id) {
    e.slot = AtomicEdit::Slot::Next;
    return e;
  }
  for (const auto& [name, iv] : parent.inputs) {
    if (iv.kind == InputValue::Kind::BlockRef && iv.id == b.id) {
      e.slot = AtomicEdit::Slot::Input;
      e.input_name = name;
      return e;
    }
  }
  e.slot = AtomicEdit::Slot::Detached;
  return e;
}

AtomicEdit modify_opcode(const Target& t, const Block& b, Opcode to) {
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Modify;
  e.sprite_id = t.id;
  e.block_id = b.id;
  e.path = "opcode";
  EditValue old_v, new_v;
  old_v.opcode_name = opcode_name(b.opcode);
  new_v.opcode_name = opcode_name(to);
  e.old_value = old_v;
  e.new_value = new_v;
  return e;
}

AtomicEdit modify_input(const Target& t, const Block& b, const std::string& name,
                        std::optional<InputValue> to) {
  AtomicEdit e;
  e.kind = AtomicEdit::Kind::Modify;
  e.sprite_id = t.id;
  e.block_id = b.id;
  e.path = "input:" + name;
  EditValue old_v, new_v;
  auto it = b.inputs.find(name);
  if (it != b.inputs.end()) old_v.input = it->second;
  new_v.input = std::move(to);
  e.old_value = old_v;
  e.new_value = new_v;
  return e;
}

std::string fresh_suffix_id(const ProjectIR& p, const std::string& base) {
  std::string id = base;
  int n = 2;
  while (p.owner_of_block(id) != nullptr) id = base + std::to_string(n++);
  return id;
}

std::string fresh_message_name(const ProjectIR& p, const std::string& base) {
  std::set<std::string> used;
  for (const auto& [id, name] : p.broadcasts) used.insert(name);
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      if (b.opcode == Opcode::event_broadcast || b.opcode == Opcode::event_broadcastandwait) {
        used.insert(broadcast_input_message(b));
      }
    }
  }
  std::string name = base + "__x";
  int n = 2;
  while (used.count(name)) name = base + "__x" + std::to_string(n++);
  return name;
}

/// Duplicates a whole (small) script with fresh ids: hat as a top add,
/// statements chained with next-slot adds, reporters/substacks re-attached
/// with input-slot adds. Emission order keeps every add's declared next
/// equal to the parent's next at application time (null: pure append).
void emit_duplicate_script(const ProjectIR& p, const Target& t, const Block& hat,
                           std::vector<AtomicEdit>* edits) {
  std::map<std::string, std::string> fresh;
  std::vector<const Block*> order;
  std::vector<const Block*> stack{&hat};
  while (!stack.empty()) {
    const Block* b = stack.back();
    stack.pop_back();
    order.push_back(b);
    // inputs first (deterministic name order), then the chain
    for (auto it = b->inputs.rbegin(); it != b->inputs.rend(); ++it) {
      if (it->second.kind == InputValue::Kind::BlockRef) {
        stack.push_back(&t.blocks.at(it->second.id));
      }
    }
    if (b->next) stack.push_back(&t.blocks.at(*b->next));
  }
  for (const Block* b : order) fresh[b->id] = fresh_suffix_id(p, b->id + ".dup");

  for (const Block* b : order) {
    AtomicEdit e;
    e.kind = AtomicEdit::Kind::Add;
    e.sprite_id = t.id;
    e.block_id = fresh.at(b->id);
    e.content = BlockContent::of(*b);
    // Block refs are re-established by their own input-slot adds.
    for (auto it = e.content.inputs.begin(); it != e.content.inputs.end();) {
      it = it->second.kind == InputValue::Kind::BlockRef ? e.content.inputs.erase(it)
                                                         : std::next(it);
    }
    e.next = std::nullopt;
    if (b == &hat) {
      e.slot = AtomicEdit::Slot::Top;
    } else {
      const Block& parent = t.blocks.at(*b->parent);
      e.parent = fresh.at(parent.id);
      if (parent.next && *parent.next == b->id) {
        e.slot = AtomicEdit::Slot::Next;
      } else {
        e.slot = AtomicEdit::Slot::Input;
        for (const auto& [name, iv] : parent.inputs) {
          if (iv.kind == InputValue::Kind::BlockRef && iv.id == b->id) e.input_name = name;
        }
      }
    }
    edits->push_back(std::move(e));
  }
}

// ---- per-pattern site enumeration ----

void collect_sites(const ProjectIR& p, BugPatternTag pattern, std::vector<Site>* out) {
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      switch (pattern) {
        case BugPatternTag::MissingInit: {
          if (b.opcode != Opcode::data_setvariableto || !directly_under_hat(t, b)) break;
          out->push_back(make_site(t, b, pattern, "delete"));
          auto in = b.inputs.find("VALUE");
          if (in != b.inputs.end() && literal_numeric(in->second)) {
            out->push_back(make_site(t, b, pattern, "perturb"));
          }
          break;
        }
        case BugPatternTag::DesyncMissingWait: {
          if (b.opcode == Opcode::event_broadcastandwait) {
            out->push_back(make_site(t, b, pattern, "to_plain"));
          }
          if (b.opcode == Opcode::control_wait) {
            auto in = b.inputs.find("DURATION");
            if (in != b.inputs.end() && literal_numeric(in->second) &&
                in->second.literal.to_number() <= 1.0) {
              out->push_back(make_site(t, b, pattern, "drop_wait"));
            }
          }
          break;
        }
        case BugPatternTag::UntriggeredEvent: {
          if (b.opcode != Opcode::event_broadcast && b.opcode != Opcode::event_broadcastandwait) {
            break;
          }
          std::string msg = broadcast_input_message(b);
          if (!msg.empty() && receivers_of_message(p, msg) > 0) {
            out->push_back(make_site(t, b, pattern, "rename_message"));
          }
          break;
        }
        case BugPatternTag::NonterminatingLoop: {
          if (b.opcode == Opcode::control_repeat_until) {
            auto c = b.inputs.find("CONDITION");
            if (c != b.inputs.end() && c->second.kind == InputValue::Kind::BlockRef) {
              out->push_back(make_site(t, b, pattern, "not_wrap"));
            }
          }
          if (b.opcode == Opcode::control_repeat) {
            auto n = b.inputs.find("TIMES");
            if (n != b.inputs.end() && literal_numeric(n->second)) {
              out->push_back(make_site(t, b, pattern, "inflate"));
            }
          }
          break;
        }
        case BugPatternTag::IncorrectConditional: {
          bool comparator = b.opcode == Opcode::operator_lt || b.opcode == Opcode::operator_gt ||
                            b.opcode == Opcode::operator_equals;
          if (!comparator || !in_condition_slot(t, b)) break;
          out->push_back(make_site(t, b, pattern, "flip"));
          if (b.opcode != Opcode::operator_equals) {
            auto a = b.inputs.find("OPERAND1");
            auto c = b.inputs.find("OPERAND2");
            if (a != b.inputs.end() && c != b.inputs.end() && !(a->second == c->second)) {
              out->push_back(make_site(t, b, pattern, "swap"));
            }
          }
          break;
        }
        case BugPatternTag::SpriteStateMismatch: {
          if (b.opcode == Opcode::looks_show || b.opcode == Opcode::looks_hide) {
            if (b.parent) out->push_back(make_site(t, b, pattern, "delete_look"));
          }
          if (b.opcode == Opcode::looks_switchcostumeto && t.costumes.size() >= 2) {
            auto in = b.inputs.find("COSTUME");
            if (in != b.inputs.end() && in->second.kind == InputValue::Kind::Literal) {
              out->push_back(make_site(t, b, pattern, "retarget_costume"));
            }
          }
          break;
        }
        case BugPatternTag::CloneMgmtError: {
          if (b.opcode == Opcode::control_delete_this_clone) {
            out->push_back(make_site(t, b, pattern, "drop_delete"));
          }
          bool init_like = b.opcode == Opcode::data_setvariableto ||
                           b.opcode == Opcode::looks_show || b.opcode == Opcode::looks_hide ||
                           b.opcode == Opcode::motion_gotoxy;
          if (init_like && directly_under_hat(t, b) &&
              under_hat_of(t, b, Opcode::control_start_as_clone)) {
            out->push_back(make_site(t, b, pattern, "drop_clone_init"));
          }
          break;
        }
        case BugPatternTag::HandlerConflict: {
          if (b.opcode == Opcode::event_whenkeypressed && b.top_level &&
              subtree_size(t, b.id) <= 3) {
            out->push_back(make_site(t, b, pattern, "duplicate_script"));
          }
          break;
        }
      }
    }
  }
}

}  // namespace

std::vector<Site> eligible_sites(const ProjectIR& p, BugPatternTag pattern, SplitMix64& rng) {
  std::vector<Site> sites;
  collect_sites(p, pattern, &sites);
  // Stable id order first so rank ties shuffle deterministically.
  std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
    return std::tie(a.block_id, a.variant) < std::tie(b.block_id, b.variant);
  });
  struct Keyed {
    std::tuple<int, int, int> rank;
    uint64_t tie;
    size_t idx;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(sites.size());
  for (size_t i = 0; i < sites.size(); ++i) {
    const Site& s = sites[i];
    keyed.push_back({{s.hat_reachable ? 0 : 1, -s.downstream_writes, -s.script_length},
                     rng.next(), i});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return std::tie(a.rank, a.tie) < std::tie(b.rank, b.tie);
  });
  std::vector<Site> out;
  out.reserve(sites.size());
  for (const auto& k : keyed) out.push_back(sites[k.idx]);
  return out;
}

std::optional<Site> select_site(const ProjectIR& p, BugPatternTag pattern, SplitMix64& rng) {
  std::vector<Site> sites = eligible_sites(p, pattern, rng);
  if (sites.empty()) return std::nullopt;
  return sites.front();
}

std::pair<ProjectIR, Patch> apply_operator(const ProjectIR& p, BugPatternTag pattern,
                                           const Site& site) {
  const Target* t = p.find_target(site.target_id);
  if (t == nullptr) throw Error(ErrorKind::IneligibleSite, "no target " + site.target_id);
  auto bit = t->blocks.find(site.block_id);
  if (bit == t->blocks.end()) throw Error(ErrorKind::IneligibleSite, "no block " + site.block_id);
  const Block& b = bit->second;

  Patch fwd;
  fwd.source = Patch::Source::Forge;

  auto ineligible = [&]() {
    throw Error(ErrorKind::IneligibleSite,
                std::string(pattern_name(pattern)) + "/" + site.variant + " at " + site.block_id);
  };

  switch (pattern) {
    case BugPatternTag::MissingInit: {
      if (b.opcode != Opcode::data_setvariableto) ineligible();
      if (site.variant == "delete") {
        fwd.edits.push_back(remove_edit(*t, b));
      } else if (site.variant == "perturb") {
        auto in = b.inputs.find("VALUE");
        if (in == b.inputs.end() || !literal_numeric(in->second)) ineligible();
        Scalar old_lit = in->second.literal;
        Scalar wrong = old_lit.kind() == Scalar::Kind::Int
                           ? Scalar(old_lit.as_int_raw() + 7)
                           : Scalar(old_lit.as_float_raw() + 7.0);
        fwd.edits.push_back(modify_input(*t, b, "VALUE", InputValue::lit(wrong)));
      } else {
        ineligible();
      }
      break;
    }
    case BugPatternTag::DesyncMissingWait: {
      if (site.variant == "to_plain" && b.opcode == Opcode::event_broadcastandwait) {
        fwd.edits.push_back(modify_opcode(*t, b, Opcode::event_broadcast));
      } else if (site.variant == "drop_wait" && b.opcode == Opcode::control_wait) {
        fwd.edits.push_back(remove_edit(*t, b));
      } else {
        ineligible();
      }
      break;
    }
    case BugPatternTag::UntriggeredEvent: {
      std::string msg = broadcast_input_message(b);
      if (msg.empty()) ineligible();
      fwd.edits.push_back(
          modify_input(*t, b, "BROADCAST_INPUT", InputValue::lit(Scalar(fresh_message_name(p, msg)))));
      break;
    }
    case BugPatternTag::NonterminatingLoop: {
      if (site.variant == "not_wrap" && b.opcode == Opcode::control_repeat_until) {
        auto c = b.inputs.find("CONDITION");
        if (c == b.inputs.end() || c->second.kind != InputValue::Kind::BlockRef) {
          ineligible();
        }
        std::string cond_id = c->second.id;
        std::string not_id = fresh_suffix_id(p, b.id + ".not");
        AtomicEdit add;
        add.kind = AtomicEdit::Kind::Add;
        add.sprite_id = t->id;
        add.block_id = not_id;
        add.content.opcode = Opcode::operator_not;
        add.content.inputs.emplace("OPERAND", InputValue::block(cond_id));
        add.slot = AtomicEdit::Slot::Detached;
        fwd.edits.push_back(std::move(add));
        fwd.edits.push_back(modify_input(*t, b, "CONDITION", InputValue::block(not_id)));
      } else if (site.variant == "inflate" && b.opcode == Opcode::control_repeat) {
        auto n = b.inputs.find("TIMES");
        if (n == b.inputs.end() || !literal_numeric(n->second)) ineligible();
        Scalar old_lit = n->second.literal;
        Scalar inflated = old_lit.kind() == Scalar::Kind::Int
                              ? Scalar(old_lit.as_int_raw() + 1000)
                              : Scalar(old_lit.as_float_raw() + 1000.0);
        fwd.edits.push_back(modify_input(*t, b, "TIMES", InputValue::lit(inflated)));
      } else {
        ineligible();
      }
      break;
    }
    case BugPatternTag::IncorrectConditional: {
      if (site.variant == "flip") {
        Opcode to = b.opcode == Opcode::operator_lt ? Opcode::operator_gt : Opcode::operator_lt;
        if (b.opcode == Opcode::operator_equals) to = Opcode::operator_gt;
        fwd.edits.push_back(modify_opcode(*t, b, to));
      } else if (site.variant == "swap") {
        auto a = b.inputs.find("OPERAND1");
        auto c = b.inputs.find("OPERAND2");
        if (a == b.inputs.end() || c == b.inputs.end()) ineligible();
        fwd.edits.push_back(modify_input(*t, b, "OPERAND1", c->second));
        fwd.edits.push_back(modify_input(*t, b, "OPERAND2", a->second));
      } else {
        ineligible();
      }
      break;
    }
    case BugPatternTag::SpriteStateMismatch: {
      if (site.variant == "delete_look") {
        fwd.edits.push_back(remove_edit(*t, b));
      } else if (site.variant == "retarget_costume") {
        auto in = b.inputs.find("COSTUME");
        if (in == b.inputs.end() || in->second.kind != InputValue::Kind::Literal ||
            t->costumes.size() < 2) {
          ineligible();
        }
        // Resolve what the literal picks today, then point one past it.
        const Scalar& v = in->second.literal;
        int count = static_cast<int>(t->costumes.size());
        int picked = 0;
        bool found = false;
        if (v.kind() == Scalar::Kind::Str) {
          for (int i = 0; i < count; ++i) {
            if (t->costumes[i].name == v.as_str_raw()) {
              picked = i;
              found = true;
            }
          }
        }
        if (!found && v.is_numeric_like()) {
          int64_t n = static_cast<int64_t>(v.to_number());
          picked = static_cast<int>(((n - 1) % count + count) % count);
        }
        std::string wrong = t->costumes[(picked + 1) % count].name;
        fwd.edits.push_back(modify_input(*t, b, "COSTUME", InputValue::lit(Scalar(wrong))));
      } else {
        ineligible();
      }
      break;
    }
    case BugPatternTag::CloneMgmtError: {
      if (site.variant != "drop_delete" && site.variant != "drop_clone_init") ineligible();
      fwd.edits.push_back(remove_edit(*t, b));
      break;
    }
    case BugPatternTag::HandlerConflict: {
      if (b.opcode != Opcode::event_whenkeypressed || !b.top_level) ineligible();
      emit_duplicate_script(p, *t, b, &fwd.edits);
      break;
    }
  }

  ProjectIR buggy = apply_patch(p, fwd);
  return {std::move(buggy), std::move(fwd)};
}

Rational pass_rate(const ProjectIR& p, const TestSuite& suite, int reruns) {
  int passes = 0;
  for (int r = 1; r <= reruns; ++r) {
    bool all_hold = true;
    for (const Scenario& s : suite.scenarios) {
      Trace t = run(p, s, s.seed_for_rerun(r));
      for (const Assertion& a : suite.assertions) {
        if (a.scenario_id != s.id) continue;
        if (!evaluate_assertion(a, t)) {
          all_hold = false;
          break;
        }
      }
      if (!all_hold) break;
    }
    if (all_hold) ++passes;
  }
  return Rational{passes, reruns};
}

namespace {

// ---- bug spec / refsem emission ----

std::string display_name_of_signal(const ProjectIR& p, const SignalRef& ref) {
  const Target* t = ref.kind == SignalRef::Kind::Backdrop ? nullptr : p.find_target(ref.target_id);
  std::string tname = t != nullptr ? t->name : "the stage";
  switch (ref.kind) {
    case SignalRef::Kind::Var: {
      if (t != nullptr) {
        if (const VariableDecl* v = p.resolve_variable(*t, ref.id)) {
          return "variable '" + v->name + "'";
        }
      }
      return "a variable";
    }
    case SignalRef::Kind::List: {
      if (t != nullptr) {
        if (const ListDecl* l = p.resolve_list(*t, ref.id)) return "list '" + l->name + "'";
      }
      return "a list";
    }
    case SignalRef::Kind::X: return "the x position of " + tname;
    case SignalRef::Kind::Y: return "the y position of " + tname;
    case SignalRef::Kind::Direction: return "the direction of " + tname;
    case SignalRef::Kind::Size: return "the size of " + tname;
    case SignalRef::Kind::Costume: return "the costume of " + tname;
    case SignalRef::Kind::Visible: return "the visibility of " + tname;
    case SignalRef::Kind::CloneCount: return "the clone count of " + tname;
    case SignalRef::Kind::Backdrop: return "the backdrop";
  }
  return "a signal";
}

std::string render_outcome(const ProjectIR& p, const Feature& f) {
  switch (f.kind) {
    case Feature::Kind::BroadcastOccurred:
      return "the message '" + f.message + "' is broadcast";
    case Feature::Kind::BroadcastAbsent:
      return "the message '" + f.message + "' is never broadcast";
    case Feature::Kind::CheckpointEquals:
      return display_name_of_signal(p, f.signal) + " equals " + f.value.to_display_string() +
             " at tick " + std::to_string(f.tick);
    case Feature::Kind::ReachesThreshold:
      return display_name_of_signal(p, f.signal) + (f.cmp == Feature::Cmp::Ge ? " reaches " : " drops to ") +
             f.value.to_display_string();
    case Feature::Kind::FinalVisibility:
      return display_name_of_signal(p, f.signal) + " ends " +
             (f.value.to_bool() ? "shown" : "hidden");
    default:
      return display_name_of_signal(p, f.signal) + " ends at " + f.value.to_display_string();
  }
}

const char* symptom_flavor(BugPatternTag tag) {
  switch (tag) {
    case BugPatternTag::MissingInit:
      return "State carries over instead of starting fresh";
    case BugPatternTag::DesyncMissingWait:
      return "Actions run out of order";
    case BugPatternTag::UntriggeredEvent:
      return "Part of the project never reacts";
    case BugPatternTag::NonterminatingLoop:
      return "A phase never finishes";
    case BugPatternTag::IncorrectConditional:
      return "The wrong branch runs";
    case BugPatternTag::SpriteStateMismatch:
      return "A sprite looks wrong";
    case BugPatternTag::CloneMgmtError:
      return "Clones misbehave";
    case BugPatternTag::HandlerConflict:
      return "An input acts twice";
  }
  return "The project misbehaves";
}

TriggerToken trigger_for_block(const Target& t, const Block& b) {
  const Block* root = script_root(t, b);
  switch (root->opcode) {
    case Opcode::event_whenflagclicked:
      return {TriggerToken::Kind::GreenFlag, ""};
    case Opcode::event_whenkeypressed: {
      auto f = root->fields.find("KEY_OPTION");
      return {TriggerToken::Kind::Key,
              f == root->fields.end() ? "space" : fold(f->second.value.to_display_string())};
    }
    case Opcode::event_whenthisspriteclicked:
      return {TriggerToken::Kind::Click, fold(t.name)};
    case Opcode::event_whenbroadcastreceived: {
      auto f = root->fields.find("BROADCAST_OPTION");
      return {TriggerToken::Kind::Broadcast,
              f == root->fields.end() ? "" : fold(f->second.value.to_display_string())};
    }
    case Opcode::control_start_as_clone:
      return {TriggerToken::Kind::CloneStart, ""};
    default:
      return {TriggerToken::Kind::GreenFlag, ""};
  }
}

std::vector<TriggerToken> project_triggers(const ProjectIR& p) {
  std::vector<TriggerToken> out;
  std::set<std::string> seen;
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      if (!b.top_level || !is_hat(b.opcode) || b.opcode == Opcode::procedures_definition) continue;
      TriggerToken tok = trigger_for_block(t, b);
      if (seen.insert(tok.to_string()).second) out.push_back(tok);
    }
  }
  std::sort(out.begin(), out.end(), [](const TriggerToken& a, const TriggerToken& b) {
    return a.to_string() < b.to_string();
  });
  return out;
}

/// Scenario whose interaction exercises the trigger, if the suite has one.
std::optional<std::string> scenario_for_trigger(const TestSuite& suite, const TriggerToken& tok) {
  auto has = [&suite](const std::string& id) {
    for (const auto& s : suite.scenarios) {
      if (s.id == id) return true;
    }
    return false;
  };
  switch (tok.kind) {
    case TriggerToken::Kind::GreenFlag:
      if (has("idle")) return "idle";
      break;
    case TriggerToken::Kind::Key:
      for (const char* t : {"tap:", "hold:", "seq:"}) {
        std::string id = t + tok.param;
        if (has(id)) return id;
      }
      break;
    case TriggerToken::Kind::Broadcast:
      for (const auto& s : suite.scenarios) {
        if (s.id.rfind("inject:", 0) == 0 && fold(s.id.substr(7)) == tok.param) return s.id;
      }
      break;
    case TriggerToken::Kind::Click:
      for (const auto& s : suite.scenarios) {
        if (s.id.rfind("click:", 0) == 0) return s.id;
      }
      break;
    case TriggerToken::Kind::CloneStart:
      break;
  }
  return std::nullopt;
}

}  // namespace

ReferenceSemantics emit_reference_semantics(const ProjectIR& p, const TestSuite& suite) {
  ReferenceSemantics r;
  int hats = 0;
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      if (b.top_level && is_hat(b.opcode)) ++hats;
    }
  }
  r.project_goal = "Interactive block project with " +
                   std::to_string(static_cast<int>(p.targets.size()) - 1) + " sprites and " +
                   std::to_string(hats) + " event-driven scripts.";

  for (const auto& t : p.targets) {
    if (t.is_stage) continue;
    std::set<std::string> tokens;
    bool clones = false;
    for (const auto& [id, b] : t.blocks) {
      if (b.top_level && is_hat(b.opcode) && b.opcode != Opcode::procedures_definition) {
        tokens.insert(trigger_for_block(t, b).to_string());
      }
      if (b.opcode == Opcode::control_create_clone_of) clones = true;
    }
    std::string role = "sprite '" + t.name + "'";
    if (!tokens.empty()) {
      role += " responding to ";
      bool first = true;
      for (const auto& tok : tokens) {
        if (!first) role += ", ";
        role += tok;
        first = false;
      }
    }
    if (clones) role += "; spawns clones";
    r.roles.emplace_back(t.id, role);
  }

  for (const TriggerToken& tok : project_triggers(p)) {
    RefsemHook hook;
    hook.trigger = tok.to_string();
    for (const auto& t : p.targets) {
      for (const auto& [id, b] : t.blocks) {
        if (!b.top_level || !is_hat(b.opcode) || b.opcode == Opcode::procedures_definition) {
          continue;
        }
        if (trigger_for_block(t, b).to_string() == hook.trigger) {
          if (hook.sprite_ids.empty() || hook.sprite_ids.back() != t.id) {
            hook.sprite_ids.push_back(t.id);
          }
        }
      }
    }
    if (auto sid = scenario_for_trigger(suite, tok)) {
      for (const Assertion& a : suite.assertions) {
        if (a.scenario_id == *sid && hook.outcomes.size() < 2) hook.outcomes.push_back(a.feature);
      }
    }
    r.hooks.push_back(std::move(hook));
  }

  std::set<std::string> signals;
  for (const Assertion& a : suite.assertions) {
    switch (a.feature.kind) {
      case Feature::Kind::BroadcastOccurred:
      case Feature::Kind::BroadcastAbsent:
        break;
      default:
        signals.insert(a.feature.signal.to_string());
    }
  }
  r.state_signals.assign(signals.begin(), signals.end());
  return r;
}

std::string BugSpec::to_json() const {
  json j;
  json mf;
  mf["symptom"] = model_facing.symptom;
  mf["expected"] = model_facing.expected;
  mf["reproduce"] = model_facing.reproduce_scenario;
  j["model_facing"] = std::move(mf);
  json gt;
  gt["mechanism"] = pattern_name(ground_truth.mechanism);
  gt["target_id"] = ground_truth.target_id;
  gt["block_ids"] = ground_truth.block_ids;
  gt["trigger"] = ground_truth.trigger_token;
  gt["outcome"] = jio::parse_or_throw(ground_truth.outcome.to_json(), "outcome feature");
  gt["inverse_patch_digest"] = ground_truth.inverse_patch_digest;
  j["ground_truth"] = std::move(gt);
  j["config_digest"] = config_digest;
  return jio::canon(j);
}

BugSpec BugSpec::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "bug spec");
  BugSpec s;
  const json& mf = jio::member(j, "model_facing", "bug spec");
  s.model_facing.symptom = mf.value("symptom", "");
  s.model_facing.expected = mf.value("expected", "");
  s.model_facing.reproduce_scenario = mf.value("reproduce", "");
  const json& gt = jio::member(j, "ground_truth", "bug spec");
  auto tag = pattern_from_name(gt.value("mechanism", ""));
  if (!tag) throw Error(ErrorKind::MalformedJson, "unknown mechanism tag");
  s.ground_truth.mechanism = *tag;
  s.ground_truth.target_id = gt.value("target_id", "");
  if (auto it = gt.find("block_ids"); it != gt.end()) {
    for (const auto& b : *it) s.ground_truth.block_ids.push_back(b.get<std::string>());
  }
  s.ground_truth.trigger_token = gt.value("trigger", "");
  s.ground_truth.outcome = Feature::from_json(jio::canon(jio::member(gt, "outcome", "bug spec")));
  s.ground_truth.inverse_patch_digest = gt.value("inverse_patch_digest", "");
  s.config_digest = j.value("config_digest", "");
  return s;
}

ForgeResult forge(const ProjectIR& gold, const PipelineConfig& cfg,
                  const std::map<BugPatternTag, int>& coverage,
                  std::optional<BugPatternTag> pattern_override) {
  cfg.check();
  SplitMix64 site_rng = substream(cfg.seed, "site-select");

  std::vector<BugPatternTag> order;
  if (pattern_override) {
    order.push_back(*pattern_override);
  } else {
    order = pattern_catalog();
    std::stable_sort(order.begin(), order.end(), [&coverage](BugPatternTag a, BugPatternTag b) {
      auto count = [&coverage](BugPatternTag t) {
        auto it = coverage.find(t);
        return it == coverage.end() ? 0 : it->second;
      };
      return count(a) < count(b);
    });
  }

  InteractionMetadata meta = extract_metadata(gold);
  std::vector<Scenario> scenarios =
      instantiate(template_library(), meta, cfg.tick_budget, cfg.checkpoint_interval);

  int trials = 0;
  for (const BugPatternTag pattern : order) {
    std::vector<Site> sites = eligible_sites(gold, pattern, site_rng);
    for (const Site& site : sites) {
      if (trials >= cfg.max_trials) return {std::nullopt, trials};
      ++trials;

      ProjectIR buggy;
      Patch forward;
      try {
        std::tie(buggy, forward) = apply_operator(gold, pattern, site);
      } catch (const Error&) {
        continue;  // site raced out from under the variant; try the next
      }
      if (scenarios.empty()) continue;
      std::optional<TestSuite> suite = synthesize(gold, buggy, scenarios, cfg.synthesis());
      if (!suite) continue;

      Rational pg = pass_rate(gold, *suite, cfg.reruns);
      Rational pb = pass_rate(buggy, *suite, cfg.reruns);
      if (!(pg >= cfg.theta_pass) || !(pb <= cfg.theta_fail)) continue;

      BugInstance inst;
      inst.gold = gold;
      inst.buggy = std::move(buggy);
      inst.inverse = inverse_patch(forward);
      inst.forward = std::move(forward);
      inst.suite = std::move(*suite);
      inst.refsem = emit_reference_semantics(gold, inst.suite);

      const Target& t = *gold.find_target(site.target_id);
      const Block& b = t.blocks.at(site.block_id);
      BugSpec spec;
      spec.ground_truth.mechanism = pattern;
      spec.ground_truth.target_id = site.target_id;
      for (const auto& e : inst.forward.edits) spec.ground_truth.block_ids.push_back(e.block_id);
      spec.ground_truth.trigger_token = trigger_for_block(t, b).to_string();
      spec.ground_truth.outcome = inst.suite.assertions.front().feature;
      spec.ground_truth.inverse_patch_digest = digest_hex(patch_to_json(inst.inverse));
      spec.config_digest = cfg.digest();

      const Assertion& top = inst.suite.assertions.front();
      spec.model_facing.reproduce_scenario = top.scenario_id;
      spec.model_facing.symptom = std::string(symptom_flavor(pattern)) +
                                  ": after running interaction '" + top.scenario_id +
                                  "', it is no longer true that " +
                                  render_outcome(gold, top.feature) + ".";
      spec.model_facing.expected = "After interaction '" + top.scenario_id + "', " +
                                   render_outcome(gold, top.feature) + ".";
      inst.spec = std::move(spec);

      return {std::move(inst), trials};
    }
  }
  return {std::nullopt, trials};
}

}  // namespace sbforge
