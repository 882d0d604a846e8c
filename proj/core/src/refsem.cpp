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

#include "sbforge/refsem.hpp"

#include "json_io.hpp"
#include "sbforge/trigger.hpp"

namespace sbforge {

using jio::json;

std::string ReferenceSemantics::to_json() const {
  json j;
  j["project_goal"] = project_goal;
  json roles_j = json::array();
  for (const auto& [id, text] : roles) {
    roles_j.push_back(json{{"sprite_id", id}, {"role", text}});
  }
  j["roles"] = std::move(roles_j);
  json hooks_j = json::array();
  for (const auto& h : hooks) {
    json hj;
    hj["trigger"] = h.trigger;
    hj["sprites"] = h.sprite_ids;
    json outs = json::array();
    for (const auto& f : h.outcomes) outs.push_back(jio::parse_or_throw(f.to_json(), "feature"));
    hj["outcomes"] = std::move(outs);
    hooks_j.push_back(std::move(hj));
  }
  j["hooks"] = std::move(hooks_j);
  j["state_signals"] = state_signals;
  return jio::canon(j);
}

ReferenceSemantics ReferenceSemantics::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "reference semantics");
  ReferenceSemantics r;
  r.project_goal = j.value("project_goal", "");
  if (auto it = j.find("roles"); it != j.end()) {
    for (const auto& rj : *it) {
      r.roles.emplace_back(rj.value("sprite_id", ""), rj.value("role", ""));
    }
  }
  if (auto it = j.find("hooks"); it != j.end()) {
    for (const auto& hj : *it) {
      RefsemHook h;
      h.trigger = hj.value("trigger", "");
      if (auto s = hj.find("sprites"); s != hj.end()) {
        for (const auto& id : *s) h.sprite_ids.push_back(id.get<std::string>());
      }
      if (auto o = hj.find("outcomes"); o != hj.end()) {
        for (const auto& f : *o) h.outcomes.push_back(Feature::from_json(jio::canon(f)));
      }
      r.hooks.push_back(std::move(h));
    }
  }
  if (auto it = j.find("state_signals"); it != j.end()) {
    for (const auto& s : *it) r.state_signals.push_back(s.get<std::string>());
  }
  return r;
}

namespace {

bool signal_exists(const std::string& text, const ProjectIR& p) {
  auto ref = SignalRef::parse(text);
  if (!ref) return false;
  if (ref->kind == SignalRef::Kind::Backdrop) return true;
  const Target* t = p.find_target(ref->target_id);
  if (t == nullptr) return false;
  switch (ref->kind) {
    case SignalRef::Kind::Var:
      return p.resolve_variable(*t, ref->id) != nullptr;
    case SignalRef::Kind::List:
      return p.resolve_list(*t, ref->id) != nullptr;
    default:
      return !t->is_stage;  // pose signals exist on every sprite
  }
}

bool feature_signals_exist(const Feature& f, const ProjectIR& p) {
  switch (f.kind) {
    case Feature::Kind::BroadcastOccurred:
    case Feature::Kind::BroadcastAbsent:
      return p.broadcast_id_for_name(f.message).has_value();
    default:
      return signal_exists(f.signal.to_string(), p);
  }
}

}  // namespace

std::vector<RefsemViolation> validate_reference_semantics(const ReferenceSemantics& r,
                                                          const ProjectIR& p) {
  std::vector<RefsemViolation> out;
  for (const auto& h : r.hooks) {
    auto token = TriggerToken::parse(h.trigger);
    if (!token || !trigger_resolvable(*token, p)) {
      out.push_back({RefsemViolation::Kind::UnresolvableTrigger, h.trigger});
    }
    for (const auto& id : h.sprite_ids) {
      if (p.find_target(id) == nullptr) {
        out.push_back({RefsemViolation::Kind::UnknownSprite, id});
      }
    }
    for (const auto& f : h.outcomes) {
      if (!feature_signals_exist(f, p)) {
        out.push_back({RefsemViolation::Kind::UnknownSignal, f.to_json()});
      }
    }
  }
  for (const auto& [id, role] : r.roles) {
    if (p.find_target(id) == nullptr) {
      out.push_back({RefsemViolation::Kind::UnknownSprite, id});
    }
  }
  for (const auto& s : r.state_signals) {
    if (!signal_exists(s, p)) {
      out.push_back({RefsemViolation::Kind::UnknownSignal, s});
    }
  }
  return out;
}

}  // namespace sbforge
