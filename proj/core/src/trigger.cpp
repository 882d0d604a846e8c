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

#include "sbforge/trigger.hpp"

#include <algorithm>
#include <cctype>

namespace sbforge {

namespace {

std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string TriggerToken::to_string() const {
  switch (kind) {
    case Kind::GreenFlag: return "green_flag";
    case Kind::Key: return "key:" + param;
    case Kind::Click: return "click:" + param;
    case Kind::Broadcast: return "broadcast:" + param;
    case Kind::CloneStart: return "clone_start";
  }
  return "?";
}

std::optional<TriggerToken> TriggerToken::parse(std::string_view text) {
  std::string t = fold(text);
  if (t == "green_flag") return TriggerToken{Kind::GreenFlag, ""};
  if (t == "clone_start") return TriggerToken{Kind::CloneStart, ""};
  auto prefixed = [&](std::string_view prefix, Kind k) -> std::optional<TriggerToken> {
    if (t.rfind(prefix, 0) == 0 && t.size() > prefix.size()) {
      return TriggerToken{k, t.substr(prefix.size())};
    }
    return std::nullopt;
  };
  if (auto r = prefixed("key:", Kind::Key)) return r;
  if (auto r = prefixed("click:", Kind::Click)) return r;
  if (auto r = prefixed("broadcast:", Kind::Broadcast)) return r;
  return std::nullopt;
}

bool trigger_resolvable(const TriggerToken& token, const ProjectIR& p) {
  for (const auto& t : p.targets) {
    for (const auto& [id, b] : t.blocks) {
      if (!b.top_level) continue;
      switch (token.kind) {
        case TriggerToken::Kind::GreenFlag:
          if (b.opcode == Opcode::event_whenflagclicked) return true;
          break;
        case TriggerToken::Kind::CloneStart:
          if (b.opcode == Opcode::control_start_as_clone) return true;
          break;
        case TriggerToken::Kind::Key:
          if (b.opcode == Opcode::event_whenkeypressed) {
            auto f = b.fields.find("KEY_OPTION");
            std::string key = f == b.fields.end() ? "" : fold(f->second.value.to_display_string());
            if (key == token.param || key == "any") return true;
          }
          break;
        case TriggerToken::Kind::Click:
          if (b.opcode == Opcode::event_whenthisspriteclicked && fold(t.name) == token.param) {
            return true;
          }
          break;
        case TriggerToken::Kind::Broadcast:
          if (b.opcode == Opcode::event_whenbroadcastreceived) {
            auto f = b.fields.find("BROADCAST_OPTION");
            if (f != b.fields.end() && fold(f->second.value.to_display_string()) == token.param) {
              return true;
            }
          }
          break;
      }
    }
  }
  return false;
}

}  // namespace sbforge
