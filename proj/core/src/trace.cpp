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

#include "sbforge/trace.hpp"

#include <sstream>

#include "json_io.hpp"
#include "sbforge/errors.hpp"

namespace sbforge {

using jio::json;

namespace {

const char* kind_prefix(SignalRef::Kind k) {
  switch (k) {
    case SignalRef::Kind::Var: return "var";
    case SignalRef::Kind::List: return "list";
    case SignalRef::Kind::X: return "x";
    case SignalRef::Kind::Y: return "y";
    case SignalRef::Kind::Direction: return "dir";
    case SignalRef::Kind::Size: return "size";
    case SignalRef::Kind::Costume: return "costume";
    case SignalRef::Kind::Visible: return "visible";
    case SignalRef::Kind::CloneCount: return "clones";
    case SignalRef::Kind::Backdrop: return "backdrop";
  }
  return "?";
}

}  // namespace

std::string SignalRef::to_string() const {
  if (kind == Kind::Backdrop) return "backdrop";
  std::string out = std::string(kind_prefix(kind)) + ":" + target_id;
  if (kind == Kind::Var || kind == Kind::List) out += ":" + id;
  return out;
}

std::optional<SignalRef> SignalRef::parse(std::string_view text) {
  if (text == "backdrop") return SignalRef{Kind::Backdrop, "", ""};
  size_t c1 = text.find(':');
  if (c1 == std::string_view::npos) return std::nullopt;
  std::string_view head = text.substr(0, c1);
  std::string_view rest = text.substr(c1 + 1);
  auto two_part = [&](Kind k) -> std::optional<SignalRef> {
    size_t c2 = rest.find(':');
    if (c2 == std::string_view::npos) return std::nullopt;
    return SignalRef{k, std::string(rest.substr(0, c2)), std::string(rest.substr(c2 + 1))};
  };
  if (head == "var") return two_part(Kind::Var);
  if (head == "list") return two_part(Kind::List);
  Kind k;
  if (head == "x") k = Kind::X;
  else if (head == "y") k = Kind::Y;
  else if (head == "dir") k = Kind::Direction;
  else if (head == "size") k = Kind::Size;
  else if (head == "costume") k = Kind::Costume;
  else if (head == "visible") k = Kind::Visible;
  else if (head == "clones") k = Kind::CloneCount;
  else return std::nullopt;
  if (rest.empty() || rest.find(':') != std::string_view::npos) return std::nullopt;
  return SignalRef{k, std::string(rest), ""};
}

bool SignalRef::operator<(const SignalRef& o) const {
  if (target_id != o.target_id) return target_id < o.target_id;
  if (kind != o.kind) return static_cast<int>(kind) < static_cast<int>(o.kind);
  return id < o.id;
}

std::optional<Scalar> signal_value(const SignalSnapshot& s, const SignalRef& ref) {
  if (ref.kind == SignalRef::Kind::Backdrop) return Scalar(int64_t{s.backdrop});
  const TargetSnapshot* t = nullptr;
  size_t index = 0;
  for (size_t i = 0; i < s.targets.size(); ++i) {
    if (s.targets[i].first == ref.target_id) {
      t = &s.targets[i].second;
      index = i;
      break;
    }
  }
  if (t == nullptr) return std::nullopt;
  const bool is_stage = index == 0;
  switch (ref.kind) {
    case SignalRef::Kind::Var: {
      auto it = t->variables.find(ref.id);
      if (it == t->variables.end()) return std::nullopt;
      return it->second;
    }
    case SignalRef::Kind::List: {
      auto it = t->lists.find(ref.id);
      if (it == t->lists.end()) return std::nullopt;
      return Scalar(std::to_string(it->second.first) + ":" + it->second.second);
    }
    case SignalRef::Kind::X:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(t->x));
    case SignalRef::Kind::Y:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(t->y));
    case SignalRef::Kind::Direction:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(t->direction));
    case SignalRef::Kind::Size:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(t->size));
    case SignalRef::Kind::Costume:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(int64_t{t->costume}));
    case SignalRef::Kind::Visible:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(t->visible));
    case SignalRef::Kind::CloneCount:
      return is_stage ? std::nullopt : std::optional<Scalar>(Scalar(int64_t{t->clone_count}));
    case SignalRef::Kind::Backdrop:
      break;
  }
  return std::nullopt;
}

std::vector<SignalRef> enumerate_signals(const SignalSnapshot& s) {
  std::vector<SignalRef> out;
  for (size_t i = 0; i < s.targets.size(); ++i) {
    const auto& [tid, t] = s.targets[i];
    for (const auto& [vid, v] : t.variables) out.push_back({SignalRef::Kind::Var, tid, vid});
    for (const auto& [lid, l] : t.lists) out.push_back({SignalRef::Kind::List, tid, lid});
    if (i != 0) {
      out.push_back({SignalRef::Kind::X, tid, ""});
      out.push_back({SignalRef::Kind::Y, tid, ""});
      out.push_back({SignalRef::Kind::Direction, tid, ""});
      out.push_back({SignalRef::Kind::Size, tid, ""});
      out.push_back({SignalRef::Kind::Costume, tid, ""});
      out.push_back({SignalRef::Kind::Visible, tid, ""});
      out.push_back({SignalRef::Kind::CloneCount, tid, ""});
    }
  }
  out.push_back({SignalRef::Kind::Backdrop, "", ""});
  return out;
}

bool signal_is_numeric(const SignalRef& ref) {
  switch (ref.kind) {
    case SignalRef::Kind::X:
    case SignalRef::Kind::Y:
    case SignalRef::Kind::Direction:
    case SignalRef::Kind::Size:
    case SignalRef::Kind::CloneCount:
      return true;
    default:
      return false;  // Var decided per value pair; rest categorical.
  }
}

namespace {

json snapshot_to_json(const SignalSnapshot& s) {
  json targets = json::array();
  for (size_t i = 0; i < s.targets.size(); ++i) {
    const auto& [tid, t] = s.targets[i];
    json tj;
    tj["id"] = tid;
    json vars = json::object();
    for (const auto& [vid, v] : t.variables) vars[vid] = jio::scalar_to_json(v);
    tj["vars"] = std::move(vars);
    json lists = json::object();
    for (const auto& [lid, l] : t.lists) {
      lists[lid] = json::array({l.first, l.second});
    }
    tj["lists"] = std::move(lists);
    if (i != 0) {
      tj["x"] = t.x;
      tj["y"] = t.y;
      tj["dir"] = t.direction;
      tj["size"] = t.size;
      tj["costume"] = t.costume;
      tj["visible"] = t.visible;
      tj["clones"] = t.clone_count;
    }
    targets.push_back(std::move(tj));
  }
  json j;
  j["targets"] = std::move(targets);
  j["backdrop"] = s.backdrop;
  j["broadcasts"] = s.broadcasts;
  return j;
}

SignalSnapshot snapshot_from_json(const json& j) {
  SignalSnapshot s;
  size_t i = 0;
  for (const auto& tj : jio::member(j, "targets", "checkpoint")) {
    TargetSnapshot t;
    for (auto& [vid, v] : jio::member(tj, "vars", "checkpoint target").items()) {
      t.variables.emplace(vid, jio::scalar_from_json(v));
    }
    for (auto& [lid, l] : jio::member(tj, "lists", "checkpoint target").items()) {
      t.lists.emplace(lid, std::make_pair(l[0].get<int64_t>(), l[1].get<std::string>()));
    }
    if (i != 0) {
      t.x = tj.value("x", 0.0);
      t.y = tj.value("y", 0.0);
      t.direction = tj.value("dir", 90.0);
      t.size = tj.value("size", 100.0);
      t.costume = tj.value("costume", 0);
      t.visible = tj.value("visible", true);
      t.clone_count = tj.value("clones", 0);
    }
    s.targets.emplace_back(tj.value("id", ""), std::move(t));
    ++i;
  }
  s.backdrop = j.value("backdrop", 0);
  if (auto it = j.find("broadcasts"); it != j.end()) {
    for (const auto& b : *it) s.broadcasts.push_back(b.get<std::string>());
  }
  return s;
}

}  // namespace

std::string Trace::to_jsonl() const {
  std::ostringstream out;
  json header;
  header["type"] = "header";
  header["scenario_id"] = scenario_id;
  header["seed"] = seed;
  header["config_digest"] = config_digest;
  out << jio::canon(header) << "\n";
  for (const auto& cp : checkpoints) {
    json j = snapshot_to_json(cp.state);
    j["type"] = "checkpoint";
    j["tick"] = cp.tick;
    out << jio::canon(j) << "\n";
  }
  json end;
  end["type"] = "end";
  end["terminal"] = completed() ? json("completed") : json{{"crashed", *crash_reason}};
  json ev = json::array();
  for (const auto& [tick, msg] : events_log) ev.push_back(json::array({tick, msg}));
  end["events"] = std::move(ev);
  out << jio::canon(end) << "\n";
  return out.str();
}

Trace Trace::from_jsonl(std::string_view text) {
  Trace t;
  std::istringstream in{std::string(text)};
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = jio::parse_or_throw(line, "trace line");
    std::string type = j.value("type", "");
    if (type == "header") {
      t.scenario_id = j.value("scenario_id", "");
      t.seed = j.value("seed", uint64_t{0});
      t.config_digest = j.value("config_digest", "");
      saw_header = true;
    } else if (type == "checkpoint") {
      Checkpoint cp;
      cp.tick = jio::member(j, "tick", "checkpoint").get<int>();
      cp.state = snapshot_from_json(j);
      t.checkpoints.push_back(std::move(cp));
    } else if (type == "end") {
      const json& term = jio::member(j, "terminal", "trace end");
      if (term.is_object()) t.crash_reason = term.value("crashed", "unknown");
      if (auto it = j.find("events"); it != j.end()) {
        for (const auto& e : *it) {
          t.events_log.emplace_back(e[0].get<int>(), e[1].get<std::string>());
        }
      }
    } else {
      throw Error(ErrorKind::MalformedJson, "unknown trace record type: " + type);
    }
  }
  if (!saw_header) throw Error(ErrorKind::MalformedJson, "trace is missing its header line");
  return t;
}

}  // namespace sbforge
