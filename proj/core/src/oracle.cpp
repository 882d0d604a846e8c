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

#include "sbforge/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/util.hpp"
#include "sbforge/vm.hpp"

namespace sbforge {

using jio::json;

namespace {

const char* kind_name(Feature::Kind k) {
  switch (k) {
    case Feature::Kind::FinalEquals: return "final_equals";
    case Feature::Kind::CheckpointEquals: return "checkpoint_equals";
    case Feature::Kind::BroadcastOccurred: return "broadcast_occurred";
    case Feature::Kind::BroadcastAbsent: return "broadcast_absent";
    case Feature::Kind::ReachesThreshold: return "reaches_threshold";
    case Feature::Kind::FinalCloneCount: return "final_clone_count";
    case Feature::Kind::FinalVisibility: return "final_visibility";
    case Feature::Kind::FinalCostume: return "final_costume";
    case Feature::Kind::FinalBackdrop: return "final_backdrop";
  }
  return "?";
}

Feature::Kind kind_from(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Feature::Kind::FinalBackdrop); ++i) {
    if (s == kind_name(static_cast<Feature::Kind>(i))) return static_cast<Feature::Kind>(i);
  }
  throw Error(ErrorKind::MalformedJson, "unknown feature kind: " + s);
}

/// Final-state feature kind for a signal class.
Feature::Kind final_kind_for(const SignalRef& ref) {
  switch (ref.kind) {
    case SignalRef::Kind::CloneCount: return Feature::Kind::FinalCloneCount;
    case SignalRef::Kind::Visible: return Feature::Kind::FinalVisibility;
    case SignalRef::Kind::Costume: return Feature::Kind::FinalCostume;
    case SignalRef::Kind::Backdrop: return Feature::Kind::FinalBackdrop;
    default: return Feature::Kind::FinalEquals;
  }
}

const Checkpoint* checkpoint_at(const Trace& t, int tick) {
  for (const auto& cp : t.checkpoints) {
    if (cp.tick == tick) return &cp;
    if (cp.tick > tick) break;
  }
  return nullptr;
}

bool trace_broadcast_occurred(const Trace& t, const std::string& message) {
  for (const auto& [tick, msg] : t.events_log) {
    if (msg == message) return true;
  }
  return false;
}

std::string canon_value_text(const Scalar& v) { return jio::canon(jio::scalar_to_json(v)); }

}  // namespace

std::string Feature::sort_key() const {
  // Single-digit kind index first: ties rank in catalog order, not by the
  // alphabet of the kind names.
  std::string key = std::to_string(static_cast<int>(kind)) + ":" + kind_name(kind) + "|";
  switch (kind) {
    case Kind::BroadcastOccurred:
    case Kind::BroadcastAbsent:
      return key + message;
    case Kind::CheckpointEquals:
      return key + signal.to_string() + "|" + std::to_string(tick) + "|" + canon_value_text(value);
    case Kind::ReachesThreshold:
      return key + signal.to_string() + "|" + (cmp == Cmp::Ge ? "ge" : "le") + "|" +
             std::to_string(by_tick) + "|" + canon_value_text(value);
    default:
      return key + signal.to_string() + "|" + canon_value_text(value);
  }
}

std::string Feature::to_json() const {
  json j;
  j["kind"] = kind_name(kind);
  switch (kind) {
    case Kind::BroadcastOccurred:
    case Kind::BroadcastAbsent:
      j["message"] = message;
      break;
    case Kind::CheckpointEquals:
      j["signal"] = signal.to_string();
      j["tick"] = tick;
      j["value"] = jio::scalar_to_json(value);
      break;
    case Kind::ReachesThreshold:
      j["signal"] = signal.to_string();
      j["cmp"] = cmp == Cmp::Ge ? "ge" : "le";
      j["by_tick"] = by_tick;
      j["value"] = jio::scalar_to_json(value);
      break;
    default:
      j["signal"] = signal.to_string();
      j["value"] = jio::scalar_to_json(value);
      break;
  }
  j["provenance"] = json{{"rerun", provenance_rerun}, {"tick", provenance_tick}};
  return jio::canon(j);
}

Feature Feature::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "feature");
  Feature f;
  f.kind = kind_from(jio::member(j, "kind", "feature").get<std::string>());
  if (f.kind == Kind::BroadcastOccurred || f.kind == Kind::BroadcastAbsent) {
    f.message = jio::member(j, "message", "feature").get<std::string>();
  } else {
    auto ref = SignalRef::parse(jio::member(j, "signal", "feature").get<std::string>());
    if (!ref) throw Error(ErrorKind::MalformedJson, "bad signal ref in feature");
    f.signal = *ref;
    f.value = jio::scalar_from_json(jio::member(j, "value", "feature"));
    if (f.kind == Kind::CheckpointEquals) f.tick = jio::member(j, "tick", "feature").get<int>();
    if (f.kind == Kind::ReachesThreshold) {
      f.by_tick = jio::member(j, "by_tick", "feature").get<int>();
      f.cmp = jio::member(j, "cmp", "feature").get<std::string>() == "le" ? Cmp::Le : Cmp::Ge;
    }
  }
  if (auto it = j.find("provenance"); it != j.end()) {
    f.provenance_rerun = it->value("rerun", 0);
    f.provenance_tick = it->value("tick", 0);
  }
  return f;
}

bool evaluate_assertion(const Assertion& a, const Trace& t) {
  if (!t.completed()) return false;  // a crash fails every assertion
  const Feature& f = a.feature;
  switch (f.kind) {
    case Feature::Kind::BroadcastOccurred:
      return trace_broadcast_occurred(t, f.message);
    case Feature::Kind::BroadcastAbsent:
      return !trace_broadcast_occurred(t, f.message);
    case Feature::Kind::CheckpointEquals: {
      const Checkpoint* cp = checkpoint_at(t, f.tick);
      if (cp == nullptr) return false;
      auto v = signal_value(cp->state, f.signal);
      if (!v) throw Error(ErrorKind::UnknownSignal, f.signal.to_string());
      return Scalar::feature_equal(*v, f.value);
    }
    case Feature::Kind::ReachesThreshold: {
      double threshold = f.value.to_number();
      for (const auto& cp : t.checkpoints) {
        if (cp.tick > f.by_tick) break;
        auto v = signal_value(cp.state, f.signal);
        if (!v) throw Error(ErrorKind::UnknownSignal, f.signal.to_string());
        if (!v->is_numeric_like()) continue;
        double x = v->to_number();
        if (f.cmp == Feature::Cmp::Ge ? x >= threshold : x <= threshold) return true;
      }
      return false;
    }
    default: {  // final-state kinds
      if (t.checkpoints.empty()) return false;
      auto v = signal_value(t.checkpoints.back().state, f.signal);
      if (!v) throw Error(ErrorKind::UnknownSignal, f.signal.to_string());
      return Scalar::feature_equal(*v, f.value);
    }
  }
}

void check_suite_signals(const TestSuite& suite, const ProjectIR& p) {
  for (const Assertion& a : suite.assertions) {
    const Feature& f = a.feature;
    if (f.kind == Feature::Kind::BroadcastOccurred || f.kind == Feature::Kind::BroadcastAbsent) {
      continue;  // messages may be dynamic; occurrence is checked on the log
    }
    const SignalRef& sig = f.signal;
    if (sig.kind == SignalRef::Kind::Backdrop) continue;
    const Target* t = p.find_target(sig.target_id);
    if (t == nullptr) throw Error(ErrorKind::UnknownSignal, sig.to_string());
    switch (sig.kind) {
      case SignalRef::Kind::Var:
        if (p.resolve_variable(*t, sig.id) == nullptr) {
          throw Error(ErrorKind::UnknownSignal, sig.to_string());
        }
        break;
      case SignalRef::Kind::List:
        if (p.resolve_list(*t, sig.id) == nullptr) {
          throw Error(ErrorKind::UnknownSignal, sig.to_string());
        }
        break;
      default:
        if (t->is_stage) throw Error(ErrorKind::UnknownSignal, sig.to_string());
        break;
    }
  }
}

int hold_count(const Feature& f, const std::vector<Trace>& traces) {
  Assertion a{f, ""};
  int n = 0;
  for (const auto& t : traces) {
    if (evaluate_assertion(a, t)) ++n;
  }
  return n;
}

double hold_prob(const Feature& f, const std::vector<Trace>& traces) {
  if (traces.empty()) throw Error(ErrorKind::Internal, "hold_prob over zero traces");
  return static_cast<double>(hold_count(f, traces)) / static_cast<double>(traces.size());
}

std::vector<Feature> extract_features(const std::vector<Trace>& gold_traces,
                                      const std::vector<Trace>& buggy_traces) {
  std::map<std::string, Feature> picked;
  auto offer = [&picked](Feature f) {
    std::string key = f.sort_key();
    picked.emplace(std::move(key), std::move(f));
  };

  size_t pairs = std::min(gold_traces.size(), buggy_traces.size());
  for (size_t r = 0; r < pairs; ++r) {
    const Trace& g = gold_traces[r];
    const Trace& b = buggy_traces[r];
    if (!g.completed() || g.checkpoints.empty()) continue;  // gold must run clean

    // Per-checkpoint and final-state candidates. A crashed buggy trace
    // simply misses checkpoints, which reads as "differs".
    const Checkpoint& g_final = g.checkpoints.back();
    for (const Checkpoint& cp : g.checkpoints) {
      const Checkpoint* bcp = checkpoint_at(b, cp.tick);
      for (const SignalRef& sig : enumerate_signals(cp.state)) {
        auto gv = signal_value(cp.state, sig);
        if (!gv) continue;
        std::optional<Scalar> bv =
            bcp != nullptr ? signal_value(bcp->state, sig) : std::nullopt;
        bool differs = !bv.has_value() || !Scalar::feature_equal(*gv, *bv);
        if (!differs) continue;
        Feature f;
        f.signal = sig;
        f.value = *gv;
        f.provenance_rerun = static_cast<int>(r) + 1;
        f.provenance_tick = cp.tick;
        if (&cp == &g_final) {
          f.kind = final_kind_for(sig);
          offer(f);
        }
        f.kind = Feature::Kind::CheckpointEquals;
        f.tick = cp.tick;
        offer(std::move(f));
      }
    }

    // Broadcast occurrence candidates.
    std::set<std::string> gm, bm;
    for (const auto& [tick, msg] : g.events_log) gm.insert(msg);
    for (const auto& [tick, msg] : b.events_log) bm.insert(msg);
    for (const auto& m : gm) {
      if (!bm.count(m)) {
        Feature f;
        f.kind = Feature::Kind::BroadcastOccurred;
        f.message = m;
        f.provenance_rerun = static_cast<int>(r) + 1;
        offer(std::move(f));
      }
    }
    for (const auto& m : bm) {
      if (!gm.count(m)) {
        Feature f;
        f.kind = Feature::Kind::BroadcastAbsent;
        f.message = m;
        f.provenance_rerun = static_cast<int>(r) + 1;
        offer(std::move(f));
      }
    }

    // Threshold candidates over numeric trajectories.
    for (const SignalRef& sig : enumerate_signals(g_final.state)) {
      bool numeric = true;
      double gmin = 0, gmax = 0;
      int gmax_tick = 0, gmin_tick = 0;
      Scalar gmax_val, gmin_val;
      bool first = true;
      for (const auto& cp : g.checkpoints) {
        auto v = signal_value(cp.state, sig);
        if (!v || !v->is_numeric_like()) {
          numeric = false;
          break;
        }
        double x = v->to_number();
        if (first || x > gmax) {
          gmax = x;
          gmax_tick = cp.tick;
          gmax_val = *v;
        }
        if (first || x < gmin) {
          gmin = x;
          gmin_tick = cp.tick;
          gmin_val = *v;
        }
        first = false;
      }
      if (!numeric || first) continue;
      double bmin = 0, bmax = 0;
      bool bfirst = true;
      if (b.completed()) {
        for (const auto& cp : b.checkpoints) {
          auto v = signal_value(cp.state, sig);
          if (!v || !v->is_numeric_like()) continue;
          double x = v->to_number();
          if (bfirst || x > bmax) bmax = x;
          if (bfirst || x < bmin) bmin = x;
          bfirst = false;
        }
      }
      int final_tick = g_final.tick;
      if (bfirst || bmax < gmax) {
        Feature f;
        f.kind = Feature::Kind::ReachesThreshold;
        f.signal = sig;
        f.cmp = Feature::Cmp::Ge;
        f.value = gmax_val;
        f.by_tick = final_tick;
        f.provenance_rerun = static_cast<int>(r) + 1;
        f.provenance_tick = gmax_tick;
        offer(std::move(f));
      }
      if (bfirst || bmin > gmin) {
        Feature f;
        f.kind = Feature::Kind::ReachesThreshold;
        f.signal = sig;
        f.cmp = Feature::Cmp::Le;
        f.value = gmin_val;
        f.by_tick = final_tick;
        f.provenance_rerun = static_cast<int>(r) + 1;
        f.provenance_tick = gmin_tick;
        offer(std::move(f));
      }
    }
  }

  std::vector<Feature> out;
  out.reserve(picked.size());
  for (auto& [key, f] : picked) out.push_back(std::move(f));
  return out;
}

// ---- SynthesisConfig / TestSuite ----

std::string SynthesisConfig::to_json() const {
  json j;
  j["reruns"] = reruns;
  j["theta_pass"] = theta_pass.to_double();
  j["theta_fail"] = theta_fail.to_double();
  j["tick_budget"] = tick_budget;
  j["checkpoint_interval"] = checkpoint_interval;
  j["max_assertions_per_scenario"] = max_assertions_per_scenario;
  return jio::canon(j);
}

SynthesisConfig SynthesisConfig::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "synthesis config");
  SynthesisConfig c;
  c.reruns = j.value("reruns", 5);
  c.theta_pass = Rational::from_decimal(shortest_double_text(j.value("theta_pass", 0.9)));
  c.theta_fail = Rational::from_decimal(shortest_double_text(j.value("theta_fail", 0.1)));
  c.tick_budget = j.value("tick_budget", 2000);
  c.checkpoint_interval = j.value("checkpoint_interval", 10);
  c.max_assertions_per_scenario = j.value("max_assertions_per_scenario", 5);
  return c;
}

std::string SynthesisConfig::digest() const { return digest_hex(to_json()); }

std::string TestSuite::to_json() const {
  json j;
  j["config"] = jio::parse_or_throw(config.to_json(), "config");
  j["config_digest"] = config_digest;
  json scens = json::array();
  for (const auto& s : scenarios) scens.push_back(jio::parse_or_throw(s.to_json(), "scenario"));
  j["scenarios"] = std::move(scens);
  json asserts = json::array();
  for (const auto& a : assertions) {
    json aj;
    aj["scenario_id"] = a.scenario_id;
    aj["feature"] = jio::parse_or_throw(a.feature.to_json(), "feature");
    asserts.push_back(std::move(aj));
  }
  j["assertions"] = std::move(asserts);
  return jio::canon(j);
}

TestSuite TestSuite::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "test suite");
  TestSuite t;
  t.config = SynthesisConfig::from_json(jio::canon(jio::member(j, "config", "test suite")));
  t.config_digest = j.value("config_digest", "");
  for (const auto& s : jio::member(j, "scenarios", "test suite")) {
    t.scenarios.push_back(Scenario::from_json(jio::canon(s)));
  }
  for (const auto& a : jio::member(j, "assertions", "test suite")) {
    Assertion as;
    as.scenario_id = jio::member(a, "scenario_id", "assertion").get<std::string>();
    as.feature = Feature::from_json(jio::canon(jio::member(a, "feature", "assertion")));
    t.assertions.push_back(std::move(as));
  }
  std::set<std::string> ids;
  for (const auto& s : t.scenarios) ids.insert(s.id);
  for (const auto& a : t.assertions) {
    if (!ids.count(a.scenario_id)) {
      throw Error(ErrorKind::MalformedJson, "assertion references unknown scenario " + a.scenario_id);
    }
  }
  return t;
}

std::optional<TestSuite> synthesize(const ProjectIR& gold, const ProjectIR& buggy,
                                    const std::vector<Scenario>& scenarios,
                                    const SynthesisConfig& cfg) {
  TestSuite suite;
  suite.config = cfg;
  suite.config_digest = cfg.digest();

  for (const Scenario& base : scenarios) {
    Scenario s = base;
    s.tick_budget = cfg.tick_budget;
    s.checkpoint_interval = cfg.checkpoint_interval;

    std::vector<Trace> g, b;
    for (int r = 1; r <= cfg.reruns; ++r) {
      uint64_t seed = s.seed_for_rerun(r);
      g.push_back(run(gold, s, seed));
      b.push_back(run(buggy, s, seed));
    }

    std::vector<Feature> candidates = extract_features(g, b);
    struct Ranked {
      int margin;
      Feature f;
    };
    std::vector<Ranked> accepted;
    const int64_t R = cfg.reruns;
    for (Feature& f : candidates) {
      int hg = hold_count(f, g);
      int hb = hold_count(f, b);
      // hg/R >= theta_pass  and  hb/R <= theta_fail, exactly.
      bool pass_ok = static_cast<__int128>(hg) * cfg.theta_pass.den >=
                     static_cast<__int128>(cfg.theta_pass.num) * R;
      bool fail_ok = static_cast<__int128>(hb) * cfg.theta_fail.den <=
                     static_cast<__int128>(cfg.theta_fail.num) * R;
      if (pass_ok && fail_ok) accepted.push_back({hg - hb, std::move(f)});
    }
    std::stable_sort(accepted.begin(), accepted.end(), [](const Ranked& a, const Ranked& b) {
      if (a.margin != b.margin) return a.margin > b.margin;
      return a.f.sort_key() < b.f.sort_key();
    });
    if (accepted.size() > static_cast<size_t>(cfg.max_assertions_per_scenario)) {
      accepted.resize(static_cast<size_t>(cfg.max_assertions_per_scenario));
    }
    if (!accepted.empty()) {
      suite.scenarios.push_back(s);
      for (auto& r : accepted) suite.assertions.push_back({std::move(r.f), s.id});
    }
  }

  if (suite.assertions.empty()) return std::nullopt;
  return suite;
}

}  // namespace sbforge
