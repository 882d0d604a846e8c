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

#include "sbforge/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/trigger.hpp"
#include "sbforge/vm.hpp"

namespace sbforge {

using jio::json;

// ---- repair scoring ----

namespace {

const char* failure_name(RepairScore::Failure f) {
  switch (f) {
    case RepairScore::Failure::None: return "none";
    case RepairScore::Failure::Schema: return "schema";
    case RepairScore::Failure::NotApplicable: return "not_applicable";
    case RepairScore::Failure::Crash: return "crash";
    case RepairScore::Failure::AssertionFailed: return "assertion_failed";
  }
  return "?";
}

RepairScore::Failure failure_from(const std::string& s) {
  if (s == "none") return RepairScore::Failure::None;
  if (s == "schema") return RepairScore::Failure::Schema;
  if (s == "not_applicable") return RepairScore::Failure::NotApplicable;
  if (s == "crash") return RepairScore::Failure::Crash;
  if (s == "assertion_failed") return RepairScore::Failure::AssertionFailed;
  throw Error(ErrorKind::MalformedJson, "unknown failure reason: " + s);
}

}  // namespace

std::string RepairScore::to_json() const {
  json j;
  json r;
  r["functional_success"] = functional_success;
  r["pass_rate"] = pass_rate;
  r["d_edit"] = d_edit;
  r["drift"] = drift;
  r["failure_reason"] = failure == Failure::None ? json(nullptr) : json(failure_name(failure));
  j["repair"] = std::move(r);
  return jio::canon(j);
}

RepairScore RepairScore::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "repair score");
  const json& r = jio::member(j, "repair", "repair score");
  RepairScore s;
  s.functional_success = r.value("functional_success", false);
  s.pass_rate = r.value("pass_rate", 0.0);
  s.d_edit = r.value("d_edit", 0);
  s.drift = r.value("drift", 0.0);
  const json& f = jio::member(r, "failure_reason", "repair score");
  s.failure = f.is_null() ? Failure::None : failure_from(f.get<std::string>());
  return s;
}

RepairScore score_repair(const BugInstance& bug, std::string_view patch_bytes, int reruns) {
  RepairScore sc;
  NormalizedEditSet gold_edits = normalize(bug.inverse);

  Patch patch;
  try {
    patch = validate_patch(patch_bytes);
  } catch (const Error&) {
    sc.failure = RepairScore::Failure::Schema;
    sc.d_edit = edit_distance(gold_edits, {});
    sc.drift = 1.0;
    return sc;
  }
  sc.d_edit = edit_distance(gold_edits, normalize(patch));

  ProjectIR patched;
  try {
    patched = apply_patch(bug.buggy, patch);
  } catch (const Error&) {
    sc.failure = RepairScore::Failure::NotApplicable;
    sc.drift = 1.0;
    return sc;
  }

  int passes = 0;
  bool any_crash = false;
  std::vector<Trace> patched_traces, gold_traces;
  for (int r = 1; r <= reruns; ++r) {
    bool all_hold = true;
    for (const Scenario& s : bug.suite.scenarios) {
      Trace tp = run(patched, s, s.seed_for_rerun(r));
      Trace tg = run(bug.gold, s, s.seed_for_rerun(r));
      if (!tp.completed()) any_crash = true;
      for (const Assertion& a : bug.suite.assertions) {
        if (a.scenario_id != s.id) continue;
        if (!evaluate_assertion(a, tp)) all_hold = false;
      }
      patched_traces.push_back(std::move(tp));
      gold_traces.push_back(std::move(tg));
    }
    if (all_hold) ++passes;
  }
  sc.pass_rate = reruns > 0 ? static_cast<double>(passes) / reruns : 0.0;
  sc.drift = semantic_drift(patched_traces, gold_traces);

  const Rational& theta = bug.suite.config.theta_pass;
  bool rate_ok = static_cast<__int128>(passes) * theta.den >=
                 static_cast<__int128>(theta.num) * reruns;
  sc.functional_success = rate_ok && !any_crash;
  if (sc.functional_success) {
    sc.failure = RepairScore::Failure::None;
  } else if (any_crash) {
    sc.failure = RepairScore::Failure::Crash;
  } else {
    sc.failure = RepairScore::Failure::AssertionFailed;
  }
  return sc;
}

// ---- drift ----

namespace {

struct SignalScale {
  double lo = 0, hi = 0;
  bool seen = false;
};

void observe_scales(const std::vector<Trace>& traces,
                    std::map<std::string, SignalScale>* scales) {
  for (const Trace& t : traces) {
    for (const Checkpoint& cp : t.checkpoints) {
      for (const SignalRef& sig : enumerate_signals(cp.state)) {
        auto v = signal_value(cp.state, sig);
        if (!v || !v->is_numeric_like()) continue;
        double x = v->to_number();
        if (!std::isfinite(x)) continue;
        SignalScale& s = (*scales)[sig.to_string()];
        if (!s.seen) {
          s.lo = s.hi = x;
          s.seen = true;
        } else {
          s.lo = std::min(s.lo, x);
          s.hi = std::max(s.hi, x);
        }
      }
    }
  }
}

double jaccard_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  int inter = 0;
  for (const auto& x : sa) {
    if (sb.count(x)) ++inter;
  }
  int uni = static_cast<int>(sa.size() + sb.size()) - inter;
  return uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / uni;
}

}  // namespace

double semantic_drift(const std::vector<Trace>& patched, const std::vector<Trace>& gold) {
  if (patched.size() != gold.size()) {
    throw Error(ErrorKind::MisalignedTraces, "trace counts differ");
  }
  std::map<std::string, SignalScale> scales;
  observe_scales(patched, &scales);
  observe_scales(gold, &scales);

  double total = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < patched.size(); ++i) {
    const Trace& a = patched[i];
    const Trace& b = gold[i];
    if (a.scenario_id != b.scenario_id || a.seed != b.seed) {
      throw Error(ErrorKind::MisalignedTraces, a.scenario_id + " vs " + b.scenario_id);
    }

    // Union signal set (identical when the projects share declarations).
    std::set<SignalRef> signals;
    if (!a.checkpoints.empty()) {
      auto v = enumerate_signals(a.checkpoints.front().state);
      signals.insert(v.begin(), v.end());
    }
    if (!b.checkpoints.empty()) {
      auto v = enumerate_signals(b.checkpoints.front().state);
      signals.insert(v.begin(), v.end());
    }

    // Union checkpoint grid; a side missing a tick scores 1 everywhere.
    std::set<int> grid;
    for (const auto& cp : a.checkpoints) grid.insert(cp.tick);
    for (const auto& cp : b.checkpoints) grid.insert(cp.tick);

    auto find_cp = [](const Trace& t, int tick) -> const Checkpoint* {
      for (const auto& cp : t.checkpoints) {
        if (cp.tick == tick) return &cp;
      }
      return nullptr;
    };

    for (int tick : grid) {
      const Checkpoint* ca = find_cp(a, tick);
      const Checkpoint* cb = find_cp(b, tick);
      if (ca == nullptr || cb == nullptr) {
        total += static_cast<double>(signals.size()) + 1;  // +1 for the broadcast set
        count += static_cast<int64_t>(signals.size()) + 1;
        continue;
      }
      for (const SignalRef& sig : signals) {
        auto va = signal_value(ca->state, sig);
        auto vb = signal_value(cb->state, sig);
        double d;
        if (!va || !vb) {
          d = 1.0;
        } else if ((signal_is_numeric(sig) ||
                    (sig.kind == SignalRef::Kind::Var && va->is_numeric_like() &&
                     vb->is_numeric_like())) &&
                   va->is_numeric_like() && vb->is_numeric_like()) {
          double xa = va->to_number();
          double xb = vb->to_number();
          if (!std::isfinite(xa) || !std::isfinite(xb)) {
            d = xa == xb ? 0.0 : 1.0;
          } else {
            const SignalScale& s = scales[sig.to_string()];
            double scale = std::max(s.seen ? s.hi - s.lo : 0.0, 1.0);
            d = std::min(std::abs(xa - xb) / scale, 1.0);
          }
        } else {
          d = Scalar::feature_equal(*va, *vb) ? 0.0 : 1.0;
        }
        total += d;
        ++count;
      }
      total += jaccard_distance(ca->state.broadcasts, cb->state.broadcasts);
      ++count;
    }
  }
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

// ---- trigger canonicalization ----

namespace {

const std::vector<std::string>& key_vocabulary() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> v{"space", "up arrow", "down arrow", "left arrow", "right arrow",
                               "enter", "any"};
    for (char c = 'a'; c <= 'z'; ++c) v.push_back(std::string(1, c));
    for (char c = '0'; c <= '9'; ++c) v.push_back(std::string(1, c));
    return v;
  }();
  return keys;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  for (char raw : text) {
    unsigned char c = static_cast<unsigned char>(raw);
    if (std::isalnum(c) || c == ':' || c == '_') {
      out += static_cast<char>(std::tolower(c));
    } else {
      out += ' ';
    }
  }
  // collapse runs of spaces
  std::string collapsed;
  bool space = true;
  for (char c : out) {
    if (c == ' ') {
      if (!space) collapsed += ' ';
      space = true;
    } else {
      collapsed += c;
      space = false;
    }
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
  return collapsed;
}

bool contains_phrase(const std::string& text, const std::string& phrase) {
  std::string padded = " " + text + " ";
  std::string needle = " " + phrase + " ";
  return padded.find(needle) != std::string::npos;
}

std::vector<std::string> tokens_of(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

bool is_stopword(const std::string& t) {
  return t == "the" || t == "a" || t == "an" || t == "of" || t == "on" || t == "is" ||
         t == "was" || t == "gets" || t == "sprite" || t == "when" || t == "i";
}

}  // namespace

std::optional<std::string> canonicalize_trigger(std::string_view text) {
  std::string norm = normalize_text(text);
  if (norm.empty()) return std::nullopt;
  std::set<std::string> candidates;

  // Direct canonical forms ("green_flag", "key:space", "broadcast:go", ...),
  // tolerating space after the colon.
  {
    std::string compact = norm;
    size_t colon = compact.find(": ");
    while (colon != std::string::npos) {
      compact.erase(colon + 1, 1);
      colon = compact.find(": ");
    }
    if (auto tok = TriggerToken::parse(compact)) {
      if (tok->kind != TriggerToken::Kind::Key ||
          std::find(key_vocabulary().begin(), key_vocabulary().end(), tok->param) !=
              key_vocabulary().end()) {
        candidates.insert(tok->to_string());
      }
    }
  }

  // Green flag synonyms.
  for (const char* phrase :
       {"green_flag", "green flag", "flag clicked", "flag is clicked", "when the flag",
        "project starts", "game starts", "project is started", "program starts"}) {
    if (contains_phrase(norm, phrase) || norm == phrase) {
      candidates.insert("green_flag");
      break;
    }
  }

  // Clone start synonyms.
  for (const char* phrase : {"clone_start", "as a clone", "clone starts", "start as clone",
                             "starts as a clone", "clone is created"}) {
    if (contains_phrase(norm, phrase) || norm == phrase) {
      candidates.insert("clone_start");
      break;
    }
  }

  // Key phrases over the key vocabulary.
  for (const std::string& key : key_vocabulary()) {
    if (key == "any") continue;
    for (const std::string& pattern :
         {"press " + key, "presses " + key, "pressed " + key, "pressing " + key, key + " pressed",
          key + " is pressed", "hold " + key, "holds " + key, "holding " + key, key + " key",
          "key " + key, "tap " + key, "tapping " + key, "taps " + key, key + " down"}) {
      if (contains_phrase(norm, pattern)) {
        candidates.insert("key:" + key);
        break;
      }
    }
  }

  std::vector<std::string> toks = tokens_of(norm);

  // Broadcast marker + following token.
  for (size_t i = 0; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t == "broadcast" || t == "broadcasts" || t == "message" || t == "receive" ||
        t == "receives" || t == "receiving" || t == "received" || t == "signal") {
      for (size_t j = i + 1; j < toks.size(); ++j) {
        if (is_stopword(toks[j])) continue;
        candidates.insert("broadcast:" + toks[j]);
        break;
      }
    }
  }

  // Click marker: "click(s/ed/ing) (on) X" and "X clicked".
  for (size_t i = 0; i < toks.size(); ++i) {
    const std::string& t = toks[i];
    if (t == "click" || t == "clicks" || t == "clicked" || t == "clicking") {
      if (t == "clicked" && i > 0) {
        size_t j = i;
        while (j > 0 && is_stopword(toks[j - 1])) --j;
        if (j > 0) {
          const std::string& subject = toks[j - 1];
          if (subject != "flag" && !is_stopword(subject)) {
            candidates.insert("click:" + subject);
          }
        }
      }
      for (size_t j = i + 1; j < toks.size(); ++j) {
        if (is_stopword(toks[j])) continue;
        candidates.insert("click:" + toks[j]);
        break;
      }
    }
  }

  if (candidates.size() != 1) return std::nullopt;
  return *candidates.begin();
}

// ---- understanding ----

TmoAnswer TmoAnswer::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "tmo answer");
  TmoAnswer a;
  a.trigger_text = j.value("trigger", "");
  a.mechanism = j.value("mechanism", "");
  if (auto it = j.find("outcome"); it != j.end()) {
    if (it->is_string()) {
      a.outcome_text = it->get<std::string>();
    } else if (it->is_object()) {
      a.outcome_text = it->value("text", "");
      if (auto pr = it->find("predicate"); pr != it->end() && !pr->is_null()) {
        a.outcome_predicate = Feature::from_json(jio::canon(*pr));
      }
    }
  }
  return a;
}

std::string UnderstandingScore::to_json() const {
  json u;
  u["trigger_correct"] = trigger_correct;
  u["mechanism_correct"] = mechanism_correct;
  u["outcome_correct"] = outcome_correct;
  u["outcome_needs_judge"] = outcome_needs_judge;
  u["u_acc_joint"] = u_acc_joint;
  u["predicted_triggers"] = predicted_triggers;
  u["truth_triggers"] = truth_triggers;
  if (global) {
    json g;
    g["goal_matched"] = global->goal_matched;
    g["goal_needs_judge"] = global->goal_needs_judge;
    g["roles_matched"] = global->roles_matched;
    g["hooks_matched"] = global->hooks_matched;
    u["global"] = std::move(g);
  }
  json j;
  j["understanding"] = std::move(u);
  return jio::canon(j);
}

UnderstandingScore score_understanding(const TmoAnswer& ans, const BugSpec& truth,
                                       const ReferenceSemantics& refsem, Judge* judge) {
  (void)refsem;
  UnderstandingScore s;
  std::optional<std::string> token = canonicalize_trigger(ans.trigger_text);
  s.trigger_correct = token.has_value() && *token == truth.ground_truth.trigger_token;
  if (token) s.predicted_triggers.push_back(*token);
  s.truth_triggers.push_back(truth.ground_truth.trigger_token);

  s.mechanism_correct = ans.mechanism == pattern_name(truth.ground_truth.mechanism);

  if (ans.outcome_predicate) {
    s.outcome_correct = ans.outcome_predicate->same_predicate(truth.ground_truth.outcome);
  } else if (judge != nullptr) {
    JudgeVerdict v = judge->judge(ans.outcome_text, truth.model_facing.expected);
    if (v.available) {
      s.outcome_correct = v.match;
    } else {
      s.outcome_needs_judge = true;
    }
  } else {
    s.outcome_needs_judge = true;
  }

  s.u_acc_joint = s.trigger_correct && s.mechanism_correct && s.outcome_correct;
  return s;
}

GAcc score_global(const GlobalAnswer& ans, const ReferenceSemantics& refsem, Judge* judge) {
  GAcc g;

  std::set<std::string> want_roles, got_roles;
  for (const auto& [id, text] : refsem.roles) want_roles.insert(id);
  for (const auto& [id, text] : ans.roles) got_roles.insert(id);
  g.roles_matched = want_roles == got_roles;
  if (g.roles_matched && judge != nullptr) {
    for (const auto& [id, text] : ans.roles) {
      for (const auto& [rid, rtext] : refsem.roles) {
        if (rid != id) continue;
        JudgeVerdict v = judge->judge(text, rtext);
        if (v.available && !v.match) g.roles_matched = false;
      }
    }
  }

  std::set<std::string> want_hooks, got_hooks;
  for (const auto& h : refsem.hooks) want_hooks.insert(h.trigger);
  for (const auto& h : ans.hooks) {
    auto token = canonicalize_trigger(h);
    if (token) got_hooks.insert(*token);
  }
  g.hooks_matched = want_hooks == got_hooks;

  if (judge != nullptr) {
    JudgeVerdict v = judge->judge(ans.goal, refsem.project_goal);
    if (v.available) {
      g.goal_matched = v.match;
    } else {
      g.goal_needs_judge = true;
    }
  } else {
    g.goal_needs_judge = true;
  }
  return g;
}

double trigger_f1(
    const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& instances) {
  int64_t matched = 0, predicted = 0, truth = 0;
  for (const auto& [pred, gold] : instances) {
    predicted += static_cast<int64_t>(pred.size());
    truth += static_cast<int64_t>(gold.size());
    std::map<std::string, int> remaining;
    for (const auto& t : gold) remaining[t]++;
    for (const auto& p : pred) {
      auto it = remaining.find(p);
      if (it != remaining.end() && it->second > 0) {
        ++matched;
        --it->second;
      }
    }
  }
  if (predicted == 0 && truth == 0) return 0.0;
  double precision = predicted == 0 ? 0.0 : static_cast<double>(matched) / predicted;
  double recall = truth == 0 ? 0.0 : static_cast<double>(matched) / truth;
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double mcnemar_exact(int n01, int n10) {
  if (n01 < 0 || n10 < 0) throw Error(ErrorKind::Internal, "negative discordant count");
  const int n = n01 + n10;
  if (n == 0) return 1.0;
  if (n <= 120) {
    // Exact tails with 128-bit binomial sums.
    unsigned __int128 total = static_cast<unsigned __int128>(1) << n;
    unsigned __int128 c = 1;  // C(n, 0)
    unsigned __int128 low = 0, high = 0;
    for (int i = 0; i <= n; ++i) {
      if (i <= n01) low += c;
      if (i >= n01) high += c;
      c = c * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    }
    long double p_low = static_cast<long double>(low) / static_cast<long double>(total);
    long double p_high = static_cast<long double>(high) / static_cast<long double>(total);
    long double p = 2.0L * std::min(p_low, p_high);
    return static_cast<double>(std::min(p, 1.0L));
  }
  // Large n: accumulate in log space.
  auto log_choose = [n](int i) {
    return std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
  };
  double low = 0, high = 0;
  for (int i = 0; i <= n; ++i) {
    double term = std::exp(log_choose(i) - n * std::log(2.0));
    if (i <= n01) low += term;
    if (i >= n01) high += term;
  }
  return std::min(1.0, 2.0 * std::min(low, high));
}

// ---- aggregation ----

std::string Aggregate::to_json() const {
  json j;
  json r;
  r["n"] = repair_n;
  r["success_rate"] = success_rate;
  r["mean_d_edit"] = mean_d_edit;
  r["mean_drift"] = mean_drift;
  j["repair"] = std::move(r);
  json u;
  u["n"] = understanding_n;
  u["g_acc"] = g_acc;
  u["u_acc"] = u_acc;
  u["t_f1"] = t_f1;
  u["m_acc"] = m_acc;
  j["understanding"] = std::move(u);
  return jio::canon(j);
}

std::string Aggregate::to_table() const {
  char buf[512];
  std::string out;
  out += "metric            value\n";
  out += "----------------  -----\n";
  if (repair_n > 0) {
    std::snprintf(buf, sizeof buf, "%-16s  %d\n", "repairs scored", repair_n);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.0f%%\n", "success rate", success_rate * 100.0);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.2f\n", "mean d_edit", mean_d_edit);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.3f\n", "mean drift", mean_drift);
    out += buf;
  }
  if (understanding_n > 0) {
    std::snprintf(buf, sizeof buf, "%-16s  %d\n", "answers scored", understanding_n);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.0f%%\n", "G-Acc", g_acc * 100.0);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.0f%%\n", "U-Acc", u_acc * 100.0);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.2f\n", "T-F1", t_f1);
    out += buf;
    std::snprintf(buf, sizeof buf, "%-16s  %.0f%%\n", "M-Acc", m_acc * 100.0);
    out += buf;
  }
  return out;
}

Aggregate aggregate_scores(const std::vector<std::string>& score_jsons) {
  Aggregate agg;
  int successes = 0;
  double d_edit_sum = 0, drift_sum = 0;
  int g_scored = 0, g_correct = 0, u_correct = 0, m_correct = 0;
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> f1_rows;

  for (const std::string& text : score_jsons) {
    json j = jio::parse_or_throw(text, "score file");
    if (auto r = j.find("repair"); r != j.end()) {
      agg.repair_n++;
      if (r->value("functional_success", false)) ++successes;
      d_edit_sum += r->value("d_edit", 0);
      drift_sum += r->value("drift", 0.0);
    }
    if (auto u = j.find("understanding"); u != j.end()) {
      agg.understanding_n++;
      if (u->value("u_acc_joint", false)) ++u_correct;
      if (u->value("mechanism_correct", false)) ++m_correct;
      std::vector<std::string> pred, truth;
      if (auto it = u->find("predicted_triggers"); it != u->end()) {
        for (const auto& t : *it) pred.push_back(t.get<std::string>());
      }
      if (auto it = u->find("truth_triggers"); it != u->end()) {
        for (const auto& t : *it) truth.push_back(t.get<std::string>());
      }
      f1_rows.emplace_back(std::move(pred), std::move(truth));
      if (auto g = u->find("global"); g != u->end()) {
        ++g_scored;
        if (g->value("roles_matched", false) && g->value("hooks_matched", false)) ++g_correct;
      }
    }
  }
  if (agg.repair_n > 0) {
    agg.success_rate = static_cast<double>(successes) / agg.repair_n;
    agg.mean_d_edit = d_edit_sum / agg.repair_n;
    agg.mean_drift = drift_sum / agg.repair_n;
  }
  if (agg.understanding_n > 0) {
    agg.u_acc = static_cast<double>(u_correct) / agg.understanding_n;
    agg.m_acc = static_cast<double>(m_correct) / agg.understanding_n;
    agg.t_f1 = trigger_f1(f1_rows);
  }
  if (g_scored > 0) agg.g_acc = static_cast<double>(g_correct) / g_scored;
  return agg;
}

}  // namespace sbforge
