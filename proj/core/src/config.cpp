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

#include "sbforge/config.hpp"

#include "json_io.hpp"
#include "sbforge/errors.hpp"
#include "sbforge/util.hpp"

namespace sbforge {

using jio::json;

void PipelineConfig::check() const {
  Rational zero{0, 1};
  Rational one{1, 1};
  if (!(zero <= theta_fail) || !(theta_fail < theta_pass) || !(theta_pass <= one)) {
    throw Error(ErrorKind::MalformedJson, "need 0 <= theta_fail < theta_pass <= 1");
  }
  if (reruns < 1 || max_trials < 1 || tick_budget < 1 || checkpoint_interval < 1) {
    throw Error(ErrorKind::MalformedJson, "counts must be positive");
  }
}

SynthesisConfig PipelineConfig::synthesis() const {
  SynthesisConfig s;
  s.reruns = reruns;
  s.theta_pass = theta_pass;
  s.theta_fail = theta_fail;
  s.tick_budget = tick_budget;
  s.checkpoint_interval = checkpoint_interval;
  return s;
}

std::string PipelineConfig::to_json() const {
  json j;
  j["reruns"] = reruns;
  j["theta_pass"] = theta_pass.to_double();
  j["theta_fail"] = theta_fail.to_double();
  j["max_trials"] = max_trials;
  j["tick_budget"] = tick_budget;
  j["checkpoint_interval"] = checkpoint_interval;
  j["seed"] = seed;
  return jio::canon(j);
}

PipelineConfig PipelineConfig::from_json(std::string_view text) {
  json j = jio::parse_or_throw(text, "pipeline config");
  PipelineConfig c;
  c.reruns = j.value("reruns", 5);
  c.theta_pass = Rational::from_decimal(shortest_double_text(j.value("theta_pass", 0.9)));
  c.theta_fail = Rational::from_decimal(shortest_double_text(j.value("theta_fail", 0.1)));
  c.max_trials = j.value("max_trials", 20);
  c.tick_budget = j.value("tick_budget", 2000);
  c.checkpoint_interval = j.value("checkpoint_interval", 10);
  c.seed = j.value("seed", uint64_t{0});
  c.check();
  return c;
}

std::string PipelineConfig::digest() const { return digest_hex(to_json()); }

}  // namespace sbforge
