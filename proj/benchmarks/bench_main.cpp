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

#include <benchmark/benchmark.h>

#include "sbforge/bundle.hpp"
#include "sbforge/forge.hpp"
#include "sbforge/oracle.hpp"
#include "sbforge/patch.hpp"
#include "sbforge/scenario_gen.hpp"
#include "sbforge/vm.hpp"

using namespace sbforge;

namespace {

std::string sample(const char* rel) {
  return read_file(std::string(SBFORGE_SAMPLES_DIR) + "/" + rel);
}

Scenario idle(int budget) {
  Scenario s;
  s.id = "idle";
  s.events = {{0, {InputEvent::Kind::GreenFlag, ""}}};
  s.tick_budget = budget;
  s.checkpoint_interval = 10;
  return s;
}

void BM_ParseProject(benchmark::State& state) {
  std::string bytes = sample("forge/race_min.json");
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_project(bytes));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK(BM_ParseProject);

void BM_SerializeProject(benchmark::State& state) {
  ProjectIR p = parse_project(sample("forge/race_min.json"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(serialize_project(p));
  }
}
BENCHMARK(BM_SerializeProject);

void BM_VmRun(benchmark::State& state) {
  ProjectIR p = parse_project(sample("forge/race_min.json"));
  Scenario s = idle(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run(p, s, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));  // ticks
}
BENCHMARK(BM_VmRun)->Arg(200)->Arg(2000);

void BM_SynthesizeSuite(benchmark::State& state) {
  ProjectIR gold = parse_project(sample("forge/race_min.json"));
  SplitMix64 rng(1);
  Site site = *select_site(gold, BugPatternTag::DesyncMissingWait, rng);
  auto [buggy, fwd] = apply_operator(gold, BugPatternTag::DesyncMissingWait, site);
  std::vector<Scenario> scenarios =
      instantiate(template_library(), extract_metadata(gold), 200, 10);
  SynthesisConfig cfg;
  cfg.tick_budget = 200;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synthesize(gold, buggy, scenarios, cfg));
  }
}
BENCHMARK(BM_SynthesizeSuite);

void BM_ForgeEndToEnd(benchmark::State& state) {
  ProjectIR gold = parse_project(sample("forge/missing_init_demo.json"));
  PipelineConfig cfg;
  cfg.tick_budget = 200;
  cfg.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forge(gold, cfg, {}, BugPatternTag::MissingInit));
  }
}
BENCHMARK(BM_ForgeEndToEnd);

void BM_NormalizeAndDistance(benchmark::State& state) {
  ProjectIR gold = parse_project(sample("forge/handler_conflict_demo.json"));
  SplitMix64 rng(1);
  Site site = *select_site(gold, BugPatternTag::HandlerConflict, rng);
  auto [buggy, fwd] = apply_operator(gold, BugPatternTag::HandlerConflict, site);
  Patch inv = inverse_patch(fwd);
  for (auto _ : state) {
    benchmark::DoNotOptimize(edit_distance(normalize(inv), normalize(fwd)));
  }
}
BENCHMARK(BM_NormalizeAndDistance);

}  // namespace

BENCHMARK_MAIN();
