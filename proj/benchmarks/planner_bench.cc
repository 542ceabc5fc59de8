// Copyright 2026 The myolab Authors
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

#include "myolab/control.h"

namespace {

using namespace myolab;

void BM_WalkerPlan(benchmark::State& state) {
  const TaskBundle task = build_task("walker_flat", 1);
  TaskContext context;
  context.spec = task.spec;
  const RewardProgram program =
      parse_program(default_program_text("walker_flat"));
  PlannerConfig pc;
  pc.jobs = static_cast<int>(state.range(0));
  Planner planner(task.morphology, task.terrain, SimConfig{}, context, pc);
  std::mt19937_64 rng(7);
  const PostureTarget z0 = posture_map(task.morphology, task.initial_state);
  for (auto _ : state) {
    auto result = planner.plan(task.initial_state, program, z0, rng);
    benchmark::DoNotOptimize(result.z_star.data());
  }
}
BENCHMARK(BM_WalkerPlan)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_LowLevelControl(benchmark::State& state) {
  const TaskBundle task = build_task("walker_flat", 1);
  PostureTarget z = posture_map(task.morphology, task.initial_state);
  z.array() += 0.1;
  for (auto _ : state) {
    auto u = low_level_control(task.initial_state, z, task.morphology, 4e6);
    benchmark::DoNotOptimize(u.data());
  }
}
BENCHMARK(BM_LowLevelControl);

}  // namespace
