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

#include "myolab/reward.h"

namespace {

using namespace myolab;

void BM_EvalStepReward(benchmark::State& state) {
  const TaskBundle task = build_task("walker_flat", 1);
  TaskContext context;
  context.spec = task.spec;
  FeatureExtractor extractor(task.morphology, task.terrain, context);
  const RewardProgram program = parse_program(
      "term height { exp(-8 * abs(height - 0.93)) } @ 2\n"
      "term balance { exp(-4 * abs(balance)) } @ 1\n"
      "term forward_velocity { clamp(forward_velocity, -0.5, 1.5) } @ 1.5\n"
      "term effort { -(0.05 * effort) } @ 0.5\n");
  const Eigen::VectorXd u =
      Eigen::VectorXd::Constant(task.morphology.muscle_count(), 0.3);
  const FeatureFrame& frame = extractor.extract(task.initial_state, u, nullptr);
  for (auto _ : state) {
    auto r = eval_step_reward(program, frame);
    benchmark::DoNotOptimize(r.total);
  }
}
BENCHMARK(BM_EvalStepReward);

void BM_ParseProgram(benchmark::State& state) {
  const std::string text =
      "term height { exp(-8 * abs(height - 0.93)) } @ 2\n"
      "term balance { exp(-4 * abs(balance)) } @ 1\n"
      "term forward_velocity { clamp(forward_velocity, -0.5, 1.5) } @ 1.5\n";
  for (auto _ : state) {
    auto p = parse_program(text);
    benchmark::DoNotOptimize(p.terms.size());
  }
}
BENCHMARK(BM_ParseProgram);

}  // namespace

BENCHMARK_MAIN();
