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

#include "myolab/tasks.h"

namespace {

using namespace myolab;

void BM_WalkerStep(benchmark::State& state) {
  const TaskBundle task = build_task("walker_flat", 1);
  Simulator sim(task.morphology, task.terrain, SimConfig{});
  SystemState s = task.initial_state;
  const Eigen::VectorXd u =
      Eigen::VectorXd::Constant(task.morphology.muscle_count(), 0.2);
  for (auto _ : state) {
    sim.step(s, u);
    benchmark::DoNotOptimize(s.joints.q.data());
  }
}
BENCHMARK(BM_WalkerStep);

void BM_WalkerMassMatrix(benchmark::State& state) {
  const TaskBundle task = build_task("walker_flat", 1);
  Kinematics kin;
  Eigen::MatrixXd M;
  forward_kinematics(task.morphology, task.initial_state.joints.q,
                     task.initial_state.joints.qdot, kin);
  for (auto _ : state) {
    mass_matrix(task.morphology, kin, M);
    benchmark::DoNotOptimize(M.data());
  }
}
BENCHMARK(BM_WalkerMassMatrix);

}  // namespace
