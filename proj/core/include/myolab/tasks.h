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

#ifndef MYOLAB_TASKS_H_
#define MYOLAB_TASKS_H_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "myolab/sim.h"
#include "myolab/terrain.h"

namespace myolab {

struct InjurySpec {
  int muscle = 0;
  double scale = 1.0;  // f_max multiplier in [0,1]
};

struct TaskSpec {
  std::string task_id;
  std::string morphology_preset;
  Terrain terrain;
  double horizon_seconds = 10.0;
  std::string motion_description;
  std::optional<Eigen::Vector2d> target_position;  // manipulation only
  std::optional<double> target_angle;
  std::vector<InjurySpec> injuries;
  bool locomotion = true;
  double success_threshold = 1.0;  // oracle-score cut for task_success
  uint64_t seed = 0;
};

struct TaskBundle {
  Morphology morphology;
  Terrain terrain;
  SystemState initial_state;
  TaskSpec spec;
};

// ---------------------------------------------------------------------------
// Morphology presets. Over-actuated on purpose: more muscles than joints.
// ---------------------------------------------------------------------------

// 7-link planar biped (torso, 2x thigh/shank/foot) on a 3-dof floating base;
// 16 muscles including biarticular hamstring/rectus pairs per leg.
Morphology make_walker();

// 3-link planar arm fixed at shoulder height; 6 muscles (antagonist pair per
// joint). Used both for manipulation tasks and as the 3-link test chain.
Morphology make_arm();

// Single passive link, no muscles. q = 0 hangs at the stable equilibrium.
Morphology make_pendulum(double length = 1.0, double mass = 1.0);

// ---------------------------------------------------------------------------
// Task catalog
// ---------------------------------------------------------------------------

std::vector<std::string> task_catalog();

// Deterministic given (task_id, seed). Throws SimError on unknown ids.
TaskBundle build_task(const std::string& task_id, uint64_t seed);

// Built-in initial reward program for a task (DSL text).
std::string default_program_text(const std::string& task_id);

// Wraps Terrain::height for the task-facing interface.
double terrain_height(const Terrain& terrain, double x);

}  // namespace myolab

#endif  // MYOLAB_TASKS_H_
