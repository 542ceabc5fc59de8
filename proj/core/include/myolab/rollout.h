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

#ifndef MYOLAB_ROLLOUT_H_
#define MYOLAB_ROLLOUT_H_

#include <functional>
#include <string>
#include <vector>

#include "myolab/reward.h"
#include "myolab/sim.h"

namespace myolab {

// Row k holds the state after step k, the control applied during step k,
// and the reward evaluated on that pair.
struct TrajectoryStep {
  SystemState state;
  Eigen::VectorXd control;
  Eigen::VectorXd term_values;
  double reward_total = 0.0;
};

struct Trajectory {
  SystemState initial_state;
  std::vector<TrajectoryStep> steps;
  std::vector<std::string> term_names;
  double dt = 0.0;          // uniform row spacing (one sim step)
  bool truncated = false;   // non-finite state encountered
  int truncated_at = -1;

  double duration() const { return dt * static_cast<double>(steps.size()); }
};

using Policy = std::function<Eigen::VectorXd(const SystemState&)>;

// Rolls the policy for `steps` sim steps, recording per-term reward values.
// A non-finite state (or a reward term that stops being finite) truncates
// the trajectory and sets the flag. Policies returning the wrong dimension
// throw SimError. record_stride > 1 keeps every stride-th row (reward
// evaluated at the recording cadence); the loop records one row per control
// step this way.
Trajectory rollout(Simulator& sim, FeatureExtractor& extractor,
                   const Policy& policy, const SystemState& s0, int steps,
                   const RewardProgram& program, int record_stride = 1);

// CSV with one named column per quantity: t, q*, qdot*, a*, u*, object pose
// when present, per-term reward values, and the weighted total. Values are
// shortest-round-trip doubles so re-reading is exact.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const Morphology& morphology);

Trajectory read_trajectory_csv(const std::string& path,
                               const Morphology& morphology);

}  // namespace myolab

#endif  // MYOLAB_ROLLOUT_H_
