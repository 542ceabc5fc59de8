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

#ifndef MYOLAB_CONTROL_H_
#define MYOLAB_CONTROL_H_

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "myolab/reward.h"
#include "myolab/rollout.h"
#include "myolab/sim.h"

namespace myolab {

// Target over the posture coordinates I_z only; dimension d_z << d_u.
using PostureTarget = Eigen::VectorXd;

struct PlannerConfig {
  int horizon = 10;              // H, in control steps
  int n_samples = 64;
  double noise_sigma = 0.15;     // rad
  double temperature = 1.0;      // MPPI lambda > 0
  double instant_fraction = 0.25;
  int replan_interval = 5;       // control steps between plans
  double k_bar = 1.0e6;          // global gain scalar of the low-level law
  int jobs = 1;

  void validate() const;
};

// Restriction of q to the posture indices I_z.
PostureTarget posture_map(const Morphology& m, const SystemState& state);

// Candidate 0 is exactly z_mean. Of the rest, ceil(instant_fraction * n)
// are sampled around the current posture (instant rollouts, for disturbance
// recovery) and the remainder around z_mean (warm start). All candidates are
// clamped to the joint limits.
std::vector<PostureTarget> sample_candidates(const PostureTarget& z_mean,
                                             const SystemState& state,
                                             const Morphology& m,
                                             const PlannerConfig& config,
                                             std::mt19937_64& rng);

// Morphology-aware proportional force law. Per-actuator gain
//   K_i = k_bar * sum_{j in I_z} |Jm(i,j) * (z*_j - q_j)|,
// desired force f*_i = min(0, K_i (l*_i - l_i)) with l* the length map at q
// with the I_z entries replaced by z*, and command u_i = clamp(-f*_i / f_max).
Eigen::VectorXd low_level_control(const SystemState& state,
                                  const PostureTarget& z_star,
                                  const Morphology& m, double k_bar);

struct MppiResult {
  PostureTarget z_star;
  Eigen::VectorXd weights;  // per candidate; NaN-cost candidates get 0
};

// Softmax combination z* = sum_j w_j z_j with w_j ~ exp(-(C_j - C_min)/lambda).
// Throws SimError when every cost is NaN.
MppiResult mppi_combine(const std::vector<PostureTarget>& candidates,
                        const std::vector<double>& costs, double temperature);

struct PlanResult {
  PostureTarget z_star;
  std::vector<PostureTarget> candidates;
  std::vector<double> costs;
  int optimization_dim = 0;  // d_z, independent of H and d_u
};

// Planner core over an arbitrary candidate cost; the simulation-backed
// planner and the test oracles share this path.
PlanResult plan_with_cost(const PostureTarget& z_mean, const SystemState& state,
                          const Morphology& m, const PlannerConfig& config,
                          const std::function<double(const PostureTarget&)>& cost,
                          std::mt19937_64& rng);

// Sampling MPC over posture space: every candidate is rolled out for
// `horizon` control steps under the low-level law, accumulating cost -sum r.
// Owns one simulator/extractor pair per worker so candidate evaluations can
// run in parallel without changing the result.
class Planner {
 public:
  Planner(const Morphology& m, const Terrain& terrain, const SimConfig& sim,
          const TaskContext& context, const PlannerConfig& config);

  PlanResult plan(const SystemState& state, const RewardProgram& program,
                  const PostureTarget& z_mean, std::mt19937_64& rng);

  const PlannerConfig& config() const { return config_; }

 private:
  double candidate_cost(int worker, const SystemState& state,
                        const PostureTarget& z, const RewardProgram& program);

  PlannerConfig config_;
  std::vector<std::unique_ptr<Simulator>> sims_;
  std::vector<std::unique_ptr<FeatureExtractor>> extractors_;
};

// Stateful MPC policy: queried every sim step, recomputes the low-level
// command every control_substeps sim steps, and replans every
// replan_interval control steps (warm-started from the previous z*).
class MpcPolicy {
 public:
  MpcPolicy(const Morphology& m, const Terrain& terrain, const SimConfig& sim,
            const TaskContext& context, const PlannerConfig& config,
            const RewardProgram& program, uint64_t seed);

  Eigen::VectorXd operator()(const SystemState& state);

  int plan_calls() const { return plan_calls_; }
  int optimization_dim() const { return optimization_dim_; }

 private:
  const Morphology& morphology_;
  Planner planner_;
  RewardProgram program_;
  std::mt19937_64 rng_;
  PostureTarget z_star_, z_mean_;
  Eigen::VectorXd u_cached_;
  int control_substeps_;
  long sim_step_ = 0;
  long control_step_ = 0;
  int plan_calls_ = 0;
  int optimization_dim_ = 0;
};

}  // namespace myolab

#endif  // MYOLAB_CONTROL_H_
