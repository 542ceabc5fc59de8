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

#include "myolab/control.h"

#include <cmath>
#include <random>

#include "doctest.h"
#include "myolab/tasks.h"
#include "myolab/util.h"

namespace {

using namespace myolab;

TEST_CASE("posture map restricts q to the posture indices") {
  Morphology m = make_arm();
  Simulator sim(m, Terrain::flat(), SimConfig{});
  Eigen::VectorXd q(3);
  q << 0.1, 0.2, 0.3;
  SystemState s = sim.make_state(q);

  // all joints
  CHECK(posture_map(m, s) == q);

  // subset {0, 2}
  m.posture_indices = {0, 2};
  const PostureTarget z = posture_map(m, s);
  REQUIRE(z.size() == 2);
  CHECK(z[0] == 0.1);
  CHECK(z[1] == 0.3);

  // pure: the state is untouched
  CHECK(s.joints.q == q);
}

TEST_CASE("candidate sampling contract") {
  const Morphology m = make_arm();
  Simulator sim(m, Terrain::flat(), SimConfig{});
  Eigen::VectorXd q(3);
  q << 0.4, -0.2, 0.1;
  const SystemState s = sim.make_state(q);
  PostureTarget z_mean(3);
  z_mean << 0.0, 0.0, 0.0;

  PlannerConfig config;
  config.n_samples = 16;

  SUBCASE("zero noise collapses candidates onto their means") {
    config.noise_sigma = 0.0;
    config.instant_fraction = 0.25;
    std::mt19937_64 rng(1);
    const auto cands = sample_candidates(z_mean, s, m, config, rng);
    REQUIRE(cands.size() == 16);
    CHECK(cands[0] == z_mean);
    const int n_instant = static_cast<int>(std::ceil(0.25 * 16));
    for (int i = 1; i <= n_instant; ++i) CHECK(cands[i] == q);
    for (size_t i = n_instant + 1; i < cands.size(); ++i) {
      CHECK(cands[i] == z_mean);
    }
  }

  SUBCASE("instant_fraction=1 centers everything on the current posture") {
    config.noise_sigma = 0.0;
    config.instant_fraction = 1.0;
    std::mt19937_64 rng(1);
    const auto cands = sample_candidates(z_mean, s, m, config, rng);
    CHECK(cands[0] == z_mean);  // sample 0 always carries the mean
    for (size_t i = 1; i < cands.size(); ++i) CHECK(cands[i] == q);
  }

  SUBCASE("fixed seed reproduces the candidate set") {
    config.noise_sigma = 0.2;
    std::mt19937_64 rng1(99), rng2(99);
    const auto a = sample_candidates(z_mean, s, m, config, rng1);
    const auto b = sample_candidates(z_mean, s, m, config, rng2);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }

  SUBCASE("candidates respect the joint limits") {
    config.noise_sigma = 5.0;  // huge noise to force clamping
    std::mt19937_64 rng(3);
    const auto cands = sample_candidates(z_mean, s, m, config, rng);
    for (const auto& z : cands) {
      for (int i = 0; i < z.size(); ++i) {
        const LinkSpec& link = m.links[m.posture_indices[i]];
        CHECK(z[i] >= link.q_min);
        CHECK(z[i] <= link.q_max);
      }
    }
  }
}

TEST_CASE("low-level gain law") {
  const Morphology m = make_arm();
  Simulator sim(m, Terrain::flat(), SimConfig{});
  const SystemState s = sim.make_state(Eigen::VectorXd::Zero(3));

  SUBCASE("zero posture error gives exactly zero control") {
    const PostureTarget z = posture_map(m, s);
    const Eigen::VectorXd u = low_level_control(s, z, m, 4e6);
    CHECK(u.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("hand-computed gain: K = 100 * |0.05 * 0.5| = 2.5") {
    // single posture coordinate, single 0.05 moment-arm entry
    Morphology one = make_pendulum(1.0, 1.0);
    one.moment_arms = Eigen::MatrixXd::Constant(1, 1, 0.05);
    one.rest_lengths = Eigen::VectorXd::Constant(1, 0.3);
    one.muscle_params.assign(1, MuscleParams{});
    one.muscle_params[0].f_max = 1.0;  // u = min(1, |f*|)
    one.muscle_names = {"m0"};
    one.posture_indices = {0};
    Simulator sim1(one, Terrain::flat(), SimConfig{});
    const SystemState s1 = sim1.make_state(Eigen::VectorXd::Zero(1));
    PostureTarget z(1);
    z << 0.5;
    // K (l* - l) = 2.5 * (-0.05 * 0.5) = -0.0625; u = 0.0625
    const Eigen::VectorXd u = low_level_control(s1, z, one, 100.0);
    CHECK(u[0] == doctest::Approx(2.5 * 0.025).epsilon(1e-12));

    // clamp law: positive length error gives zero desired force
    PostureTarget back(1);
    back << -0.5;  // l* - l = +0.025 > 0 -> f* = 0
    CHECK(low_level_control(s1, back, one, 100.0)[0] == 0.0);
  }

  SUBCASE("force law invariants over random inputs") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> angles(-1.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::VectorXd q(3);
      q << angles(rng), angles(rng), angles(rng);
      SystemState st = sim.make_state(q);
      PostureTarget z(3);
      z << angles(rng), angles(rng), angles(rng);
      const Eigen::VectorXd u = low_level_control(st, z, m, 4e6);
      for (int i = 0; i < u.size(); ++i) {
        CHECK(u[i] >= 0.0);  // f* <= 0 implies commands in [0,1]
        CHECK(u[i] <= 1.0);
      }
    }
  }
}

TEST_CASE("mppi combination") {
  PostureTarget a(1), b(1);
  a << 0.0;
  b << 1.0;

  SUBCASE("single candidate is returned unchanged") {
    const MppiResult r = mppi_combine({a}, {3.2}, 1.0);
    CHECK(r.z_star == a);
    CHECK(r.weights[0] == 1.0);
  }

  SUBCASE("two candidates at costs (0, lambda ln 2) weigh 2/3 : 1/3") {
    const double lambda = 1.0;
    const MppiResult r = mppi_combine({a, b}, {0.0, lambda * std::log(2.0)},
                                      lambda);
    CHECK(std::abs(r.weights[0] - 2.0 / 3.0) < 1e-12);
    CHECK(std::abs(r.weights[1] - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(r.z_star[0] - 1.0 / 3.0) < 1e-12);
  }

  SUBCASE("softmax shift invariance") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> costs(-5.0, 5.0);
    std::vector<PostureTarget> cands;
    std::vector<double> c0, c1;
    for (int i = 0; i < 16; ++i) {
      PostureTarget z(2);
      z << costs(rng), costs(rng);
      cands.push_back(z);
      c0.push_back(costs(rng));
    }
    const double shift = 123.456;
    for (double c : c0) c1.push_back(c + shift);
    const MppiResult r0 = mppi_combine(cands, c0, 0.7);
    const MppiResult r1 = mppi_combine(cands, c1, 0.7);
    CHECK((r0.z_star - r1.z_star).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("NaN candidates are excluded; all-NaN is an error") {
    const double nan = std::nan("");
    const MppiResult r = mppi_combine({a, b}, {nan, 1.0}, 1.0);
    CHECK(r.weights[0] == 0.0);
    CHECK(r.z_star == b);
    CHECK_THROWS_AS(mppi_combine({a, b}, {nan, nan}, 1.0), SimError);
  }
}

TEST_CASE("planner on a 1-D quadratic cost against a grid oracle") {
  // single-joint chain; cost evaluated directly on the candidate
  Morphology one = make_pendulum(1.0, 1.0);
  one.moment_arms = Eigen::MatrixXd::Constant(1, 1, 0.05);
  one.rest_lengths = Eigen::VectorXd::Constant(1, 0.3);
  one.muscle_params.assign(1, MuscleParams{});
  one.muscle_names = {"m0"};
  one.posture_indices = {0};
  Simulator sim(one, Terrain::flat(), SimConfig{});
  const SystemState s = sim.make_state(Eigen::VectorXd::Zero(1));

  auto cost = [](const PostureTarget& z) {
    return (z[0] - 0.3) * (z[0] - 0.3);
  };

  // brute-force grid oracle over the same interval
  double best_z = 0.0, best_c = 1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double z = -1.0 + 2.0 * i / 20000.0;
    const double c = (z - 0.3) * (z - 0.3);
    if (c < best_c) {
      best_c = c;
      best_z = z;
    }
  }
  CHECK(std::abs(best_z - 0.3) < 1e-3);

  PlannerConfig config;
  config.n_samples = 64;
  config.noise_sigma = 0.15;
  PostureTarget z_mean(1);
  z_mean << 0.0;

  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(splitmix64(seed));
    const PlanResult r = plan_with_cost(z_mean, s, one, config, cost, rng);
    CHECK(std::abs(r.z_star[0] - best_z) < config.noise_sigma);
    CHECK(r.optimization_dim == 1);

    // sample 0 carries the mean: the best candidate can only improve on it
    double min_cost = r.costs[0];
    for (double c : r.costs) min_cost = std::min(min_cost, c);
    CHECK(min_cost <= r.costs[0]);
  }
}

TEST_CASE("planner determinism and optimization dimension") {
  const TaskBundle task = build_task("arm_reach", 1);
  TaskContext context;
  context.spec = task.spec;
  const RewardProgram program = parse_program(default_program_text("arm_reach"));

  PlannerConfig config;
  config.n_samples = 8;
  config.horizon = 3;

  auto plan_once = [&](int jobs) {
    PlannerConfig c = config;
    c.jobs = jobs;
    Planner planner(task.morphology, task.terrain, SimConfig{}, context, c);
    std::mt19937_64 rng(44);
    return planner.plan(task.initial_state, program,
                        posture_map(task.morphology, task.initial_state), rng);
  };
  const PlanResult a = plan_once(1);
  const PlanResult b = plan_once(1);
  CHECK(a.z_star == b.z_star);
  CHECK(a.costs == b.costs);

  // worker count must not change the outcome
  const PlanResult c = plan_once(4);
  CHECK(a.z_star == c.z_star);
  CHECK(a.costs == c.costs);

  // optimization variables number d_z, independent of H and d_u
  CHECK(a.optimization_dim == 3);
  PlannerConfig wide = config;
  wide.horizon = 9;
  Planner planner(task.morphology, task.terrain, SimConfig{}, context, wide);
  std::mt19937_64 rng(44);
  CHECK(planner
            .plan(task.initial_state, program,
                  posture_map(task.morphology, task.initial_state), rng)
            .optimization_dim == 3);
}

TEST_CASE("mpc policy replans on schedule") {
  const TaskBundle task = build_task("arm_reach", 1);
  TaskContext context;
  context.spec = task.spec;
  const RewardProgram program = parse_program(default_program_text("arm_reach"));
  SimConfig sim_config;

  PlannerConfig config;
  config.n_samples = 4;
  config.horizon = 2;
  config.replan_interval = 1000000;  // never replan after the first call

  MpcPolicy policy(task.morphology, task.terrain, sim_config, context, config,
                   program, 7);
  Simulator sim(task.morphology, task.terrain, sim_config);
  FeatureExtractor extractor(task.morphology, task.terrain, context);
  rollout(
      sim, extractor, [&](const SystemState& s) { return policy(s); },
      task.initial_state, 300, program);
  CHECK(policy.plan_calls() == 1);

  PlannerConfig frequent = config;
  frequent.replan_interval = 5;
  MpcPolicy policy2(task.morphology, task.terrain, sim_config, context,
                    frequent, program, 7);
  Simulator sim2(task.morphology, task.terrain, sim_config);
  rollout(
      sim2, extractor, [&](const SystemState& s) { return policy2(s); },
      task.initial_state, 300, program);
  // 300 steps = 30 control steps = 6 plans at interval 5
  CHECK(policy2.plan_calls() == 6);
}

TEST_CASE("arm posture hold converges from a 0.5 rad error") {
  // pinned regression: mean |q - z*| < 0.1 rad within 2 s at fixed seed
  const Morphology m = make_arm();
  Terrain terrain = Terrain::flat();
  SimConfig sim_config;
  TaskSpec spec;
  spec.task_id = "arm_hold";
  spec.locomotion = false;
  TaskContext context;
  context.spec = spec;

  Eigen::VectorXd target(3);
  target << 0.3, -0.4, 0.2;
  const std::string text =
      "term hold { -(abs(joint_angle(0) - 0.3) + abs(joint_angle(1) + 0.4) + "
      "abs(joint_angle(2) - 0.2)) } @ 1\n";
  const RewardProgram program = parse_program(text);

  Eigen::VectorXd q0 = target;
  q0[0] += 0.5;
  q0[1] -= 0.5;
  q0[2] += 0.5;

  PlannerConfig config;  // defaults
  MpcPolicy policy(m, terrain, sim_config, context, config, program, 123);
  Simulator sim(m, terrain, sim_config);
  FeatureExtractor extractor(m, terrain, context);
  SystemState s0 = sim.make_state(q0);

  const double initial_error = (q0 - target).cwiseAbs().mean();
  CHECK(initial_error == doctest::Approx(0.5));

  const Trajectory traj = rollout(
      sim, extractor, [&](const SystemState& s) { return policy(s); }, s0,
      2000, program, 10);
  REQUIRE(!traj.truncated);
  const Eigen::VectorXd q_final = traj.steps.back().state.joints.q;
  const double final_error = (q_final - target).cwiseAbs().mean();
  CHECK(final_error < 0.1);
}

}  // namespace
