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

#include "myolab/sim.h"

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "myolab/rollout.h"
#include "myolab/tasks.h"
#include "myolab/util.h"

namespace {

using namespace myolab;

// Independent energy oracle for the passive pendulum: kinetic energy from
// the COM motion plus gravitational potential of the COM height.
double pendulum_energy(const Morphology& m, const SystemState& s,
                       double gravity) {
  Kinematics kin;
  forward_kinematics(m, s.joints.q, s.joints.qdot, kin);
  const LinkSpec& rod = m.links[0];
  const double t = 0.5 * rod.mass * kin.com_vel[0].squaredNorm() +
                   0.5 * rod.inertia * kin.omega[0] * kin.omega[0];
  const double v = rod.mass * gravity * kin.com_pos[0].y();
  return t + v;
}

SimConfig no_contact_config() {
  SimConfig c;
  c.contact_stiffness = 0.0;
  c.contact_damping = 0.0;
  return c;
}

TEST_CASE("pendulum rests at the stable equilibrium") {
  const Morphology m = make_pendulum(1.0, 1.0);
  Simulator sim(m, Terrain::flat(), no_contact_config());
  SystemState s = sim.make_state(Eigen::VectorXd::Zero(1));
  const SystemState before = s;
  for (int i = 0; i < 100; ++i) sim.step(s, Eigen::VectorXd::Zero(0));
  CHECK(std::abs(s.joints.q[0] - before.joints.q[0]) <= 1e-12);
  CHECK(std::abs(s.joints.qdot[0]) <= 1e-12);
}

TEST_CASE("passive pendulum conserves energy to within 1%") {
  const Morphology m = make_pendulum(1.0, 1.0);
  const SimConfig config = no_contact_config();
  Simulator sim(m, Terrain::flat(), config);
  SystemState s = sim.make_state(Eigen::VectorXd::Constant(1, M_PI / 4));
  const double e0 = pendulum_energy(m, s, config.gravity);
  double max_drift = 0.0;
  const int steps = static_cast<int>(5.0 / config.dt);
  for (int i = 0; i < steps; ++i) {
    sim.step(s, Eigen::VectorXd::Zero(0));
    max_drift =
        std::max(max_drift, std::abs(pendulum_energy(m, s, config.gravity) - e0));
  }
  // scale: energy swing between the extremes of the motion
  const double scale = 1.0 * config.gravity * 0.5 * (1.0 - std::cos(M_PI / 4));
  CHECK(max_drift / scale < 0.01);
}

TEST_CASE("activated muscle accelerates the joint along its torque") {
  // gravity off isolates the muscle torque
  const Morphology m = make_arm();
  SimConfig config = no_contact_config();
  config.gravity = 0.0;
  Simulator sim(m, Terrain::flat(), config);
  SystemState s = sim.make_state(Eigen::VectorXd::Zero(3));

  // 30 ms: enough for activation to build, well before any joint limit
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.muscle_count());
  u[0] = 1.0;  // shoulder flexor, moment arm +0.05 on joint 0
  for (int i = 0; i < 30; ++i) sim.step(s, u);

  // analytic torque of a tensile force through a positive moment arm
  const double f = muscle_force(s.muscles.l[0], s.muscles.v[0], s.muscles.a[0],
                                m.muscle_params[0]);
  const double torque = -m.moment_arms(0, 0) * f;
  CHECK(torque > 0.0);
  CHECK(s.joints.qdot[0] > 0.0);

  u.setZero();
  u[1] = 1.0;  // antagonist, moment arm -0.05
  SystemState s2 = sim.make_state(Eigen::VectorXd::Zero(3));
  for (int i = 0; i < 30; ++i) sim.step(s2, u);
  CHECK(s2.joints.qdot[0] < 0.0);
}

TEST_CASE("joint limits push back and set the flag") {
  const Morphology m = make_arm();
  SimConfig config = no_contact_config();
  config.gravity = 0.0;
  Simulator sim(m, Terrain::flat(), config);
  Eigen::VectorXd q = Eigen::VectorXd::Zero(3);
  q[2] = m.links[2].q_max + 0.3;
  SystemState s = sim.make_state(q);
  StepFlags flags;
  sim.step(s, Eigen::VectorXd::Zero(m.muscle_count()), &flags);
  CHECK(flags.joint_limit_hit);
  CHECK(s.joints.qdot[2] < 0.0);
}

TEST_CASE("muscle lengths stay consistent with the configuration") {
  const TaskBundle task = build_task("walker_flat", 3);
  Simulator sim(task.morphology, task.terrain, SimConfig{});
  SystemState s = task.initial_state;
  const Eigen::VectorXd u =
      Eigen::VectorXd::Constant(task.morphology.muscle_count(), 0.4);
  for (int i = 0; i < 50; ++i) sim.step(s, u);
  Eigen::VectorXd l, v;
  muscle_geometry(task.morphology, s.joints.q, s.joints.qdot, l, v);
  CHECK((l - s.muscles.l).cwiseAbs().maxCoeff() == 0.0);
  CHECK((v - s.muscles.v).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < task.morphology.muscle_count(); ++i) {
    CHECK(s.muscles.a[i] >= 0.0);
    CHECK(s.muscles.a[i] <= 1.0);
  }
}

TEST_CASE("dynamics_step validates dimensions") {
  const Morphology m = make_arm();
  Simulator sim(m, Terrain::flat(), SimConfig{});
  SystemState s = sim.make_state(Eigen::VectorXd::Zero(3));
  CHECK_THROWS_AS(dynamics_step(s, Eigen::VectorXd::Zero(2), m, SimConfig{}),
                  SimError);
}

TEST_CASE("single rollout step equals one dynamics step") {
  const TaskBundle task = build_task("walker_flat", 1);
  SimConfig config;
  Simulator sim(task.morphology, task.terrain, config);
  TaskContext context;
  context.spec = task.spec;
  FeatureExtractor extractor(task.morphology, task.terrain, context);
  const RewardProgram program;  // empty: total reward 0

  const Policy zero = [&](const SystemState&) {
    return Eigen::VectorXd::Zero(task.morphology.muscle_count());
  };
  const Trajectory traj =
      rollout(sim, extractor, zero, task.initial_state, 1, program);
  REQUIRE(traj.steps.size() == 1);

  Simulator sim2(task.morphology, task.terrain, config);
  SystemState expected = task.initial_state;
  sim2.step(expected, Eigen::VectorXd::Zero(task.morphology.muscle_count()));
  CHECK(traj.steps[0].state.joints.q == expected.joints.q);
  CHECK(traj.steps[0].state.joints.qdot == expected.joints.qdot);
  CHECK(traj.steps[0].state.muscles.a == expected.muscles.a);
  CHECK(traj.steps[0].reward_total == 0.0);
}

TEST_CASE("constant-policy rollouts are bitwise deterministic") {
  const TaskBundle task = build_task("walker_flat", 1);
  TaskContext context;
  context.spec = task.spec;
  const RewardProgram program = parse_program(default_program_text("walker_flat"));
  const Policy constant = [&](const SystemState&) {
    return Eigen::VectorXd::Constant(task.morphology.muscle_count(), 0.3);
  };

  auto run_once = [&]() {
    Simulator sim(task.morphology, task.terrain, SimConfig{});
    FeatureExtractor extractor(task.morphology, task.terrain, context);
    return rollout(sim, extractor, constant, task.initial_state, 500, program);
  };
  const Trajectory a = run_once();
  const Trajectory b = run_once();
  REQUIRE(a.steps.size() == b.steps.size());
  for (size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].state.joints.q == b.steps[i].state.joints.q);
    CHECK(a.steps[i].state.joints.qdot == b.steps[i].state.joints.qdot);
    CHECK(a.steps[i].reward_total == b.steps[i].reward_total);
  }
}

TEST_CASE("non-finite states truncate the rollout") {
  const TaskBundle task = build_task("walker_flat", 1);
  SimConfig config;
  config.dt = 10.0;  // wildly unstable on purpose
  Simulator sim(task.morphology, task.terrain, config);
  TaskContext context;
  context.spec = task.spec;
  FeatureExtractor extractor(task.morphology, task.terrain, context);
  const Policy big = [&](const SystemState&) {
    return Eigen::VectorXd::Constant(task.morphology.muscle_count(), 1.0);
  };
  const Trajectory traj =
      rollout(sim, extractor, big, task.initial_state, 50, RewardProgram{});
  CHECK(traj.truncated);
  CHECK(static_cast<int>(traj.steps.size()) == traj.truncated_at);
  CHECK(traj.steps.size() < 50);
}

TEST_CASE("policies returning the wrong dimension are rejected") {
  const TaskBundle task = build_task("walker_flat", 1);
  Simulator sim(task.morphology, task.terrain, SimConfig{});
  TaskContext context;
  context.spec = task.spec;
  FeatureExtractor extractor(task.morphology, task.terrain, context);
  const Policy bad = [](const SystemState&) { return Eigen::VectorXd::Zero(2); };
  CHECK_THROWS_AS(
      rollout(sim, extractor, bad, task.initial_state, 5, RewardProgram{}),
      SimError);
}

TEST_CASE("trajectory csv round-trips exactly") {
  const TaskBundle task = build_task("arm_reorient", 1);
  Simulator sim(task.morphology, task.terrain, SimConfig{});
  TaskContext context;
  context.spec = task.spec;
  FeatureExtractor extractor(task.morphology, task.terrain, context);
  const RewardProgram program =
      parse_program(default_program_text("arm_reorient"));
  const Policy constant = [&](const SystemState&) {
    return Eigen::VectorXd::Constant(task.morphology.muscle_count(), 0.25);
  };
  const Trajectory traj =
      rollout(sim, extractor, constant, task.initial_state, 200, program, 10);

  const std::string path = "sim_test_traj.csv";
  write_trajectory_csv(path, traj, task.morphology);
  const Trajectory back = read_trajectory_csv(path, task.morphology);
  std::filesystem::remove(path);

  REQUIRE(back.steps.size() == traj.steps.size());
  CHECK(back.term_names == traj.term_names);
  for (size_t i = 0; i < traj.steps.size(); ++i) {
    CHECK(back.steps[i].state.joints.q == traj.steps[i].state.joints.q);
    CHECK(back.steps[i].state.joints.qdot == traj.steps[i].state.joints.qdot);
    CHECK(back.steps[i].state.muscles.a == traj.steps[i].state.muscles.a);
    CHECK(back.steps[i].control == traj.steps[i].control);
    CHECK(back.steps[i].term_values == traj.steps[i].term_values);
    CHECK(back.steps[i].reward_total == traj.steps[i].reward_total);
    REQUIRE(back.steps[i].state.object.has_value());
    CHECK(back.steps[i].state.object->x == traj.steps[i].state.object->x);
    CHECK(back.steps[i].state.object->angle ==
          traj.steps[i].state.object->angle);
  }
}

}  // namespace
