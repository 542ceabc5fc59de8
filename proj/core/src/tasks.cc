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

#include "myolab/tasks.h"

#include <cmath>

#include "myolab/util.h"

namespace myolab {

namespace {

constexpr double kThigh = 0.45;
constexpr double kShank = 0.45;
constexpr double kSoleDrop = 0.05;

LinkSpec body_link(const std::string& name, int parent,
                   const Eigen::Vector2d& attach, const Eigen::Vector2d& tip,
                   double mass, double q_min, double q_max) {
  LinkSpec l;
  l.name = name;
  l.joint = JointType::kRevolute;
  l.parent = parent;
  l.attach = attach;
  l.tip = tip;
  l.com = 0.5 * tip;
  l.mass = mass;
  l.inertia = mass * tip.squaredNorm() / 12.0;  // slender rod about COM
  l.q_min = q_min;
  l.q_max = q_max;
  return l;
}

// Adds one leg (thigh, shank, foot) under the torso. Returns the thigh index.
int add_leg(Morphology& m, const std::string& side, int torso) {
  const int thigh = static_cast<int>(m.links.size());
  m.links.push_back(body_link("thigh_" + side, torso, {0, 0}, {0, -kThigh},
                              7.0, -0.9, 1.3));
  m.links.push_back(body_link("shank_" + side, thigh, {0, -kThigh},
                              {0, -kShank}, 3.5, -2.2, 0.02));
  LinkSpec foot = body_link("foot_" + side, thigh + 1, {0, -kShank},
                            {0.17, -kSoleDrop}, 1.0, -0.8, 0.8);
  foot.com = Eigen::Vector2d(0.04, -0.04);
  foot.inertia = 0.005;
  m.links.push_back(foot);
  const int foot_idx = thigh + 2;
  m.contacts.push_back({"heel_" + side, foot_idx, {-0.09, -kSoleDrop}});
  m.contacts.push_back({"toe_" + side, foot_idx, {0.17, -kSoleDrop}});
  return thigh;
}

struct MuscleDef {
  std::string name;
  std::vector<std::pair<int, double>> arms;  // (joint, moment arm)
  double f_max;
};

void install_muscles(Morphology& m, const std::vector<MuscleDef>& defs,
                     const MuscleParams& base) {
  const int nu = static_cast<int>(defs.size());
  m.moment_arms = Eigen::MatrixXd::Zero(nu, m.dof());
  m.rest_lengths = Eigen::VectorXd::Constant(nu, base.l_opt);
  m.muscle_params.assign(static_cast<size_t>(nu), base);
  m.muscle_names.clear();
  for (int i = 0; i < nu; ++i) {
    const MuscleDef& d = defs[static_cast<size_t>(i)];
    m.muscle_names.push_back(d.name);
    m.muscle_params[static_cast<size_t>(i)].f_max = d.f_max;
    for (const auto& [joint, arm] : d.arms) m.moment_arms(i, joint) = arm;
  }
}

}  // namespace

Morphology make_walker() {
  Morphology m;
  m.name = "walker7";

  LinkSpec bx;
  bx.name = "base_x";
  bx.joint = JointType::kPrismaticX;
  m.links.push_back(bx);
  LinkSpec by;
  by.name = "base_y";
  by.joint = JointType::kPrismaticY;
  by.parent = 0;
  m.links.push_back(by);
  m.links.push_back(body_link("torso", 1, {0, 0}, {0, 0.5}, 30.0, -1.5, 1.5));

  const int hip_l = add_leg(m, "l", 2);   // links 3,4,5
  const int hip_r = add_leg(m, "r", 2);   // links 6,7,8
  const int knee_l = hip_l + 1, ankle_l = hip_l + 2;
  const int knee_r = hip_r + 1, ankle_r = hip_r + 2;

  MuscleParams base;
  base.l_opt = 0.3;
  base.width = 0.5;
  base.v_max = 1.0;
  base.k_passive = 100.0;
  base.tau_act = 0.015;
  base.tau_deact = 0.05;
  base.f_max = 1000.0;
  m.rest_lengths = Eigen::VectorXd();

  std::vector<MuscleDef> defs;
  for (const auto& [side, hip, knee, ankle] :
       {std::tuple{"l", hip_l, knee_l, ankle_l},
        std::tuple{"r", hip_r, knee_r, ankle_r}}) {
    const std::string s = side;
    defs.push_back({"hip_flexor_" + s, {{hip, 0.06}}, 2000});
    defs.push_back({"hip_extensor_" + s, {{hip, -0.06}}, 2000});
    defs.push_back({"knee_extensor_" + s, {{knee, 0.05}}, 1500});
    defs.push_back({"knee_flexor_" + s, {{knee, -0.05}}, 1200});
    defs.push_back({"ankle_dorsiflexor_" + s, {{ankle, 0.04}}, 800});
    defs.push_back({"ankle_plantarflexor_" + s, {{ankle, -0.04}}, 2400});
    defs.push_back({"hamstring_" + s, {{hip, -0.05}, {knee, -0.04}}, 1200});
    defs.push_back({"rectus_" + s, {{hip, 0.05}, {knee, 0.04}}, 1200});
  }
  install_muscles(m, defs, base);

  m.posture_indices = {hip_l, knee_l, ankle_l, hip_r, knee_r, ankle_r};
  m.torso_link = 2;
  m.stand_height = 0.94;
  m.fall_height = 0.5;
  m.validate();
  return m;
}

Morphology make_arm() {
  Morphology m;
  m.name = "arm3";

  m.links.push_back(
      body_link("upper_arm", -1, {0, 1.0}, {0, -0.35}, 2.0, -2.2, 2.2));
  m.links.push_back(
      body_link("forearm", 0, {0, -0.35}, {0, -0.30}, 1.3, -2.4, 2.4));
  m.links.push_back(
      body_link("hand", 1, {0, -0.30}, {0, -0.15}, 0.5, -1.6, 1.6));

  MuscleParams base;
  base.l_opt = 0.25;
  base.width = 0.6;
  base.v_max = 0.8;
  base.k_passive = 50.0;
  base.tau_act = 0.015;
  base.tau_deact = 0.05;

  std::vector<MuscleDef> defs = {
      {"shoulder_flexor", {{0, 0.05}}, 800},
      {"shoulder_extensor", {{0, -0.05}}, 800},
      {"elbow_flexor", {{1, 0.04}}, 500},
      {"elbow_extensor", {{1, -0.04}}, 500},
      {"wrist_flexor", {{2, 0.025}}, 200},
      {"wrist_extensor", {{2, -0.025}}, 200},
  };
  install_muscles(m, defs, base);

  m.posture_indices = {0, 1, 2};
  m.torso_link = 0;
  m.end_effector = EndEffector{2, {0, -0.15}};
  m.stand_height = 1.0;
  m.fall_height = -kUnlimited;  // manipulation tasks never "fall"
  m.validate();
  return m;
}

Morphology make_pendulum(double length, double mass) {
  Morphology m;
  m.name = "pendulum";
  m.links.push_back(body_link("rod", -1, {0, 0}, {0, -length}, mass,
                              -kUnlimited, kUnlimited));
  m.moment_arms = Eigen::MatrixXd::Zero(0, 1);
  m.rest_lengths = Eigen::VectorXd::Zero(0);
  m.torso_link = 0;
  m.stand_height = 0.0;
  m.validate();
  return m;
}

std::vector<std::string> task_catalog() {
  return {"walker_flat", "walker_slope", "walker_rough",
          "walker_injured", "arm_reach", "arm_reorient"};
}

double terrain_height(const Terrain& terrain, double x) {
  if (!std::isfinite(x)) throw SimError("terrain_height: non-finite x");
  return terrain.height(x);
}

namespace {

SystemState walker_initial_state(const Morphology& m) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(m.dof());
  // near-straight stance; base height chosen so soles rest on the ground
  q[1] = 0.945;
  q[3] = 0.05;   // hip_l
  q[4] = -0.1;   // knee_l
  q[5] = 0.05;   // ankle_l
  q[6] = 0.05;   // hip_r
  q[7] = -0.1;
  q[8] = 0.05;
  SystemState s;
  s.joints.q = q;
  s.joints.qdot = Eigen::VectorXd::Zero(m.dof());
  s.muscles.a = Eigen::VectorXd::Constant(m.muscle_count(), 0.05);
  muscle_geometry(m, s.joints.q, s.joints.qdot, s.muscles.l, s.muscles.v);
  return s;
}

SystemState arm_initial_state(const Morphology& m) {
  Eigen::VectorXd q(3);
  q << 0.05, -0.1, 0.0;
  SystemState s;
  s.joints.q = q;
  s.joints.qdot = Eigen::VectorXd::Zero(3);
  s.muscles.a = Eigen::VectorXd::Zero(m.muscle_count());
  muscle_geometry(m, s.joints.q, s.joints.qdot, s.muscles.l, s.muscles.v);
  return s;
}

}  // namespace

TaskBundle build_task(const std::string& task_id, uint64_t seed) {
  TaskBundle b;
  b.spec.task_id = task_id;
  b.spec.seed = seed;

  if (task_id == "walker_flat" || task_id == "walker_slope" ||
      task_id == "walker_rough" || task_id == "walker_injured") {
    b.morphology = make_walker();
    b.spec.morphology_preset = b.morphology.name;
    b.spec.locomotion = true;
    b.spec.success_threshold = 1.0;
    if (task_id == "walker_slope") {
      b.terrain = Terrain::slope(0.1);
      b.spec.motion_description =
          "Walk forward in a straight line up the sloped ground, keeping the "
          "torso upright and the gait stable.";
    } else if (task_id == "walker_rough") {
      b.terrain = Terrain::rough(seed);
      b.spec.motion_description =
          "Walk forward in a straight line across uneven ground, keeping the "
          "torso upright and the gait stable.";
    } else {
      b.terrain = Terrain::flat();
      b.spec.motion_description =
          "Walk forward in a straight line on flat ground, keeping the torso "
          "upright and the gait stable.";
    }
    if (task_id == "walker_injured") {
      b.spec.motion_description =
          "Walk forward in a straight line on flat ground despite weakened "
          "right hamstring and calf muscles.";
      // right-side hamstring and plantarflexor analogs weakened to 0.3x
      for (int i = 0; i < b.morphology.muscle_count(); ++i) {
        const std::string& name = b.morphology.muscle_names[static_cast<size_t>(i)];
        if (name == "hamstring_r" || name == "ankle_plantarflexor_r") {
          b.spec.injuries.push_back({i, 0.3});
        }
      }
      for (const auto& inj : b.spec.injuries) {
        b.morphology.muscle_params[static_cast<size_t>(inj.muscle)].f_max *=
            inj.scale;
      }
    }
    b.initial_state = walker_initial_state(b.morphology);
  } else if (task_id == "arm_reach" || task_id == "arm_reorient") {
    b.morphology = make_arm();
    b.spec.morphology_preset = b.morphology.name;
    b.terrain = Terrain::flat();
    b.spec.locomotion = false;
    b.spec.success_threshold = -0.05;
    b.initial_state = arm_initial_state(b.morphology);
    if (task_id == "arm_reach") {
      b.spec.target_position = Eigen::Vector2d(0.45, 0.85);
      b.spec.motion_description =
          "Reach the marked target point with the arm tip and hold it there "
          "smoothly.";
    } else {
      b.spec.target_position = Eigen::Vector2d(0.15, 1.05);
      b.spec.target_angle = 0.8;
      b.spec.motion_description =
          "Grasp the object and move it to the marked target pose, matching "
          "both position and orientation.";
      ObjectState obj;
      obj.x = 0.32;
      obj.y = 0.72;
      obj.angle = 0.0;
      b.initial_state.object = obj;
    }
  } else {
    throw SimError("unknown task id: " + task_id);
  }
  b.spec.terrain = b.terrain;
  return b;
}

std::string default_program_text(const std::string& task_id) {
  if (task_id == "arm_reach" || task_id == "arm_reorient") {
    return "term target_position_error { exp(-4 * target_position_error) } @ 1\n";
  }
  return
      "term height { exp(-8 * abs(height - 0.94)) } @ 2\n"
      "term balance { exp(-4 * abs(balance)) } @ 1\n"
      "term torso_uprightness { torso_uprightness } @ 1\n";
}

}  // namespace myolab
