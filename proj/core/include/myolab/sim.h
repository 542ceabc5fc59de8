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

#ifndef MYOLAB_SIM_H_
#define MYOLAB_SIM_H_

#include <Eigen/Dense>
#include <optional>

#include "myolab/chain.h"
#include "myolab/terrain.h"

namespace myolab {

struct JointState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
};

struct MuscleState {
  Eigen::VectorXd a;  // activations in [0,1]
  Eigen::VectorXd l;  // lengths (m), consistent with q after every step
  Eigen::VectorXd v;  // length rates (m/s)
};

// Pose of a kinematically tracked manipulation object. Once the end
// effector comes within the attach radius the object is carried rigidly.
struct ObjectState {
  double x = 0.0, y = 0.0, angle = 0.0;
  bool grasped = false;
  Eigen::Vector2d grab_offset{0, 0};  // object origin in end-effector frame
  double grab_angle = 0.0;
};

struct SystemState {
  JointState joints;
  MuscleState muscles;
  double t = 0.0;
  std::optional<ObjectState> object;

  bool finite() const;
};

struct SimConfig {
  double dt = 1e-3;
  double gravity = 9.81;            // magnitude, acts along -y
  double contact_stiffness = 3e4;   // N/m
  double contact_damping = 300.0;   // N s/m
  double friction_coeff = 1.0;
  Eigen::VectorXd external_torque;  // tau_ext; empty means zero
  double limit_stiffness = 600.0;   // soft joint limit spring (N m/rad)
  double limit_damping = 20.0;
  // passive viscous friction on revolute joints (N m s/rad); set to zero
  // for frictionless experiments
  double joint_damping = 1.0;
  int control_substeps = 10;        // sim steps per control step (100 Hz)
};

struct StepFlags {
  bool joint_limit_hit = false;
  bool control_clamped = false;
};

// Owns the morphology/terrain/config plus scratch buffers so stepping does
// no allocation. One simulator per rollout; clone state freely.
class Simulator {
 public:
  Simulator(const Morphology& morphology, const Terrain& terrain,
            const SimConfig& config);

  const Morphology& morphology() const { return morphology_; }
  const Terrain& terrain() const { return terrain_; }
  const SimConfig& config() const { return config_; }

  // Initial state at configuration q with zero velocity and activation a0.
  SystemState make_state(const Eigen::VectorXd& q, double a0 = 0.0) const;

  // Semi-implicit Euler step under controls u in [0,1]^{d_u}. Throws
  // SimError on dimension mismatch or singular mass matrix.
  void step(SystemState& state, const Eigen::VectorXd& u,
            StepFlags* flags = nullptr);

  // Kinematics of the state passed to the most recent step()/kinematics()
  // call; refreshed in place.
  const Kinematics& kinematics(const SystemState& state);

 private:
  Morphology morphology_;
  Terrain terrain_;
  SimConfig config_;

  Kinematics kin_;
  Eigen::MatrixXd mass_;
  Eigen::VectorXd bias_, tau_, fm_, u_clamped_;
  Eigen::MatrixXd contact_jac_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

// One-off step with flat terrain implied; convenience for tests and simple
// callers. Prefer Simulator in loops.
SystemState dynamics_step(const SystemState& state, const Eigen::VectorXd& u,
                          const Morphology& morphology, const SimConfig& config,
                          StepFlags* flags = nullptr);

}  // namespace myolab

#endif  // MYOLAB_SIM_H_
