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

#ifndef MYOLAB_CHAIN_H_
#define MYOLAB_CHAIN_H_

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "myolab/muscle.h"

namespace myolab {

inline constexpr double kUnlimited = 1e9;

// Each link owns exactly one joint connecting it to its parent, so the
// number of links equals the number of generalized coordinates. Floating
// bases are modeled as a chain of massless prismatic-x / prismatic-y links
// under the first body.
enum class JointType { kPrismaticX, kPrismaticY, kRevolute };

struct LinkSpec {
  std::string name;
  JointType joint = JointType::kRevolute;
  int parent = -1;               // link index; -1 attaches to the world
  Eigen::Vector2d attach{0, 0};  // joint origin in the parent link frame
  double mass = 0.0;
  double inertia = 0.0;          // about the COM
  Eigen::Vector2d com{0, 0};     // COM in the link frame
  Eigen::Vector2d tip{0, 0};     // segment endpoint, for geometry/rendering
  double q_min = -kUnlimited;
  double q_max = kUnlimited;
};

struct ContactPoint {
  std::string name;
  int link = 0;
  Eigen::Vector2d local{0, 0};
};

struct EndEffector {
  int link = 0;
  Eigen::Vector2d local{0, 0};
};

// Link geometry, mass distribution, muscle routing, and posture coordinates.
// Muscle lengths are affine in q: l = rest_lengths - moment_arms * q, so the
// muscle Jacobian dl/dq = -moment_arms is constant.
struct Morphology {
  std::string name;
  std::vector<LinkSpec> links;
  Eigen::MatrixXd moment_arms;   // d_u x d_q
  Eigen::VectorXd rest_lengths;  // d_u
  std::vector<MuscleParams> muscle_params;
  std::vector<std::string> muscle_names;
  std::vector<ContactPoint> contacts;
  std::vector<int> posture_indices;  // I_z, subset of joint indices
  int torso_link = 0;                // link whose frame provides height/forward readouts
  std::optional<EndEffector> end_effector;
  double object_attach_radius = 0.05;  // m; manipulation grasp engagement
  double stand_height = 0.0;           // nominal torso frame height (m)
  double fall_height = -1.0;           // torso height below this counts as fallen

  int dof() const { return static_cast<int>(links.size()); }
  int muscle_count() const { return static_cast<int>(muscle_params.size()); }
  void validate() const;  // throws SimError on inconsistent dimensions
};

// Per-link world-frame kinematics for one (q, qdot). acc0 terms are the
// velocity-product accelerations (the accelerations with qddot = 0), which
// is all that is needed for the bias forces of a planar chain.
struct Kinematics {
  std::vector<double> ang, omega;
  std::vector<Eigen::Vector2d> pos, vel, acc0;          // link frame origin
  std::vector<Eigen::Vector2d> com_pos, com_vel, com_acc0;
  double total_mass = 0.0;
  Eigen::Vector2d com{0, 0};      // whole-body COM
  Eigen::Vector2d com_vel_total{0, 0};

  void resize(int n);
};

void forward_kinematics(const Morphology& m, const Eigen::VectorXd& q,
                        const Eigen::VectorXd& qdot, Kinematics& kin);

// World position / velocity of a point given in link-local coordinates.
Eigen::Vector2d point_position(const Kinematics& kin, int link,
                               const Eigen::Vector2d& local);
Eigen::Vector2d point_velocity(const Kinematics& kin, int link,
                               const Eigen::Vector2d& local);

// 2 x d_q Jacobian of a point attached to `link`; columns of non-ancestor
// joints are zero.
void point_jacobian(const Morphology& m, const Kinematics& kin, int link,
                    const Eigen::Vector2d& local, Eigen::MatrixXd& jac);

// Joint-space mass matrix, assembled per link from COM Jacobians. Exactly
// symmetric by construction (upper triangle mirrored).
void mass_matrix(const Morphology& m, const Kinematics& kin,
                 Eigen::MatrixXd& M);

// Coriolis, centrifugal, and gravity bias c(q, qdot), with gravity of
// magnitude `gravity` acting along -y. Convention: M qddot + c = tau.
void bias_forces(const Morphology& m, const Kinematics& kin, double gravity,
                 Eigen::VectorXd& c);

// Muscle length map l = l0 - rho q and rate v = -rho qdot.
void muscle_geometry(const Morphology& m, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& qdot, Eigen::VectorXd& l,
                     Eigen::VectorXd& v);

}  // namespace myolab

#endif  // MYOLAB_CHAIN_H_
