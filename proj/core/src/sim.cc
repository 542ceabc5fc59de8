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

#include <algorithm>
#include <cmath>

#include "myolab/util.h"

namespace myolab {

bool SystemState::finite() const {
  return joints.q.allFinite() && joints.qdot.allFinite() &&
         muscles.a.allFinite() && muscles.l.allFinite() &&
         muscles.v.allFinite() && std::isfinite(t);
}

Simulator::Simulator(const Morphology& morphology, const Terrain& terrain,
                     const SimConfig& config)
    : morphology_(morphology), terrain_(terrain), config_(config) {
  morphology_.validate();
  if (config_.dt <= 0) throw SimError("SimConfig: dt must be positive");
  const int n = morphology_.dof();
  if (config_.external_torque.size() == 0) {
    config_.external_torque = Eigen::VectorXd::Zero(n);
  } else if (config_.external_torque.size() != n) {
    throw SimError("SimConfig: external_torque dimension");
  }
  kin_.resize(n);
  mass_.resize(n, n);
  bias_.resize(n);
  tau_.resize(n);
  fm_.resize(morphology_.muscle_count());
  u_clamped_.resize(morphology_.muscle_count());
  contact_jac_.resize(2, n);
}

SystemState Simulator::make_state(const Eigen::VectorXd& q, double a0) const {
  const int n = morphology_.dof();
  if (q.size() != n) throw SimError("make_state: q dimension");
  SystemState s;
  s.joints.q = q;
  s.joints.qdot = Eigen::VectorXd::Zero(n);
  s.muscles.a =
      Eigen::VectorXd::Constant(morphology_.muscle_count(), std::clamp(a0, 0.0, 1.0));
  muscle_geometry(morphology_, s.joints.q, s.joints.qdot, s.muscles.l,
                  s.muscles.v);
  s.t = 0.0;
  return s;
}

const Kinematics& Simulator::kinematics(const SystemState& state) {
  forward_kinematics(morphology_, state.joints.q, state.joints.qdot, kin_);
  return kin_;
}

void Simulator::step(SystemState& state, const Eigen::VectorXd& u,
                     StepFlags* flags) {
  const int n = morphology_.dof();
  const int nu = morphology_.muscle_count();
  if (u.size() != nu) throw SimError("step: control dimension");
  if (state.joints.q.size() != n || state.joints.qdot.size() != n) {
    throw SimError("step: state dimension");
  }

  forward_kinematics(morphology_, state.joints.q, state.joints.qdot, kin_);
  mass_matrix(morphology_, kin_, mass_);
  bias_forces(morphology_, kin_, config_.gravity, bias_);

  // ----- muscle forces mapped through Jm^T = -rho^T ----- //
  for (int i = 0; i < nu; ++i) {
    bool clamped = false;
    double ui = u[i];
    if (ui < 0.0 || ui > 1.0) {
      ui = std::clamp(ui, 0.0, 1.0);
      clamped = true;
    }
    u_clamped_[i] = ui;
    fm_[i] = muscle_force(state.muscles.l[i], state.muscles.v[i],
                          state.muscles.a[i],
                          morphology_.muscle_params[static_cast<size_t>(i)]);
    if (clamped && flags) flags->control_clamped = true;
  }
  tau_.noalias() = -(morphology_.moment_arms.transpose() * fm_);
  tau_ += config_.external_torque;

  // ----- penalty ground contact ----- //
  for (const auto& cp : morphology_.contacts) {
    const Eigen::Vector2d p = point_position(kin_, cp.link, cp.local);
    const double depth = terrain_.height(p.x()) - p.y();
    if (depth <= 0.0) continue;
    const Eigen::Vector2d v = point_velocity(kin_, cp.link, cp.local);
    double fn = config_.contact_stiffness * depth - config_.contact_damping * v.y();
    fn = std::max(fn, 0.0);
    const double cap = config_.friction_coeff * fn;
    const double ft =
        std::clamp(-config_.contact_damping * v.x(), -cap, cap);
    point_jacobian(morphology_, kin_, cp.link, cp.local, contact_jac_);
    tau_.noalias() += contact_jac_.transpose() * Eigen::Vector2d(ft, fn);
  }

  // ----- joint friction + soft joint limits ----- //
  for (int j = 0; j < n; ++j) {
    const LinkSpec& link = morphology_.links[static_cast<size_t>(j)];
    if (link.joint == JointType::kRevolute) {
      tau_[j] -= config_.joint_damping * state.joints.qdot[j];
    }
    const double q = state.joints.q[j];
    if (q > link.q_max) {
      tau_[j] += -config_.limit_stiffness * (q - link.q_max) -
                 config_.limit_damping * state.joints.qdot[j];
      if (flags) flags->joint_limit_hit = true;
    } else if (q < link.q_min) {
      tau_[j] += -config_.limit_stiffness * (q - link.q_min) -
                 config_.limit_damping * state.joints.qdot[j];
      if (flags) flags->joint_limit_hit = true;
    }
  }

  ldlt_.compute(mass_);
  if (ldlt_.info() != Eigen::Success) {
    throw SimError("step: mass matrix factorization failed");
  }
  const Eigen::VectorXd qddot = ldlt_.solve(tau_ - bias_);

  // semi-implicit Euler
  state.joints.qdot += config_.dt * qddot;
  state.joints.q += config_.dt * state.joints.qdot;

  for (int i = 0; i < nu; ++i) {
    state.muscles.a[i] =
        activation_step(state.muscles.a[i], u_clamped_[i],
                        morphology_.muscle_params[static_cast<size_t>(i)],
                        config_.dt);
  }
  muscle_geometry(morphology_, state.joints.q, state.joints.qdot,
                  state.muscles.l, state.muscles.v);
  state.t += config_.dt;

  // ----- kinematic object carry (manipulation) ----- //
  if (state.object && morphology_.end_effector) {
    forward_kinematics(morphology_, state.joints.q, state.joints.qdot, kin_);
    const auto& ee = *morphology_.end_effector;
    const Eigen::Vector2d tip = point_position(kin_, ee.link, ee.local);
    const double tip_ang = kin_.ang[static_cast<size_t>(ee.link)];
    ObjectState& obj = *state.object;
    if (!obj.grasped) {
      const double dx = obj.x - tip.x(), dy = obj.y - tip.y();
      if (std::hypot(dx, dy) < morphology_.object_attach_radius) {
        obj.grasped = true;
        const double c = std::cos(-tip_ang), s = std::sin(-tip_ang);
        obj.grab_offset = Eigen::Vector2d(c * dx - s * dy, s * dx + c * dy);
        obj.grab_angle = obj.angle - tip_ang;
      }
    }
    if (obj.grasped) {
      const double c = std::cos(tip_ang), s = std::sin(tip_ang);
      obj.x = tip.x() + c * obj.grab_offset.x() - s * obj.grab_offset.y();
      obj.y = tip.y() + s * obj.grab_offset.x() + c * obj.grab_offset.y();
      obj.angle = tip_ang + obj.grab_angle;
    }
  }
}

SystemState dynamics_step(const SystemState& state, const Eigen::VectorXd& u,
                          const Morphology& morphology, const SimConfig& config,
                          StepFlags* flags) {
  Simulator sim(morphology, Terrain::flat(), config);
  SystemState next = state;
  sim.step(next, u, flags);
  return next;
}

}  // namespace myolab
