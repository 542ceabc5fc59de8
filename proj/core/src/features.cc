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

#include "myolab/features.h"

#include <cmath>
#include <sstream>

#include "myolab/util.h"

namespace myolab {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

}  // namespace

const std::vector<FeatureInfo>& feature_catalog() {
  static const std::vector<FeatureInfo> catalog = {
      {FeatureId::kHeight, "height", false, "torso frame height above y=0 (m)"},
      {FeatureId::kForwardVelocity, "forward_velocity", false,
       "torso horizontal velocity (m/s), +x is forward"},
      {FeatureId::kForwardDistance, "forward_distance", false,
       "torso x displacement since the start of the rollout (m)"},
      {FeatureId::kBalance, "balance", false,
       "signed horizontal offset of the COM from the support midpoint (m)"},
      {FeatureId::kTorsoUprightness, "torso_uprightness", false,
       "cosine of the torso angle; 1 when fully upright"},
      {FeatureId::kEffort, "effort", false, "sum of squared muscle commands"},
      {FeatureId::kControlSmoothness, "control_smoothness", false,
       "L1 change of the command vector since the previous step"},
      {FeatureId::kFootClearance, "foot_clearance", false,
       "smallest contact-point height above the terrain (m), 0 if none"},
      {FeatureId::kStepSymmetry, "step_symmetry", false,
       "signed offset of the feet midpoint from the COM (m), 0 without feet"},
      {FeatureId::kTargetPositionError, "target_position_error", false,
       "distance from the object (or arm tip) to the task target (m)"},
      {FeatureId::kTargetOrientationError, "target_orientation_error", false,
       "absolute wrapped angle error to the target orientation (rad)"},
      {FeatureId::kJointAngle, "joint_angle", true, "joint angle q[j] (rad)"},
      {FeatureId::kJointVelocity, "joint_velocity", true,
       "joint velocity qdot[j] (rad/s)"},
      {FeatureId::kContactFlag, "contact_flag", true,
       "1 if contact point p touches the ground, else 0"},
  };
  return catalog;
}

const FeatureInfo* find_feature(std::string_view name) {
  for (const auto& info : feature_catalog()) {
    if (name == info.name) return &info;
  }
  return nullptr;
}

std::string catalog_summary() {
  std::ostringstream ss;
  for (const auto& info : feature_catalog()) {
    ss << "- " << info.name;
    if (info.parameterized) ss << "(i)";
    ss << ": " << info.doc << "\n";
  }
  return ss.str();
}

FeatureExtractor::FeatureExtractor(const Morphology& morphology,
                                   const Terrain& terrain,
                                   const TaskContext& context)
    : morphology_(morphology), terrain_(terrain), context_(context) {
  kin_.resize(morphology_.dof());
  frame_.contact.assign(morphology_.contacts.size(), 0);
}

const FeatureFrame& FeatureExtractor::extract(
    const SystemState& state, const Eigen::VectorXd& controls,
    const Eigen::VectorXd* prev_controls) {
  forward_kinematics(morphology_, state.joints.q, state.joints.qdot, kin_);
  const size_t torso = static_cast<size_t>(morphology_.torso_link);

  auto set = [&](FeatureId id, double v) {
    frame_.scalars[static_cast<int>(id)] = v;
  };

  set(FeatureId::kHeight, kin_.pos[torso].y());
  set(FeatureId::kForwardVelocity, kin_.vel[torso].x());
  set(FeatureId::kForwardDistance, kin_.pos[torso].x() - context_.start_x);
  set(FeatureId::kTorsoUprightness, std::cos(kin_.ang[torso]));
  set(FeatureId::kEffort, controls.squaredNorm());
  set(FeatureId::kControlSmoothness,
      prev_controls ? (controls - *prev_controls).lpNorm<1>() : 0.0);

  // ----- contact-derived features ----- //
  const size_t ncp = morphology_.contacts.size();
  double support_sum = 0.0;
  int support_count = 0;
  double all_sum = 0.0;
  double min_clearance = 0.0;
  bool have_clearance = false;
  for (size_t i = 0; i < ncp; ++i) {
    const auto& cp = morphology_.contacts[i];
    const Eigen::Vector2d p = point_position(kin_, cp.link, cp.local);
    const double clearance = p.y() - terrain_.height(p.x());
    frame_.contact[i] = clearance <= 0.0 ? 1 : 0;
    all_sum += p.x();
    if (frame_.contact[i]) {
      support_sum += p.x();
      ++support_count;
    }
    if (!have_clearance || clearance < min_clearance) {
      min_clearance = clearance;
      have_clearance = true;
    }
  }
  double balance = 0.0;
  if (ncp > 0) {
    const double ref = support_count > 0
                           ? support_sum / support_count
                           : all_sum / static_cast<double>(ncp);
    balance = kin_.com.x() - ref;
  }
  set(FeatureId::kBalance, balance);
  set(FeatureId::kFootClearance,
      have_clearance ? std::max(0.0, min_clearance) : 0.0);

  // feet midpoint relative to COM, using the first two contact link groups
  double step_symmetry = 0.0;
  if (ncp > 0) {
    double gx[2] = {0, 0};
    int gc[2] = {0, 0};
    int group_links[2] = {-1, -1};
    int groups = 0;
    for (size_t i = 0; i < ncp; ++i) {
      const auto& cp = morphology_.contacts[i];
      int g = -1;
      for (int k = 0; k < groups; ++k) {
        if (group_links[k] == cp.link) g = k;
      }
      if (g < 0 && groups < 2) {
        g = groups++;
        group_links[g] = cp.link;
      }
      if (g >= 0) {
        gx[g] += point_position(kin_, cp.link, cp.local).x();
        ++gc[g];
      }
    }
    if (groups == 2) {
      step_symmetry =
          0.5 * (gx[0] / gc[0] + gx[1] / gc[1]) - kin_.com.x();
    }
  }
  set(FeatureId::kStepSymmetry, step_symmetry);

  // ----- target errors ----- //
  double pos_err = 0.0, ang_err = 0.0;
  if (context_.spec.target_position) {
    Eigen::Vector2d tracked;
    bool have = false;
    if (state.object) {
      tracked = Eigen::Vector2d(state.object->x, state.object->y);
      have = true;
      if (context_.spec.target_angle) {
        ang_err = std::abs(
            wrap_angle(state.object->angle - *context_.spec.target_angle));
      }
    } else if (morphology_.end_effector) {
      tracked = point_position(kin_, morphology_.end_effector->link,
                               morphology_.end_effector->local);
      have = true;
    }
    if (have) pos_err = (tracked - *context_.spec.target_position).norm();
  }
  set(FeatureId::kTargetPositionError, pos_err);
  set(FeatureId::kTargetOrientationError, ang_err);

  frame_.q = &state.joints.q;
  frame_.qdot = &state.joints.qdot;
  return frame_;
}

std::string canonical_term_text(std::string_view feature_name,
                                const TaskContext& context) {
  const std::string name(feature_name);
  if (name == "height") {
    return "term height { exp(-8 * abs(height - " +
           format_double(context.spec.locomotion ? 0.94 : 1.0) + ")) } @ 1";
  }
  if (name == "balance") return "term balance { exp(-4 * abs(balance)) } @ 1";
  if (name == "forward_velocity") {
    return "term forward_velocity { clamp(forward_velocity, -0.5, 1.5) } @ 1";
  }
  if (name == "forward_distance") {
    return "term forward_distance { forward_distance } @ 1";
  }
  if (name == "torso_uprightness") {
    return "term torso_uprightness { torso_uprightness } @ 1";
  }
  if (name == "effort") return "term effort { -(0.05 * effort) } @ 1";
  if (name == "control_smoothness") {
    return "term control_smoothness { -(0.1 * control_smoothness) } @ 1";
  }
  if (name == "foot_clearance") {
    return "term foot_clearance { clamp(10 * foot_clearance, 0, 1) } @ 1";
  }
  if (name == "step_symmetry") {
    return "term step_symmetry { exp(-4 * abs(step_symmetry)) } @ 1";
  }
  if (name == "target_position_error") {
    return "term target_position_error { exp(-4 * target_position_error) } @ 1";
  }
  if (name == "target_orientation_error") {
    return "term target_orientation_error { exp(-2 * target_orientation_error) } @ 1";
  }
  return "";
}

}  // namespace myolab
