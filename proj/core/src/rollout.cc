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

#include "myolab/rollout.h"

#include <fstream>
#include <sstream>

#include "myolab/util.h"

namespace myolab {

Trajectory rollout(Simulator& sim, FeatureExtractor& extractor,
                   const Policy& policy, const SystemState& s0, int steps,
                   const RewardProgram& program, int record_stride) {
  if (steps < 1) throw SimError("rollout: steps must be >= 1");
  if (record_stride < 1) throw SimError("rollout: record_stride must be >= 1");
  Trajectory traj;
  traj.initial_state = s0;
  traj.dt = sim.config().dt * record_stride;
  traj.steps.reserve(static_cast<size_t>(steps / record_stride));
  for (const auto& term : program.terms) traj.term_names.push_back(term.name);

  SystemState state = s0;
  Eigen::VectorXd prev_u;
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd u = policy(state);
    if (u.size() != sim.morphology().muscle_count()) {
      throw SimError("rollout: policy returned wrong control dimension");
    }
    try {
      sim.step(state, u);
    } catch (const SimError&) {
      // a state broken enough to defeat the muscle model counts as diverged
      traj.truncated = true;
      traj.truncated_at = static_cast<int>(traj.steps.size());
      break;
    }
    if (!state.finite()) {
      traj.truncated = true;
      traj.truncated_at = static_cast<int>(traj.steps.size());
      break;
    }
    if ((k + 1) % record_stride != 0) continue;
    TrajectoryStep row;
    row.state = state;
    row.control = u;
    try {
      const StepReward r = eval_step_reward(
          program, extractor.extract(state, u, prev_u.size() ? &prev_u : nullptr));
      row.term_values = r.per_term;
      row.reward_total = r.total;
    } catch (const EvalError&) {
      traj.truncated = true;
      traj.truncated_at = static_cast<int>(traj.steps.size());
      break;
    }
    traj.steps.push_back(std::move(row));
    prev_u = std::move(u);
  }
  return traj;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const Morphology& morphology) {
  std::ostringstream out;
  const int n = morphology.dof();
  const int nu = morphology.muscle_count();
  const bool object = traj.initial_state.object.has_value();

  out << "t";
  for (int j = 0; j < n; ++j) out << ",q" << j;
  for (int j = 0; j < n; ++j) out << ",qdot" << j;
  for (int i = 0; i < nu; ++i) out << ",a" << i;
  for (int i = 0; i < nu; ++i) out << ",u" << i;
  if (object) out << ",obj_x,obj_y,obj_angle,obj_grasped";
  for (const auto& name : traj.term_names) out << ",term:" << name;
  out << ",reward_total\n";

  for (const auto& row : traj.steps) {
    out << format_double(row.state.t);
    for (int j = 0; j < n; ++j) out << "," << format_double(row.state.joints.q[j]);
    for (int j = 0; j < n; ++j) {
      out << "," << format_double(row.state.joints.qdot[j]);
    }
    for (int i = 0; i < nu; ++i) {
      out << "," << format_double(row.state.muscles.a[i]);
    }
    for (int i = 0; i < nu; ++i) out << "," << format_double(row.control[i]);
    if (object) {
      const ObjectState& obj = *row.state.object;
      out << "," << format_double(obj.x) << "," << format_double(obj.y) << ","
          << format_double(obj.angle) << "," << (obj.grasped ? 1 : 0);
    }
    for (int k = 0; k < row.term_values.size(); ++k) {
      out << "," << format_double(row.term_values[k]);
    }
    out << "," << format_double(row.reward_total) << "\n";
  }
  write_file_atomic(path, out.str());
}

Trajectory read_trajectory_csv(const std::string& path,
                               const Morphology& morphology) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory csv: " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trajectory csv: " + path);
  }
  std::vector<std::string> header;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  const int n = morphology.dof();
  const int nu = morphology.muscle_count();
  bool object = false;
  Trajectory traj;
  for (const auto& h : header) {
    if (h == "obj_x") object = true;
    if (h.rfind("term:", 0) == 0) traj.term_names.push_back(h.substr(5));
  }
  const size_t expected = 1 + 2 * static_cast<size_t>(n) +
                          2 * static_cast<size_t>(nu) + (object ? 4 : 0) +
                          traj.term_names.size() + 1;
  if (header.size() != expected) {
    throw std::runtime_error("trajectory csv column mismatch: " + path);
  }

  double prev_t = 0.0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> vals;
    vals.reserve(expected);
    while (std::getline(ls, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() != expected) {
      throw std::runtime_error("trajectory csv row mismatch: " + path);
    }
    size_t c = 0;
    TrajectoryStep row;
    row.state.t = vals[c++];
    row.state.joints.q.resize(n);
    row.state.joints.qdot.resize(n);
    for (int j = 0; j < n; ++j) row.state.joints.q[j] = vals[c++];
    for (int j = 0; j < n; ++j) row.state.joints.qdot[j] = vals[c++];
    row.state.muscles.a.resize(nu);
    for (int i = 0; i < nu; ++i) row.state.muscles.a[i] = vals[c++];
    row.control.resize(nu);
    for (int i = 0; i < nu; ++i) row.control[i] = vals[c++];
    if (object) {
      ObjectState obj;
      obj.x = vals[c++];
      obj.y = vals[c++];
      obj.angle = vals[c++];
      obj.grasped = vals[c++] != 0.0;
      row.state.object = obj;
    }
    muscle_geometry(morphology, row.state.joints.q, row.state.joints.qdot,
                    row.state.muscles.l, row.state.muscles.v);
    row.term_values.resize(static_cast<int>(traj.term_names.size()));
    for (int k = 0; k < row.term_values.size(); ++k) {
      row.term_values[k] = vals[c++];
    }
    row.reward_total = vals[c++];
    if (first) {
      traj.dt = row.state.t;  // rows start one step after t=0
      traj.initial_state = row.state;
      first = false;
    } else {
      traj.dt = row.state.t - prev_t;
    }
    prev_t = row.state.t;
    traj.steps.push_back(std::move(row));
  }
  return traj;
}

}  // namespace myolab
