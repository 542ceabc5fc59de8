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

#include <algorithm>
#include <cmath>

#include "myolab/util.h"

namespace myolab {

void PlannerConfig::validate() const {
  if (horizon < 1) throw SimError("PlannerConfig: horizon must be >= 1");
  if (n_samples < 1) throw SimError("PlannerConfig: n_samples must be >= 1");
  if (temperature <= 0) throw SimError("PlannerConfig: temperature must be > 0");
  if (instant_fraction < 0 || instant_fraction > 1) {
    throw SimError("PlannerConfig: instant_fraction must be in [0,1]");
  }
  if (replan_interval < 1) {
    throw SimError("PlannerConfig: replan_interval must be >= 1");
  }
}

PostureTarget posture_map(const Morphology& m, const SystemState& state) {
  PostureTarget z(static_cast<int>(m.posture_indices.size()));
  for (size_t i = 0; i < m.posture_indices.size(); ++i) {
    z[static_cast<int>(i)] = state.joints.q[m.posture_indices[i]];
  }
  return z;
}

std::vector<PostureTarget> sample_candidates(const PostureTarget& z_mean,
                                             const SystemState& state,
                                             const Morphology& m,
                                             const PlannerConfig& config,
                                             std::mt19937_64& rng) {
  config.validate();
  const int n = config.n_samples;
  const int dz = static_cast<int>(m.posture_indices.size());
  if (z_mean.size() != dz) throw SimError("sample_candidates: z_mean dimension");

  const PostureTarget z_now = posture_map(m, state);
  const int n_instant = std::min(
      n - 1, static_cast<int>(std::ceil(config.instant_fraction * n)));

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<PostureTarget> out;
  out.reserve(static_cast<size_t>(n));
  out.push_back(z_mean);  // candidate 0 carries the mean exactly
  for (int s = 1; s < n; ++s) {
    const PostureTarget& center = s <= n_instant ? z_now : z_mean;
    PostureTarget z(dz);
    for (int i = 0; i < dz; ++i) {
      const LinkSpec& link =
          m.links[static_cast<size_t>(m.posture_indices[static_cast<size_t>(i)])];
      z[i] = std::clamp(center[i] + config.noise_sigma * gauss(rng),
                        link.q_min, link.q_max);
    }
    out.push_back(std::move(z));
  }
  return out;
}

Eigen::VectorXd low_level_control(const SystemState& state,
                                  const PostureTarget& z_star,
                                  const Morphology& m, double k_bar) {
  const int dz = static_cast<int>(m.posture_indices.size());
  const int nu = m.muscle_count();
  if (z_star.size() != dz) throw SimError("low_level_control: z dimension");

  // l* = length map at q with the posture entries replaced by z*
  Eigen::VectorXd q_star = state.joints.q;
  for (int i = 0; i < dz; ++i) q_star[m.posture_indices[static_cast<size_t>(i)]] = z_star[i];
  const Eigen::VectorXd l_star = m.rest_lengths - m.moment_arms * q_star;

  Eigen::VectorXd u(nu);
  for (int a = 0; a < nu; ++a) {
    double gain = 0.0;  // K_a = k_bar * sum_i |Jm(a,i) dz_i|, Jm = -rho
    for (int i = 0; i < dz; ++i) {
      const int j = m.posture_indices[static_cast<size_t>(i)];
      gain += std::abs(-m.moment_arms(a, j) * (z_star[i] - state.joints.q[j]));
    }
    gain *= k_bar;
    const double f_star =
        std::min(0.0, gain * (l_star[a] - state.muscles.l[a]));
    u[a] = std::clamp(-f_star / m.muscle_params[static_cast<size_t>(a)].f_max,
                      0.0, 1.0);
  }
  return u;
}

MppiResult mppi_combine(const std::vector<PostureTarget>& candidates,
                        const std::vector<double>& costs, double temperature) {
  if (candidates.empty() || candidates.size() != costs.size()) {
    throw SimError("mppi_combine: inconsistent candidate set");
  }
  double c_min = std::numeric_limits<double>::infinity();
  for (double c : costs) {
    if (std::isfinite(c)) c_min = std::min(c_min, c);
  }
  if (!std::isfinite(c_min)) {
    throw SimError("mppi_combine: every candidate cost is non-finite");
  }
  MppiResult result;
  result.weights.setZero(static_cast<int>(costs.size()));
  double total = 0.0;
  for (size_t j = 0; j < costs.size(); ++j) {
    if (!std::isfinite(costs[j])) continue;
    const double w = std::exp(-(costs[j] - c_min) / temperature);
    result.weights[static_cast<int>(j)] = w;
    total += w;
  }
  result.weights /= total;
  result.z_star = PostureTarget::Zero(candidates.front().size());
  for (size_t j = 0; j < candidates.size(); ++j) {
    result.z_star += result.weights[static_cast<int>(j)] * candidates[j];
  }
  return result;
}

PlanResult plan_with_cost(
    const PostureTarget& z_mean, const SystemState& state, const Morphology& m,
    const PlannerConfig& config,
    const std::function<double(const PostureTarget&)>& cost,
    std::mt19937_64& rng) {
  PlanResult result;
  result.candidates = sample_candidates(z_mean, state, m, config, rng);
  result.costs.resize(result.candidates.size());
  for (size_t j = 0; j < result.candidates.size(); ++j) {
    result.costs[j] = cost(result.candidates[j]);
  }
  result.z_star =
      mppi_combine(result.candidates, result.costs, config.temperature).z_star;
  result.optimization_dim = static_cast<int>(m.posture_indices.size());
  return result;
}

Planner::Planner(const Morphology& m, const Terrain& terrain,
                 const SimConfig& sim, const TaskContext& context,
                 const PlannerConfig& config)
    : config_(config) {
  config_.validate();
  const int workers = std::max(1, config_.jobs);
  for (int w = 0; w < workers; ++w) {
    sims_.push_back(std::make_unique<Simulator>(m, terrain, sim));
    extractors_.push_back(std::make_unique<FeatureExtractor>(
        sims_.back()->morphology(), sims_.back()->terrain(), context));
  }
}

double Planner::candidate_cost(int worker, const SystemState& state,
                               const PostureTarget& z,
                               const RewardProgram& program) {
  Simulator& sim = *sims_[static_cast<size_t>(worker)];
  FeatureExtractor& extractor = *extractors_[static_cast<size_t>(worker)];
  const int substeps = sim.config().control_substeps;

  SystemState st = state;
  double cost = 0.0;
  Eigen::VectorXd u, prev_u;
  for (int h = 0; h < config_.horizon; ++h) {
    u = low_level_control(st, z, sim.morphology(), config_.k_bar);
    for (int s = 0; s < substeps; ++s) {
      try {
        sim.step(st, u);
      } catch (const SimError&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
      if (!st.finite()) return std::numeric_limits<double>::quiet_NaN();
    }
    // cost accumulates at the control rate, matching the recording cadence
    try {
      cost -= eval_step_reward(
                  program,
                  extractor.extract(st, u, prev_u.size() ? &prev_u : nullptr))
                  .total;
    } catch (const EvalError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    prev_u = u;
  }
  return cost;
}

PlanResult Planner::plan(const SystemState& state, const RewardProgram& program,
                         const PostureTarget& z_mean, std::mt19937_64& rng) {
  PlanResult result;
  result.candidates = sample_candidates(
      z_mean, state, sims_.front()->morphology(), config_, rng);
  result.costs.assign(result.candidates.size(), 0.0);

  const int n = static_cast<int>(result.candidates.size());
  const int workers = static_cast<int>(sims_.size());
  parallel_for(n, workers, [&](int j) {
    const int worker = j % workers;  // matches parallel_for's stride layout
    result.costs[static_cast<size_t>(j)] =
        candidate_cost(worker, state, result.candidates[static_cast<size_t>(j)],
                       program);
  });

  result.z_star =
      mppi_combine(result.candidates, result.costs, config_.temperature).z_star;
  result.optimization_dim =
      static_cast<int>(sims_.front()->morphology().posture_indices.size());
  return result;
}

MpcPolicy::MpcPolicy(const Morphology& m, const Terrain& terrain,
                     const SimConfig& sim, const TaskContext& context,
                     const PlannerConfig& config, const RewardProgram& program,
                     uint64_t seed)
    : morphology_(m),
      planner_(m, terrain, sim, context, config),
      program_(program),
      rng_(splitmix64(seed)),
      control_substeps_(std::max(1, sim.control_substeps)) {}

Eigen::VectorXd MpcPolicy::operator()(const SystemState& state) {
  if (sim_step_ % control_substeps_ == 0) {
    if (control_step_ % planner_.config().replan_interval == 0) {
      if (plan_calls_ == 0) z_mean_ = posture_map(morphology_, state);
      const PlanResult result = planner_.plan(state, program_, z_mean_, rng_);
      z_star_ = result.z_star;
      z_mean_ = result.z_star;  // warm start for the next plan
      optimization_dim_ = result.optimization_dim;
      ++plan_calls_;
    }
    u_cached_ =
        low_level_control(state, z_star_, morphology_, planner_.config().k_bar);
    ++control_step_;
  }
  ++sim_step_;
  return u_cached_;
}

}  // namespace myolab
