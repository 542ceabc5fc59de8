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

#include "myolab/muscle.h"

#include <algorithm>
#include <cmath>

#include "myolab/util.h"

namespace myolab {

double activation_step(double a, double u, const MuscleParams& params,
                       double dt, bool* clamped) {
  if (!std::isfinite(a) || !std::isfinite(u) || !std::isfinite(dt)) {
    throw SimError("activation_step: non-finite input");
  }
  if (u < 0.0 || u > 1.0) {
    u = std::clamp(u, 0.0, 1.0);
    if (clamped) *clamped = true;
  }
  const double tau = (u > a) ? params.tau_act : params.tau_deact;
  // a' = u + (a - u) e^{-dt/tau}: a convex blend of a and u, so the [0,1]
  // bound is preserved without an explicit clamp.
  return u + (a - u) * std::exp(-dt / tau);
}

double force_length(double l, const MuscleParams& params) {
  const double x = (l - params.l_opt) / (params.width * params.l_opt);
  return std::exp(-x * x);
}

double force_velocity(double v, const MuscleParams& params) {
  return std::clamp(1.0 - v / params.v_max, 0.0, 1.5);
}

double passive_force(double l, const MuscleParams& params) {
  return params.k_passive * std::max(0.0, l - params.l_opt);
}

double muscle_force(double l, double v, double a, const MuscleParams& params) {
  if (!std::isfinite(l) || !std::isfinite(v) || !std::isfinite(a)) {
    throw SimError("muscle_force: non-finite input");
  }
  if (l <= 0.0) throw SimError("muscle_force: nonpositive length");
  const double active =
      a * params.f_max * force_length(l, params) * force_velocity(v, params);
  return -(active + passive_force(l, params));
}

}  // namespace myolab
