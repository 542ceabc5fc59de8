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

#ifndef MYOLAB_MUSCLE_H_
#define MYOLAB_MUSCLE_H_

namespace myolab {

// First-order muscle-like tensile actuator: Gaussian force-length curve,
// linear-clamped force-velocity curve, linear passive stretch, and a
// two-constant activation lag.
struct MuscleParams {
  double f_max = 1000.0;     // max isometric force (N)
  double l_opt = 0.3;        // optimal length (m)
  double width = 0.5;        // force-length width (dimensionless)
  double v_max = 1.0;        // max shortening rate (m/s)
  double k_passive = 100.0;  // passive stiffness (N/m)
  double tau_act = 0.015;    // activation time constant (s)
  double tau_deact = 0.05;   // deactivation time constant (s)

  bool valid() const {
    return f_max > 0 && l_opt > 0 && width > 0 && v_max > 0 &&
           k_passive >= 0 && tau_act > 0 && tau_deact > 0 &&
           tau_act <= tau_deact;
  }
};

// Advances activation by the exact exponential solution of
// da/dt = (u - a) / tau(u, a), with tau = tau_act while exciting (u > a)
// and tau_deact otherwise. Controls outside [0,1] are clamped; *clamped is
// set when that happens. Throws SimError on non-finite input.
double activation_step(double a, double u, const MuscleParams& params,
                       double dt, bool* clamped = nullptr);

// Active force-length curve, 1 at l = l_opt.
double force_length(double l, const MuscleParams& params);

// Force-velocity scale: clamp(1 - v / v_max, 0, 1.5). Positive v shortens.
double force_velocity(double v, const MuscleParams& params);

// Passive stretch force, zero below optimal length.
double passive_force(double l, const MuscleParams& params);

// Total actuator force. Tensile-only convention: result <= 0.
// Throws SimError on non-finite input or l <= 0.
double muscle_force(double l, double v, double a, const MuscleParams& params);

}  // namespace myolab

#endif  // MYOLAB_MUSCLE_H_
