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

#ifndef MYOLAB_TERRAIN_H_
#define MYOLAB_TERRAIN_H_

#include <cstdint>
#include <vector>

namespace myolab {

// Ground profile. Rough terrain is a seeded piecewise-linear height field
// sampled at fixed spacing; queries outside the sampled range clamp to the
// edge knots.
struct Terrain {
  enum class Kind { kFlat, kSlope, kRough };

  Kind kind = Kind::kFlat;
  double slope_angle = 0.0;  // rad, slope only
  double knot_spacing = 0.25;
  double x_begin = 0.0;      // x of the first knot, rough only
  std::vector<double> heights;
  uint64_t seed = 0;

  static Terrain flat();
  static Terrain slope(double angle);
  // Uniform knot heights in [-amplitude, amplitude] over [x_begin, x_end].
  static Terrain rough(uint64_t seed, double x_begin = -2.0,
                       double x_end = 14.0, double amplitude = 0.03);

  double height(double x) const;
};

}  // namespace myolab

#endif  // MYOLAB_TERRAIN_H_
