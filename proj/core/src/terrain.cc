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

#include "myolab/terrain.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "myolab/util.h"

namespace myolab {

Terrain Terrain::flat() { return Terrain{}; }

Terrain Terrain::slope(double angle) {
  Terrain t;
  t.kind = Kind::kSlope;
  t.slope_angle = angle;
  return t;
}

Terrain Terrain::rough(uint64_t seed, double x_begin, double x_end,
                       double amplitude) {
  Terrain t;
  t.kind = Kind::kRough;
  t.seed = seed;
  t.x_begin = x_begin;
  const int knots =
      static_cast<int>(std::ceil((x_end - x_begin) / t.knot_spacing)) + 1;
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> dist(-amplitude, amplitude);
  t.heights.resize(static_cast<size_t>(knots));
  for (auto& h : t.heights) h = dist(rng);
  return t;
}

double Terrain::height(double x) const {
  switch (kind) {
    case Kind::kFlat:
      return 0.0;
    case Kind::kSlope:
      return x * std::tan(slope_angle);
    case Kind::kRough: {
      if (heights.empty()) return 0.0;
      const double s = (x - x_begin) / knot_spacing;
      if (s <= 0.0) return heights.front();
      const size_t last = heights.size() - 1;
      if (s >= static_cast<double>(last)) return heights.back();
      const size_t i = static_cast<size_t>(s);
      const double frac = s - static_cast<double>(i);
      return heights[i] + frac * (heights[i + 1] - heights[i]);
    }
  }
  return 0.0;
}

}  // namespace myolab
