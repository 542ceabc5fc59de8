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

#include "myolab/tasks.h"

#include <cmath>
#include <random>

#include "doctest.h"
#include "myolab/reward.h"
#include "myolab/util.h"

namespace {

using namespace myolab;

TEST_CASE("task catalog lists the full suite") {
  const auto ids = task_catalog();
  CHECK(ids.size() == 6);
  for (const auto& id : ids) CHECK_NOTHROW(build_task(id, 3));
  CHECK_THROWS_AS(build_task("walker_moon", 3), SimError);
}

TEST_CASE("build_task is deterministic") {
  const TaskBundle a = build_task("walker_rough", 7);
  const TaskBundle b = build_task("walker_rough", 7);
  CHECK(a.initial_state.joints.q == b.initial_state.joints.q);
  CHECK(a.terrain.heights == b.terrain.heights);
  for (int i = 0; i < a.morphology.muscle_count(); ++i) {
    CHECK(a.morphology.muscle_params[i].f_max ==
          b.morphology.muscle_params[i].f_max);
  }
  const TaskBundle c = build_task("walker_rough", 8);
  CHECK(a.terrain.heights != c.terrain.heights);
}

TEST_CASE("injury weakens the named right-side muscles") {
  const TaskBundle healthy = build_task("walker_flat", 1);
  const TaskBundle injured = build_task("walker_injured", 1);
  REQUIRE(injured.spec.injuries.size() == 2);
  for (const auto& inj : injured.spec.injuries) {
    CHECK(inj.scale == 0.3);
    const std::string& name = injured.morphology.muscle_names[inj.muscle];
    const bool expected =
        name == "hamstring_r" || name == "ankle_plantarflexor_r";
    CHECK(expected);
    CHECK(injured.morphology.muscle_params[inj.muscle].f_max ==
          doctest::Approx(0.3 * healthy.morphology.muscle_params[inj.muscle].f_max));
  }
}

TEST_CASE("injury monotonicity: weaker muscle, weaker force") {
  const TaskBundle healthy = build_task("walker_flat", 1);
  const TaskBundle injured = build_task("walker_injured", 1);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> lengths(0.1, 0.6);
  std::uniform_real_distribution<double> rates(-1.5, 1.5);
  for (int trial = 0; trial < 2000; ++trial) {
    for (const auto& inj : injured.spec.injuries) {
      const double l = lengths(rng), v = rates(rng), a = unit(rng);
      const double f_injured =
          muscle_force(l, v, a, injured.morphology.muscle_params[inj.muscle]);
      const double f_healthy =
          muscle_force(l, v, a, healthy.morphology.muscle_params[inj.muscle]);
      CHECK(std::abs(f_injured) <= std::abs(f_healthy));
    }
  }
}

TEST_CASE("terrain heights") {
  CHECK(terrain_height(Terrain::flat(), 3.2) == 0.0);
  CHECK(terrain_height(Terrain::slope(0.1), 1.0) ==
        doctest::Approx(std::tan(0.1)).epsilon(1e-12));

  const TaskBundle slope = build_task("walker_slope", 1);
  CHECK(slope.terrain.height(2.0) == doctest::Approx(2.0 * std::tan(0.1)));

  CHECK_THROWS_AS(terrain_height(Terrain::flat(), std::nan("")), SimError);
}

TEST_CASE("rough terrain: knot identity and seeded reproducibility") {
  const Terrain t1 = Terrain::rough(42);
  const Terrain t2 = Terrain::rough(42);
  CHECK(t1.heights == t2.heights);
  for (size_t k = 0; k < t1.heights.size(); ++k) {
    const double x = t1.x_begin + static_cast<double>(k) * t1.knot_spacing;
    CHECK(t1.height(x) == t1.heights[k]);
    CHECK(std::abs(t1.heights[k]) <= 0.03);
  }
  // interpolation midpoint
  const double mid = t1.x_begin + 0.5 * t1.knot_spacing;
  CHECK(t1.height(mid) ==
        doctest::Approx(0.5 * (t1.heights[0] + t1.heights[1])).epsilon(1e-12));
  // clamped outside the sampled range
  CHECK(t1.height(t1.x_begin - 5.0) == t1.heights.front());
  CHECK(t1.height(1e9) == t1.heights.back());
}

TEST_CASE("manipulation tasks carry targets, locomotion tasks do not") {
  for (const auto& id : task_catalog()) {
    const TaskBundle task = build_task(id, 1);
    if (task.spec.locomotion) {
      CHECK(!task.spec.target_position.has_value());
    } else {
      CHECK(task.spec.target_position.has_value());
    }
  }
  const TaskBundle reorient = build_task("arm_reorient", 1);
  CHECK(reorient.initial_state.object.has_value());
  CHECK(reorient.spec.target_angle.has_value());
  const TaskBundle reach = build_task("arm_reach", 1);
  CHECK(!reach.initial_state.object.has_value());
}

TEST_CASE("walker initial pose rests near the ground") {
  const TaskBundle task = build_task("walker_flat", 1);
  Kinematics kin;
  forward_kinematics(task.morphology, task.initial_state.joints.q,
                     task.initial_state.joints.qdot, kin);
  for (const auto& cp : task.morphology.contacts) {
    const Eigen::Vector2d p = point_position(kin, cp.link, cp.local);
    CHECK(std::abs(p.y()) < 0.02);  // soles at the ground within 2 cm
  }
}

TEST_CASE("default programs parse and reference the catalog") {
  for (const auto& id : task_catalog()) {
    CHECK_NOTHROW(parse_program(default_program_text(id)));
  }
}

}  // namespace
