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

#include "myolab/render.h"

#include <cmath>

#include "myolab/util.h"

namespace myolab {

namespace {

struct Camera {
  double cx, cy;  // world center
  double scale;   // px per m
  int w, h;

  int px(double x) const {
    return static_cast<int>(std::lround((x - cx) * scale + w / 2.0));
  }
  int py(double y) const {
    return static_cast<int>(std::lround((cy - y) * scale + h / 2.0));
  }
};

void draw_state(Image& img, const Camera& cam, const Morphology& m,
                const Terrain& terrain, const TaskSpec& task,
                const SystemState& state, Kinematics& kin) {
  forward_kinematics(m, state.joints.q, state.joints.qdot, kin);

  // ground profile across the window
  const double x0 = cam.cx - cam.w / (2.0 * cam.scale);
  const double x1 = cam.cx + cam.w / (2.0 * cam.scale);
  const int samples = 64;
  for (int s = 0; s < samples; ++s) {
    const double xa = x0 + (x1 - x0) * s / samples;
    const double xb = x0 + (x1 - x0) * (s + 1) / samples;
    img.line(cam.px(xa), cam.py(terrain.height(xa)), cam.px(xb),
             cam.py(terrain.height(xb)), 90, 70, 40);
  }

  // links as segments from frame origin to tip
  for (int i = 0; i < m.dof(); ++i) {
    const LinkSpec& link = m.links[static_cast<size_t>(i)];
    if (link.mass <= 0.0 && link.tip.squaredNorm() == 0.0) continue;
    const Eigen::Vector2d a = kin.pos[static_cast<size_t>(i)];
    const Eigen::Vector2d b = point_position(kin, i, link.tip);
    img.line(cam.px(a.x()), cam.py(a.y()), cam.px(b.x()), cam.py(b.y()), 20,
             20, 120);
    img.blot(cam.px(a.x()), cam.py(a.y()), 160, 40, 40);
  }

  // target marker (manipulation)
  if (task.target_position) {
    const double tx = task.target_position->x();
    const double ty = task.target_position->y();
    const int r = 4;
    img.line(cam.px(tx) - r, cam.py(ty), cam.px(tx) + r, cam.py(ty), 0, 140, 0);
    img.line(cam.px(tx), cam.py(ty) - r, cam.px(tx), cam.py(ty) + r, 0, 140, 0);
    if (task.target_angle) {
      img.line(cam.px(tx), cam.py(ty),
               cam.px(tx + 0.1 * std::cos(*task.target_angle)),
               cam.py(ty + 0.1 * std::sin(*task.target_angle)), 0, 140, 0);
    }
  }

  // object as an oriented square
  if (state.object) {
    const ObjectState& obj = *state.object;
    const double half = 0.05;
    Eigen::Vector2d corners[4];
    for (int k = 0; k < 4; ++k) {
      const double ang = obj.angle + M_PI / 4 + k * M_PI / 2;
      corners[k] = Eigen::Vector2d(obj.x + half * std::sqrt(2.0) * std::cos(ang),
                                   obj.y + half * std::sqrt(2.0) * std::sin(ang));
    }
    for (int k = 0; k < 4; ++k) {
      const Eigen::Vector2d& a = corners[k];
      const Eigen::Vector2d& b = corners[(k + 1) % 4];
      img.line(cam.px(a.x()), cam.py(a.y()), cam.px(b.x()), cam.py(b.y()), 200,
               120, 0);
    }
  }
}

}  // namespace

FrameSequence render_frames(const Trajectory& traj, const Morphology& m,
                            const Terrain& terrain, const TaskSpec& task,
                            const RenderOptions& options) {
  if (traj.steps.empty()) throw SimError("render_frames: empty trajectory");
  FrameSequence seq;
  seq.rate = options.rate;
  seq.window_width = options.window_width;

  const int count = static_cast<int>(std::ceil(traj.duration() * options.rate));
  const double scale = options.width / options.window_width;
  Kinematics kin;

  for (int f = 0; f < std::max(count, 1); ++f) {
    const double t = f / options.rate;
    size_t row = traj.dt > 0 ? static_cast<size_t>(t / traj.dt) : 0;
    row = std::min(row, traj.steps.size() - 1);
    const SystemState& state = traj.steps[row].state;

    forward_kinematics(m, state.joints.q, state.joints.qdot, kin);
    Camera cam;
    cam.cx = kin.pos[static_cast<size_t>(m.torso_link)].x();
    cam.cy = m.stand_height > 0 ? m.stand_height * 0.6 : 0.6;
    cam.scale = scale;
    cam.w = options.width;
    cam.h = options.height;

    Image img(options.width, options.height);
    draw_state(img, cam, m, terrain, task, state, kin);
    seq.frames.push_back(std::move(img));
  }
  return seq;
}

std::vector<const Image*> downsample_frames(const FrameSequence& seq,
                                            int max_frames) {
  std::vector<const Image*> out;
  const int n = static_cast<int>(seq.frames.size());
  if (n <= max_frames) {
    for (const auto& f : seq.frames) out.push_back(&f);
    return out;
  }
  for (int i = 0; i < max_frames; ++i) {
    const int idx = static_cast<int>(
        static_cast<long>(i) * (n - 1) / std::max(1, max_frames - 1));
    out.push_back(&seq.frames[static_cast<size_t>(idx)]);
  }
  return out;
}

}  // namespace myolab
