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

#ifndef MYOLAB_RENDER_H_
#define MYOLAB_RENDER_H_

#include "myolab/image.h"
#include "myolab/rollout.h"
#include "myolab/tasks.h"

namespace myolab {

struct FrameSequence {
  std::vector<Image> frames;
  double rate = 10.0;          // Hz
  double window_width = 4.0;   // camera window (m)
};

struct RenderOptions {
  double rate = 10.0;
  int width = 320;
  int height = 180;
  double window_width = 4.0;
};

// Planar stick-figure frames: links as line segments, the ground profile,
// and the task target marker when one exists. The camera follows the torso
// x-position. Deterministic for identical inputs. Frame count is
// ceil(duration * rate).
FrameSequence render_frames(const Trajectory& traj, const Morphology& m,
                            const Terrain& terrain, const TaskSpec& task,
                            const RenderOptions& options = {});

// At most max_frames, evenly spaced; used to bound judge payloads.
std::vector<const Image*> downsample_frames(const FrameSequence& seq,
                                            int max_frames);

}  // namespace myolab

#endif  // MYOLAB_RENDER_H_
