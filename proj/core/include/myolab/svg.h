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

#ifndef MYOLAB_SVG_H_
#define MYOLAB_SVG_H_

#include <string>

#include "myolab/reward.h"

namespace myolab {

// Stage-by-term heatmap of the normalized weights.
std::string heatmap_svg(const WeightMatrix& wm);
void write_heatmap_svg(const std::string& path, const WeightMatrix& wm);

}  // namespace myolab

#endif  // MYOLAB_SVG_H_
