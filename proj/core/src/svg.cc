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

#include "myolab/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "myolab/util.h"

namespace myolab {

namespace {

// white -> deep blue ramp
std::string cell_color(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255 - 205 * v));
  const int g = static_cast<int>(std::lround(255 - 185 * v));
  const int b = static_cast<int>(std::lround(255 - 95 * v));
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string heatmap_svg(const WeightMatrix& wm) {
  const int rows = static_cast<int>(wm.normalized.rows());
  const int cols = static_cast<int>(wm.normalized.cols());
  const int cell = 26;
  const int label_w = 170;
  const int top = 30;
  const int width = label_w + cols * cell + 10;
  const int height = top + rows * cell + 10;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" font-family=\"monospace\" "
      << "font-size=\"11\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  for (int s = 0; s < cols; ++s) {
    out << "<text x=\"" << label_w + s * cell + cell / 2 << "\" y=\""
        << top - 8 << "\" text-anchor=\"middle\">" << s << "</text>\n";
  }
  for (int r = 0; r < rows; ++r) {
    out << "<text x=\"" << label_w - 6 << "\" y=\""
        << top + r * cell + cell / 2 + 4 << "\" text-anchor=\"end\">"
        << wm.terms[static_cast<size_t>(r)] << "</text>\n";
    for (int s = 0; s < cols; ++s) {
      out << "<rect x=\"" << label_w + s * cell << "\" y=\"" << top + r * cell
          << "\" width=\"" << cell - 1 << "\" height=\"" << cell - 1
          << "\" fill=\"" << cell_color(wm.normalized(r, s)) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

void write_heatmap_svg(const std::string& path, const WeightMatrix& wm) {
  write_file_atomic(path, heatmap_svg(wm));
}

}  // namespace myolab
