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

#ifndef MYOLAB_IMAGE_H_
#define MYOLAB_IMAGE_H_

#include <cstdint>
#include <string>
#include <vector>

namespace myolab {

// Raw RGB raster; the canonical frame form is binary PPM (P6).
struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h, uint8_t r = 255, uint8_t g = 255, uint8_t b = 255);

  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
  void fill(uint8_t r, uint8_t g, uint8_t b);
  // 2x2 block around (x,y); lines drawn with this read clearly at low res
  void blot(int x, int y, uint8_t r, uint8_t g, uint8_t b);
  void line(int x0, int y0, int x1, int y1, uint8_t r, uint8_t g, uint8_t b);

  bool operator==(const Image& other) const = default;
};

std::string ppm_bytes(const Image& image);
void write_ppm(const std::string& path, const Image& image);
Image read_ppm(const std::string& path);

// zlib-backed PNG encoding (8-bit RGB, filter 0).
std::string png_bytes(const Image& image);
void write_png(const std::string& path, const Image& image);

}  // namespace myolab

#endif  // MYOLAB_IMAGE_H_
