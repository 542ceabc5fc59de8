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

#include "myolab/image.h"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "myolab/util.h"

namespace myolab {

Image::Image(int w, int h, uint8_t r, uint8_t g, uint8_t b)
    : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3) {
  fill(r, g, b);
}

void Image::fill(uint8_t r, uint8_t g, uint8_t b) {
  for (size_t i = 0; i + 2 < rgb.size(); i += 3) {
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
}

void Image::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const size_t i = (static_cast<size_t>(y) * width + x) * 3;
  rgb[i] = r;
  rgb[i + 1] = g;
  rgb[i + 2] = b;
}

void Image::blot(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  set(x, y, r, g, b);
  set(x + 1, y, r, g, b);
  set(x, y + 1, r, g, b);
  set(x + 1, y + 1, r, g, b);
}

void Image::line(int x0, int y0, int x1, int y1, uint8_t r, uint8_t g,
                 uint8_t b) {
  const int dx = std::abs(x1 - x0), dy = std::abs(y1 - y0);
  const int steps = std::max(dx, dy);
  if (steps == 0) {
    blot(x0, y0, r, g, b);
    return;
  }
  for (int s = 0; s <= steps; ++s) {
    const int x = x0 + (x1 - x0) * s / steps;
    const int y = y0 + (y1 - y0) * s / steps;
    blot(x, y, r, g, b);
  }
}

std::string ppm_bytes(const Image& image) {
  std::ostringstream out;
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.rgb.data()),
            static_cast<std::streamsize>(image.rgb.size()));
  return out.str();
}

void write_ppm(const std::string& path, const Image& image) {
  write_file_atomic(path, ppm_bytes(image));
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open ppm: " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || maxval != 255 || w <= 0 || h <= 0) {
    throw std::runtime_error("unsupported ppm: " + path);
  }
  in.get();  // single whitespace after the header
  Image image(w, h);
  in.read(reinterpret_cast<char*>(image.rgb.data()),
          static_cast<std::streamsize>(image.rgb.size()));
  if (!in) throw std::runtime_error("truncated ppm: " + path);
  return image;
}

namespace {

void put_u32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
  put_u32(out, static_cast<uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(body.data()),
            static_cast<uInt>(body.size())));
  put_u32(out, crc);
}

}  // namespace

std::string png_bytes(const Image& image) {
  std::string raw;
  raw.reserve(static_cast<size_t>(image.height) * (image.width * 3 + 1));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back('\0');  // filter type 0 per scanline
    raw.append(reinterpret_cast<const char*>(image.rgb.data()) +
                   static_cast<size_t>(y) * image.width * 3,
               static_cast<size_t>(image.width) * 3);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png: deflate failed");
  }
  compressed.resize(bound);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<uint32_t>(image.width));
  put_u32(ihdr, static_cast<uint32_t>(image.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", "");
  return out;
}

void write_png(const std::string& path, const Image& image) {
  write_file_atomic(path, png_bytes(image));
}

}  // namespace myolab
