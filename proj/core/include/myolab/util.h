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

#ifndef MYOLAB_UTIL_H_
#define MYOLAB_UTIL_H_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace myolab {

// ----------------------------- error types --------------------------------

// Reward text that does not parse. Position is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line;
  int col;
};

// Reward term that evaluated to a non-finite value (or an invalid feature
// argument). Carries the offending term name.
class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& term, const std::string& msg)
      : std::runtime_error("term '" + term + "': " + msg), term(term) {}
  std::string term;
};

// Endpoint transport failure after retries.
class TransportError : public std::runtime_error {
 public:
  explicit TransportError(const std::string& msg) : std::runtime_error(msg) {}
};

// Simulation contract violation (bad dimensions, singular mass matrix, ...).
class SimError : public std::runtime_error {
 public:
  explicit SimError(const std::string& msg) : std::runtime_error(msg) {}
};

// ------------------------------- seeding ----------------------------------

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a stream-specific seed from a base seed and up to two indices.
// Used so that (iteration, sample) pairs get independent, resumable streams.
inline uint64_t mix_seed(uint64_t base, uint64_t a, uint64_t b = 0) {
  return splitmix64(base ^ splitmix64(a ^ splitmix64(b ^ 0x5bf03635ULL)));
}

// ----------------------------- formatting ---------------------------------

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// ------------------------------- file io ----------------------------------

std::string read_file(const std::string& path);

// Writes via a temp file + rename so readers never observe partial content.
void write_file_atomic(const std::string& path, const std::string& content);

// ------------------------------ threading ---------------------------------

// Runs fn(0..n-1) on up to `jobs` worker threads. Results must be written to
// disjoint slots; iteration order within a worker is ascending so timing can
// never change what gets computed.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace myolab

#endif  // MYOLAB_UTIL_H_
