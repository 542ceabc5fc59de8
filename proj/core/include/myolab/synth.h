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

#ifndef MYOLAB_SYNTH_H_
#define MYOLAB_SYNTH_H_

#include <functional>
#include <string>
#include <vector>

#include "myolab/judge.h"
#include "myolab/reward.h"
#include "myolab/transport.h"

namespace myolab {

struct SynthesisContext {
  MotionDescription description;
  std::string catalog;  // feature summary text
  Feedback feedback;
  RewardProgram incumbent;
  std::vector<RewardProgram> history;  // incumbents so far, for weight context
  double max_weight = 10.0;
  TaskContext task;  // canonical-term constants
};

struct Proposal {
  RewardProgram program;
  enum class Provenance { kEndpoint, kMock } provenance = Provenance::kMock;
  int attempt = 0;
};

struct Validation {
  bool accepted = false;
  std::string reason;
};

// Executability gate: parses cleanly (a given for in-memory programs),
// probes finite, and keeps weights in [0, max_weight].
Validation validate_proposal(const RewardProgram& program, const Morphology& m,
                             const Terrain& terrain, const TaskContext& context,
                             const SystemState& s0, double max_weight);

class Synthesizer {
 public:
  virtual ~Synthesizer() = default;
  // Every returned proposal has passed validation.
  virtual std::vector<Proposal> propose(const SynthesisContext& ctx, int n,
                                        uint64_t seed) = 0;
};

// Deterministic local search over the incumbent:
//  - increase/decrease scale the named weight by 1.5 / (1/1.5), clamped to
//    [0, max_weight]; increase of an absent term inserts its canonical form
//  - add inserts the canonical term named by the definition hint (suggested
//    weight, else 0.1 * max_weight); remove drops the term
//  - variant 0 applies every suggestion exactly; later variants apply
//    suggestion prefixes cycled over length, each with seeded +-10% weight
//    jitter. With no suggestions all variants are jitter-only.
class MockSynthesizer : public Synthesizer {
 public:
  std::vector<Proposal> propose(const SynthesisContext& ctx, int n,
                                uint64_t seed) override;
};

struct EndpointSynthOptions {
  int retries = 5;  // per proposal
};

class EndpointSynthesizer : public Synthesizer {
 public:
  EndpointSynthesizer(Transport& transport, EndpointConfig config,
                      std::function<Validation(const RewardProgram&)> validator,
                      EndpointSynthOptions options = {});

  std::vector<Proposal> propose(const SynthesisContext& ctx, int n,
                                uint64_t seed) override;

 private:
  Transport& transport_;
  EndpointConfig config_;
  std::function<Validation(const RewardProgram&)> validator_;
  EndpointSynthOptions options_;
};

// First fenced code block of a response (``` ... ```); the whole response
// when no fence is present.
std::string extract_code_block(const std::string& response);

}  // namespace myolab

#endif  // MYOLAB_SYNTH_H_
