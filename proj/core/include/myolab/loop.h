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

#ifndef MYOLAB_LOOP_H_
#define MYOLAB_LOOP_H_

#include <optional>
#include <string>
#include <vector>

#include "myolab/control.h"
#include "myolab/judge.h"
#include "myolab/synth.h"

namespace myolab {

// Reward-learning loop configuration. Everything observable is derived from
// these fields plus the seeds, so identical configs give byte-identical run
// directories (wall-clock timings live in a separate file).
struct RunConfig {
  std::string task_id = "walker_flat";
  int iterations = 8;
  int samples_per_iter = 4;
  uint64_t seed_sim = 1;
  uint64_t seed_planner = 2;
  uint64_t seed_synth = 3;

  enum class JudgeMode { kOracle, kEndpoint };
  enum class SynthMode { kMock, kEndpoint };
  JudgeMode judge_mode = JudgeMode::kOracle;
  SynthMode synth_mode = SynthMode::kMock;

  std::string initial_program;  // DSL text; empty uses the task default
  std::string out_dir;
  double horizon_seconds = 10.0;
  double frame_rate = 10.0;
  double max_weight = 10.0;
  int jobs = 1;

  PlannerConfig planner;
  SimConfig sim;
};

std::string run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const std::string& text);

struct ProposalRecord {
  std::string program_path;
  std::string trajectory_path;
  std::string verdict_path;
  std::optional<double> oracle_score;  // oracle mode
  bool accepted = false;               // became the incumbent
};

struct IterationRecord {
  int index = 0;
  std::vector<ProposalRecord> proposals;
  std::string incumbent_program_path;
  std::string incumbent_trajectory_path;
  std::optional<double> incumbent_score;  // oracle mode
  std::string feedback_path;
  std::string frames_dir;
  std::vector<std::string> next_program_paths;  // proposals for i+1
  double wall_seconds = 0.0;  // not part of the deterministic history
};

struct RunHistory {
  RunConfig config;
  std::vector<IterationRecord> iterations;
  std::string final_program_path;
  bool failed = false;
  std::string failure;
};

// Optional dependency injection; null members are built from the config
// (endpoint modes read MYOLAB_ENDPOINT_* from the environment). Whatever
// transport is used gets wrapped so every request/response lands in
// <out_dir>/transcripts.
struct LoopDeps {
  Judge* judge = nullptr;
  Synthesizer* synth = nullptr;
  Transport* transport = nullptr;
};

// Runs the full loop: per iteration, roll out every candidate program under
// its MPC policy, judge each against the incumbent, critique the incumbent,
// and synthesize the next candidates. Every artifact is persisted before the
// next iteration starts. Judge/synthesis transport failures abort the run:
// the partial history is persisted and returned with failed set.
RunHistory run(const RunConfig& config, const LoopDeps& deps = {});

// Continues an interrupted run from its last completed iteration. With all
// iterations complete the history is returned unchanged.
RunHistory resume(const std::string& out_dir, const LoopDeps& deps = {});

// Loads and validates a persisted history; throws std::runtime_error naming
// the first missing or inconsistent record.
RunHistory load_history(const std::string& out_dir);

struct HeatmapFiles {
  std::string csv;      // normalized, column L1 sums = 1
  std::string raw_csv;
  std::string svg;
};

// Weight evolution of the per-stage incumbents.
HeatmapFiles export_heatmap(const std::string& out_dir);

}  // namespace myolab

#endif  // MYOLAB_LOOP_H_
