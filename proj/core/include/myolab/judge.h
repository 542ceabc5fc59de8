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

#ifndef MYOLAB_JUDGE_H_
#define MYOLAB_JUDGE_H_

#include <optional>
#include <string>
#include <vector>

#include "myolab/render.h"
#include "myolab/reward.h"
#include "myolab/rollout.h"
#include "myolab/tasks.h"
#include "myolab/transport.h"

namespace myolab {

struct MotionDescription {
  std::string text;
  std::string task_id;
};

struct Verdict {
  enum class Choice { kFirst, kSecond };
  Choice choice = Choice::kFirst;
  std::string justification;
};

enum class SuggestionAction { kAdd, kRemove, kIncrease, kDecrease };

struct Suggestion {
  std::string term;  // a catalog feature name
  SuggestionAction action = SuggestionAction::kIncrease;
  std::optional<double> proposed_weight;
  std::string definition_hint;  // required for kAdd
};

struct Feedback {
  bool task_success = false;
  std::string issues;
  std::vector<Suggestion> suggestions;
};

// ---------------------------------------------------------------------------
// Oracle scoring: forward displacement until a fall for locomotion,
// -(position error + 0.5 * orientation error) at the final step for
// manipulation.
// ---------------------------------------------------------------------------

double oracle_score(const TaskSpec& task, const Morphology& m,
                    const Trajectory& traj);

// ---------------------------------------------------------------------------
// Judge interface with a deterministic oracle and an endpoint client.
// ---------------------------------------------------------------------------

class Judge {
 public:
  virtual ~Judge() = default;

  // incumbent == nullptr means no incumbent yet: the challenger wins.
  virtual Verdict compare(const MotionDescription& desc,
                          const Trajectory& challenger,
                          const Trajectory* incumbent) = 0;

  virtual Feedback critique(const MotionDescription& desc,
                            const Trajectory& best_traj,
                            const RewardProgram& best_program) = 0;
};

// Pure rule-table judge keyed to the oracle score; ties favor the incumbent
// so the incumbent score is monotone across iterations.
class OracleJudge : public Judge {
 public:
  OracleJudge(const TaskSpec& task, const Morphology& m);

  Verdict compare(const MotionDescription& desc, const Trajectory& challenger,
                  const Trajectory* incumbent) override;
  Feedback critique(const MotionDescription& desc, const Trajectory& best_traj,
                    const RewardProgram& best_program) override;

 private:
  TaskSpec task_;
  Morphology morphology_;
};

struct EndpointJudgeOptions {
  double frame_rate = 10.0;
  int max_frames = 100;  // per trajectory in a comparison payload
  int retries = 3;
  double max_weight = 10.0;  // echoed in the feedback prompt
  RenderOptions render;
};

class EndpointJudge : public Judge {
 public:
  EndpointJudge(Transport& transport, EndpointConfig config,
                const TaskSpec& task, const Morphology& m,
                const Terrain& terrain, EndpointJudgeOptions options = {});

  Verdict compare(const MotionDescription& desc, const Trajectory& challenger,
                  const Trajectory* incumbent) override;
  Feedback critique(const MotionDescription& desc, const Trajectory& best_traj,
                    const RewardProgram& best_program) override;

 private:
  std::vector<ContentPart> frame_parts(const Trajectory& traj);

  Transport& transport_;
  EndpointConfig config_;
  TaskSpec task_;
  Morphology morphology_;
  Terrain terrain_;
  EndpointJudgeOptions options_;
};

// ---------------------------------------------------------------------------
// Response parsing (exposed for tests)
// ---------------------------------------------------------------------------

// Accepts exactly a leading "first"/"second" token (case-insensitive, word
// boundary enforced); anything else is nullopt.
std::optional<Verdict::Choice> parse_selection(const std::string& response);

// Parses the three-part feedback answer. Returns nullopt when the YES/NO
// verdict is missing. Suggestion lines that do not validate against the
// catalog are dropped.
std::optional<Feedback> parse_feedback(const std::string& response);

// JSON (de)serialization used by the run directory.
std::string verdict_to_json(const Verdict& verdict);
Verdict verdict_from_json(const std::string& text);
std::string feedback_to_json(const Feedback& feedback);
Feedback feedback_from_json(const std::string& text);

}  // namespace myolab

#endif  // MYOLAB_JUDGE_H_
