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

#include "myolab/judge.h"

#include <cctype>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "myolab/prompts.h"
#include "myolab/util.h"

namespace myolab {

using nlohmann::ordered_json;

namespace {

double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

struct TrajectoryDiagnostics {
  double displacement = 0.0;     // up to the fall, if any
  bool fell = false;
  double fall_time = 0.0;
  double mean_abs_torso_angle = 0.0;
  double mean_effort = 0.0;      // mean over steps of sum u^2
  double final_pos_error = 0.0;
  double final_ang_error = 0.0;
};

TrajectoryDiagnostics diagnose(const TaskSpec& task, const Morphology& m,
                               const Trajectory& traj) {
  TrajectoryDiagnostics d;
  if (traj.steps.empty()) return d;

  Kinematics kin;
  forward_kinematics(m, traj.initial_state.joints.q,
                     traj.initial_state.joints.qdot, kin);
  const double x0 = kin.pos[static_cast<size_t>(m.torso_link)].x();

  double x_last = x0;
  for (const auto& row : traj.steps) {
    forward_kinematics(m, row.state.joints.q, row.state.joints.qdot, kin);
    const Eigen::Vector2d torso = kin.pos[static_cast<size_t>(m.torso_link)];
    d.mean_abs_torso_angle +=
        std::abs(wrap_angle(kin.ang[static_cast<size_t>(m.torso_link)]));
    d.mean_effort += row.control.squaredNorm();
    if (!d.fell) {
      x_last = torso.x();
      if (torso.y() < m.fall_height) {
        d.fell = true;
        d.fall_time = row.state.t;
      }
    }
  }
  const double steps = static_cast<double>(traj.steps.size());
  d.mean_abs_torso_angle /= steps;
  d.mean_effort /= steps;
  d.displacement = x_last - x0;

  const SystemState& last = traj.steps.back().state;
  if (task.target_position) {
    Eigen::Vector2d tracked;
    bool have = false;
    if (last.object) {
      tracked = Eigen::Vector2d(last.object->x, last.object->y);
      have = true;
      if (task.target_angle) {
        d.final_ang_error =
            std::abs(wrap_angle(last.object->angle - *task.target_angle));
      }
    } else if (m.end_effector) {
      forward_kinematics(m, last.joints.q, last.joints.qdot, kin);
      tracked =
          point_position(kin, m.end_effector->link, m.end_effector->local);
      have = true;
    }
    if (have) d.final_pos_error = (tracked - *task.target_position).norm();
  }
  return d;
}

}  // namespace

double oracle_score(const TaskSpec& task, const Morphology& m,
                    const Trajectory& traj) {
  if (traj.steps.empty()) throw SimError("oracle_score: empty trajectory");
  const TrajectoryDiagnostics d = diagnose(task, m, traj);
  if (task.locomotion) {
    return d.displacement;  // displacement accrues only until a fall
  }
  return -(d.final_pos_error + 0.5 * d.final_ang_error);
}

OracleJudge::OracleJudge(const TaskSpec& task, const Morphology& m)
    : task_(task), morphology_(m) {}

Verdict OracleJudge::compare(const MotionDescription& /*desc*/,
                             const Trajectory& challenger,
                             const Trajectory* incumbent) {
  Verdict v;
  if (!incumbent) {
    v.choice = Verdict::Choice::kFirst;
    v.justification = "no incumbent yet";
    return v;
  }
  const double cs = oracle_score(task_, morphology_, challenger);
  const double is = oracle_score(task_, morphology_, *incumbent);
  if (cs > is) {
    v.choice = Verdict::Choice::kFirst;
  } else {
    v.choice = Verdict::Choice::kSecond;  // ties keep the incumbent
  }
  std::ostringstream ss;
  ss << "oracle scores: challenger " << cs << ", incumbent " << is;
  v.justification = ss.str();
  return v;
}

Feedback OracleJudge::critique(const MotionDescription& /*desc*/,
                               const Trajectory& best_traj,
                               const RewardProgram& best_program) {
  const TrajectoryDiagnostics d = diagnose(task_, morphology_, best_traj);
  const double score = task_.locomotion
                           ? d.displacement
                           : -(d.final_pos_error + 0.5 * d.final_ang_error);

  Feedback fb;
  fb.task_success = score >= task_.success_threshold;
  std::ostringstream issues;

  auto suggest = [&](const std::string& feature) {
    Suggestion s;
    s.term = feature;
    if (best_program.term_index(feature) >= 0) {
      s.action = SuggestionAction::kIncrease;
    } else {
      s.action = SuggestionAction::kAdd;
      s.definition_hint = feature;
    }
    fb.suggestions.push_back(std::move(s));
  };

  if (task_.locomotion) {
    if (d.fell) {
      issues << "The model loses balance and falls at t=" << d.fall_time
             << " s after " << d.displacement << " m. ";
      suggest("balance");
      suggest("height");
    }
    if (score < task_.success_threshold) {
      issues << "Forward progress is " << d.displacement
             << " m, short of the target. ";
      suggest("forward_velocity");
    }
    if (d.mean_effort > 0.25 * morphology_.muscle_count()) {
      issues << "Muscle commands stay near saturation, wasting effort. ";
      suggest("effort");
    }
    if (d.mean_abs_torso_angle > 0.3) {
      issues << "The torso leans " << d.mean_abs_torso_angle
             << " rad from vertical on average. ";
      suggest("torso_uprightness");
    }
  } else {
    if (!fb.task_success) {
      issues << "Final position error " << d.final_pos_error
             << " m, orientation error " << d.final_ang_error << " rad. ";
      if (d.final_pos_error >= 0.5 * d.final_ang_error) {
        suggest("target_position_error");
      } else {
        suggest("target_orientation_error");
      }
    }
    if (d.mean_effort > 0.25 * morphology_.muscle_count()) {
      issues << "Muscle commands stay near saturation, wasting effort. ";
      suggest("effort");
    }
  }
  if (fb.suggestions.empty()) {
    issues << "The task is completed; no changes needed.";
  }
  fb.issues = issues.str();
  return fb;
}

// ---------------------------------------------------------------------------
// Endpoint judge
// ---------------------------------------------------------------------------

EndpointJudge::EndpointJudge(Transport& transport, EndpointConfig config,
                             const TaskSpec& task, const Morphology& m,
                             const Terrain& terrain,
                             EndpointJudgeOptions options)
    : transport_(transport),
      config_(std::move(config)),
      task_(task),
      morphology_(m),
      terrain_(terrain),
      options_(options) {}

std::vector<ContentPart> EndpointJudge::frame_parts(const Trajectory& traj) {
  RenderOptions ro = options_.render;
  ro.rate = options_.frame_rate;
  const FrameSequence seq =
      render_frames(traj, morphology_, terrain_, task_, ro);
  std::vector<ContentPart> parts;
  for (const Image* frame : downsample_frames(seq, options_.max_frames)) {
    ContentPart p;
    p.kind = ContentPart::Kind::kImagePng;
    p.png_bytes = png_bytes(*frame);
    parts.push_back(std::move(p));
  }
  return parts;
}

Verdict EndpointJudge::compare(const MotionDescription& desc,
                               const Trajectory& challenger,
                               const Trajectory* incumbent) {
  if (!incumbent) {
    Verdict v;
    v.choice = Verdict::Choice::kFirst;
    v.justification = "no incumbent yet";
    return v;
  }
  const std::string prompt =
      fill_template(selection_prompt_template(), {{"task", desc.text}});

  ChatMessage msg;
  msg.role = "user";
  msg.parts.push_back({ContentPart::Kind::kText, prompt, {}});
  msg.parts.push_back({ContentPart::Kind::kText, "Frames of the first run:", {}});
  for (auto& p : frame_parts(challenger)) msg.parts.push_back(std::move(p));
  msg.parts.push_back(
      {ContentPart::Kind::kText, "Frames of the second run:", {}});
  for (auto& p : frame_parts(*incumbent)) msg.parts.push_back(std::move(p));

  const std::string request = build_chat_request(config_.model, {msg});
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    const std::string content =
        extract_response_content(transport_.post(request));
    if (auto choice = parse_selection(content)) {
      Verdict v;
      v.choice = *choice;
      v.justification = content;
      return v;
    }
  }
  Verdict v;  // conservative fallback: keep the incumbent
  v.choice = Verdict::Choice::kSecond;
  v.justification = "unparseable selection response; keeping incumbent";
  return v;
}

Feedback EndpointJudge::critique(const MotionDescription& desc,
                                 const Trajectory& best_traj,
                                 const RewardProgram& best_program) {
  const std::string prompt = fill_template(
      feedback_prompt_template(),
      {{"task", desc.text},
       {"residual_terms", serialize_program(best_program)},
       {"max_weight", format_double(options_.max_weight)},
       {"catalog", catalog_summary()}});

  ChatMessage msg;
  msg.role = "user";
  msg.parts.push_back({ContentPart::Kind::kText, prompt, {}});
  for (auto& p : frame_parts(best_traj)) msg.parts.push_back(std::move(p));

  const std::string request = build_chat_request(config_.model, {msg});
  std::string content;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    content = extract_response_content(transport_.post(request));
    if (auto fb = parse_feedback(content)) return *fb;
  }
  throw TransportError("feedback response missing YES/NO verdict: " + content);
}

// ---------------------------------------------------------------------------
// Parsers
// ---------------------------------------------------------------------------

std::optional<Verdict::Choice> parse_selection(const std::string& response) {
  size_t i = 0;
  while (i < response.size() &&
         std::isspace(static_cast<unsigned char>(response[i]))) {
    ++i;
  }
  std::string word;
  while (i < response.size() &&
         std::isalpha(static_cast<unsigned char>(response[i]))) {
    word.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(response[i]))));
    ++i;
  }
  if (word == "first") return Verdict::Choice::kFirst;
  if (word == "second") return Verdict::Choice::kSecond;
  return std::nullopt;
}

namespace {

// standalone uppercase YES/NO with word boundaries
std::optional<bool> find_yes_no(const std::string& text) {
  auto boundary = [&](size_t pos, size_t len) {
    const bool left_ok =
        pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
    const size_t end = pos + len;
    const bool right_ok =
        end >= text.size() ||
        !std::isalnum(static_cast<unsigned char>(text[end]));
    return left_ok && right_ok;
  };
  size_t yes = std::string::npos, no = std::string::npos;
  for (size_t pos = text.find("YES"); pos != std::string::npos;
       pos = text.find("YES", pos + 1)) {
    if (boundary(pos, 3)) {
      yes = pos;
      break;
    }
  }
  for (size_t pos = text.find("NO"); pos != std::string::npos;
       pos = text.find("NO", pos + 1)) {
    if (boundary(pos, 2)) {
      no = pos;
      break;
    }
  }
  if (yes == std::string::npos && no == std::string::npos) return std::nullopt;
  if (yes == std::string::npos) return false;
  if (no == std::string::npos) return true;
  return yes < no;
}

std::optional<Suggestion> parse_suggest_line(const std::string& line) {
  std::istringstream ss(line);
  std::string keyword, action_text, term;
  ss >> keyword >> action_text >> term;
  if (keyword != "SUGGEST") return std::nullopt;

  Suggestion s;
  if (action_text == "add") {
    s.action = SuggestionAction::kAdd;
  } else if (action_text == "remove") {
    s.action = SuggestionAction::kRemove;
  } else if (action_text == "increase") {
    s.action = SuggestionAction::kIncrease;
  } else if (action_text == "decrease") {
    s.action = SuggestionAction::kDecrease;
  } else {
    return std::nullopt;
  }
  if (!find_feature(term)) return std::nullopt;  // catalog names only
  s.term = term;

  std::string rest;
  std::getline(ss, rest);
  const size_t at = rest.find('@');
  const size_t dashes = rest.find("--");
  if (at != std::string::npos && (dashes == std::string::npos || at < dashes)) {
    try {
      const double w = std::stod(rest.substr(at + 1));
      if (w >= 0) s.proposed_weight = w;
    } catch (...) {
    }
  }
  if (dashes != std::string::npos) {
    size_t h = dashes + 2;
    while (h < rest.size() &&
           std::isspace(static_cast<unsigned char>(rest[h]))) {
      ++h;
    }
    s.definition_hint = rest.substr(h);
  }
  if (s.action == SuggestionAction::kAdd && s.definition_hint.empty()) {
    s.definition_hint = s.term;
  }
  return s;
}

}  // namespace

std::optional<Feedback> parse_feedback(const std::string& response) {
  const auto verdict = find_yes_no(response);
  if (!verdict) return std::nullopt;

  Feedback fb;
  fb.task_success = *verdict;

  // issues: the text between the b) and c) markers when present
  const size_t b = response.find("b)");
  const size_t c = response.find("c)", b == std::string::npos ? 0 : b);
  if (b != std::string::npos) {
    const size_t end = c == std::string::npos ? response.size() : c;
    fb.issues = response.substr(b + 2, end - b - 2);
  } else {
    fb.issues = response;
  }

  std::istringstream lines(response);
  std::string line;
  while (std::getline(lines, line)) {
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line.compare(start, 7, "SUGGEST") != 0) continue;
    if (auto s = parse_suggest_line(line.substr(start))) {
      fb.suggestions.push_back(std::move(*s));
    }
  }
  return fb;
}

// ---------------------------------------------------------------------------
// JSON round-trips
// ---------------------------------------------------------------------------

namespace {

const char* action_name(SuggestionAction a) {
  switch (a) {
    case SuggestionAction::kAdd: return "add";
    case SuggestionAction::kRemove: return "remove";
    case SuggestionAction::kIncrease: return "increase";
    case SuggestionAction::kDecrease: return "decrease";
  }
  return "?";
}

SuggestionAction action_from(const std::string& name) {
  if (name == "add") return SuggestionAction::kAdd;
  if (name == "remove") return SuggestionAction::kRemove;
  if (name == "increase") return SuggestionAction::kIncrease;
  if (name == "decrease") return SuggestionAction::kDecrease;
  throw std::runtime_error("unknown suggestion action: " + name);
}

}  // namespace

std::string verdict_to_json(const Verdict& verdict) {
  ordered_json j;
  j["choice"] = verdict.choice == Verdict::Choice::kFirst ? "first" : "second";
  j["justification"] = verdict.justification;
  return j.dump(2);
}

Verdict verdict_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  Verdict v;
  v.choice = j.at("choice") == "first" ? Verdict::Choice::kFirst
                                       : Verdict::Choice::kSecond;
  v.justification = j.at("justification");
  return v;
}

std::string feedback_to_json(const Feedback& feedback) {
  ordered_json j;
  j["task_success"] = feedback.task_success ? "yes" : "no";
  j["issues"] = feedback.issues;
  j["suggestions"] = ordered_json::array();
  for (const auto& s : feedback.suggestions) {
    ordered_json js;
    js["term"] = s.term;
    js["action"] = action_name(s.action);
    if (s.proposed_weight) js["proposed_weight"] = *s.proposed_weight;
    if (!s.definition_hint.empty()) js["definition_hint"] = s.definition_hint;
    j["suggestions"].push_back(std::move(js));
  }
  return j.dump(2);
}

Feedback feedback_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  Feedback fb;
  fb.task_success = j.at("task_success") == "yes";
  fb.issues = j.at("issues");
  for (const auto& js : j.at("suggestions")) {
    Suggestion s;
    s.term = js.at("term");
    s.action = action_from(js.at("action"));
    if (js.contains("proposed_weight")) s.proposed_weight = js["proposed_weight"];
    if (js.contains("definition_hint")) s.definition_hint = js["definition_hint"];
    fb.suggestions.push_back(std::move(s));
  }
  return fb;
}

}  // namespace myolab
