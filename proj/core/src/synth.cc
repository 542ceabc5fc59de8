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

#include "myolab/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "myolab/prompts.h"
#include "myolab/util.h"

namespace myolab {

Validation validate_proposal(const RewardProgram& program, const Morphology& m,
                             const Terrain& terrain, const TaskContext& context,
                             const SystemState& s0, double max_weight) {
  Validation v;
  for (size_t i = 0; i < program.weights.size(); ++i) {
    if (program.weights[i] < 0 || program.weights[i] > max_weight) {
      v.reason = "weight of term '" + program.terms[i].name +
                 "' outside [0, " + format_double(max_weight) + "]";
      return v;
    }
  }
  const ProbeResult probe = probe_eval(program, m, terrain, context, s0);
  if (!probe.ok) {
    v.reason = "probe failed: " + probe.error;
    return v;
  }
  v.accepted = true;
  return v;
}

namespace {

constexpr double kStepFactor = 1.5;

void apply_suggestion(RewardProgram& program, const Suggestion& s,
                      const SynthesisContext& ctx) {
  const int idx = program.term_index(s.term);
  switch (s.action) {
    case SuggestionAction::kIncrease:
    case SuggestionAction::kDecrease: {
      if (idx >= 0) {
        const double factor = s.action == SuggestionAction::kIncrease
                                  ? kStepFactor
                                  : 1.0 / kStepFactor;
        program.weights[static_cast<size_t>(idx)] =
            std::clamp(program.weights[static_cast<size_t>(idx)] * factor, 0.0,
                       ctx.max_weight);
        break;
      }
      if (s.action == SuggestionAction::kDecrease) break;  // nothing to lower
      [[fallthrough]];  // increase of a missing term inserts it
    }
    case SuggestionAction::kAdd: {
      // the hint names the catalog term to insert; fall back to the term name
      std::string feature = s.definition_hint;
      if (!find_feature(feature)) feature = s.term;
      const std::string text = canonical_term_text(feature, ctx.task);
      if (text.empty() || program.term_index(feature) >= 0) break;
      RewardProgram addition = parse_program(text);
      const double w = std::clamp(
          s.proposed_weight.value_or(0.1 * ctx.max_weight), 0.0, ctx.max_weight);
      program.terms.push_back(std::move(addition.terms.front()));
      program.weights.push_back(w);
      break;
    }
    case SuggestionAction::kRemove: {
      if (idx < 0) break;
      program.terms.erase(program.terms.begin() + idx);
      program.weights.erase(program.weights.begin() + idx);
      break;
    }
  }
}

void jitter_weights(RewardProgram& program, std::mt19937_64& rng,
                    double max_weight) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (auto& w : program.weights) {
    w = std::clamp(w * (1.0 + 0.1 * unit(rng)), 0.0, max_weight);
  }
}

}  // namespace

std::vector<Proposal> MockSynthesizer::propose(const SynthesisContext& ctx,
                                               int n, uint64_t seed) {
  if (n < 1) throw SimError("propose: n must be >= 1");
  std::mt19937_64 rng(splitmix64(seed));
  const auto& suggestions = ctx.feedback.suggestions;
  const size_t m = suggestions.size();

  std::vector<Proposal> out;
  for (int k = 0; k < n; ++k) {
    RewardProgram variant = ctx.incumbent;
    variant.stage_id = ctx.incumbent.stage_id + 1;
    bool jitter = true;
    if (m > 0) {
      // variant 0: every suggestion, applied exactly; variant k>0: the
      // first 1 + (k-1) mod m suggestions, plus jitter
      size_t take = m;
      if (k == 0) {
        jitter = false;
      } else {
        take = 1 + static_cast<size_t>(k - 1) % m;
      }
      for (size_t i = 0; i < take; ++i) {
        apply_suggestion(variant, suggestions[i], ctx);
      }
    }
    if (jitter) jitter_weights(variant, rng, ctx.max_weight);
    Proposal p;
    p.program = std::move(variant);
    p.provenance = Proposal::Provenance::kMock;
    p.attempt = k;
    out.push_back(std::move(p));
  }
  return out;
}

std::string extract_code_block(const std::string& response) {
  const size_t open = response.find("```");
  if (open == std::string::npos) return response;
  size_t body = response.find('\n', open);
  if (body == std::string::npos) return response;
  ++body;
  const size_t close = response.find("```", body);
  if (close == std::string::npos) return response.substr(body);
  return response.substr(body, close - body);
}

EndpointSynthesizer::EndpointSynthesizer(
    Transport& transport, EndpointConfig config,
    std::function<Validation(const RewardProgram&)> validator,
    EndpointSynthOptions options)
    : transport_(transport),
      config_(std::move(config)),
      validator_(std::move(validator)),
      options_(options) {}

std::vector<Proposal> EndpointSynthesizer::propose(const SynthesisContext& ctx,
                                                   int n, uint64_t /*seed*/) {
  if (n < 1) throw SimError("propose: n must be >= 1");

  std::string weight_history = "(first stage)";
  if (!ctx.history.empty()) {
    const WeightMatrix wm = weight_matrix(ctx.history);
    std::ostringstream ss;
    for (size_t r = 0; r < wm.terms.size(); ++r) {
      ss << wm.terms[r] << ":";
      for (int s = 0; s < wm.raw.cols(); ++s) {
        ss << " " << format_double(wm.raw(static_cast<int>(r), s));
      }
      ss << "\n";
    }
    weight_history = ss.str();
  }

  std::ostringstream feedback_text;
  feedback_text << "task completed: "
                << (ctx.feedback.task_success ? "YES" : "NO") << "\n"
                << ctx.feedback.issues << "\n";
  for (const auto& s : ctx.feedback.suggestions) {
    feedback_text << "SUGGEST "
                  << (s.action == SuggestionAction::kAdd        ? "add"
                      : s.action == SuggestionAction::kRemove   ? "remove"
                      : s.action == SuggestionAction::kIncrease ? "increase"
                                                                : "decrease")
                  << " " << s.term;
    if (s.proposed_weight) feedback_text << " @ " << *s.proposed_weight;
    if (!s.definition_hint.empty()) feedback_text << " -- " << s.definition_hint;
    feedback_text << "\n";
  }

  const std::string prompt = fill_template(
      synthesis_prompt_template(),
      {{"task", ctx.description.text},
       {"program", serialize_program(ctx.incumbent)},
       {"weight_history", weight_history},
       {"feedback_string", feedback_text.str()},
       {"max_weight", format_double(ctx.max_weight)},
       {"catalog", ctx.catalog}});

  ChatMessage msg;
  msg.role = "user";
  msg.parts.push_back({ContentPart::Kind::kText, prompt, {}});
  const std::string request = build_chat_request(config_.model, {msg});

  std::vector<Proposal> out;
  for (int k = 0; k < n; ++k) {
    bool accepted = false;
    std::string last_error;
    for (int attempt = 0; attempt < options_.retries && !accepted; ++attempt) {
      const std::string content =
          extract_response_content(transport_.post(request));
      try {
        RewardProgram program = parse_program(extract_code_block(content));
        program.stage_id = ctx.incumbent.stage_id + 1;
        const Validation v = validator_(program);
        if (!v.accepted) {
          last_error = v.reason;
          continue;
        }
        Proposal p;
        p.program = std::move(program);
        p.provenance = Proposal::Provenance::kEndpoint;
        p.attempt = attempt;
        out.push_back(std::move(p));
        accepted = true;
      } catch (const ParseError& e) {
        last_error = e.what();
      }
    }
    if (!accepted) {
      throw TransportError("no executable reward program after " +
                           std::to_string(options_.retries) +
                           " attempts; last error: " + last_error);
    }
  }
  return out;
}

}  // namespace myolab
