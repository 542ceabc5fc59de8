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

#ifndef MYOLAB_REWARD_H_
#define MYOLAB_REWARD_H_

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "myolab/features.h"

namespace myolab {

// Expression tree of the reward DSL. Pure, side-effect-free evaluation over
// catalog features; division by exact zero is guarded to 0 and counted.
//
//   program := term*
//   term    := "term" IDENT "{" expr "}" "@" number
//   expr    := comparison over {+,-,*,/}, unary minus,
//              abs/exp/tanh/min/max/clamp calls, numbers, features
//
// Comparisons evaluate to 0/1. '#' starts a line comment.
struct Expr {
  enum class Kind { kNumber, kFeature, kUnary, kBinary, kCall };
  enum class UnaryOp { kNeg };
  enum class BinaryOp { kAdd, kSub, kMul, kDiv, kLt, kLe, kGt, kGe, kEq };
  enum class CallFn { kAbs, kExp, kTanh, kMin, kMax, kClamp };

  Kind kind = Kind::kNumber;
  double number = 0.0;
  FeatureId feature{};
  int feature_arg = -1;  // parameterized features only
  UnaryOp unary_op{};
  BinaryOp binary_op{};
  CallFn call_fn{};
  std::vector<std::unique_ptr<Expr>> args;

  std::unique_ptr<Expr> clone() const;
  int size() const;  // node count; evaluation is O(size)
};

struct RewardTerm {
  std::string name;
  std::unique_ptr<Expr> expr;

  RewardTerm() = default;
  RewardTerm(std::string n, std::unique_ptr<Expr> e)
      : name(std::move(n)), expr(std::move(e)) {}
  RewardTerm(const RewardTerm& other);
  RewardTerm& operator=(const RewardTerm& other);
  RewardTerm(RewardTerm&&) = default;
  RewardTerm& operator=(RewardTerm&&) = default;
};

// Linear reward program: total = sum_k w_k * term_k. Weights are >= 0;
// penalties are expressed by negated expressions inside terms.
struct RewardProgram {
  std::vector<RewardTerm> terms;
  std::vector<double> weights;
  int stage_id = 0;

  int term_index(std::string_view name) const;  // -1 when absent
};

// ---------------------------------------------------------------------------
// Parse / serialize. serialize(parse(serialize(p))) == serialize(p).
// ---------------------------------------------------------------------------

// Throws ParseError (with position) on syntax errors, unknown features,
// duplicate term names, or negative weights.
RewardProgram parse_program(const std::string& text);

std::string serialize_program(const RewardProgram& program);
std::string serialize_expr(const Expr& expr);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct StepReward {
  double total = 0.0;
  Eigen::VectorXd per_term;
  int guard_count = 0;  // guarded divides taken
};

// Throws EvalError naming the term on non-finite values or bad feature args.
StepReward eval_step_reward(const RewardProgram& program,
                            const FeatureFrame& frame);

struct ProbeResult {
  bool ok = false;
  std::string error;
  int guard_count = 0;
};

// Evaluates the program on the task's initial state plus 10 deterministic
// perturbations of it; ok iff every term stays finite.
ProbeResult probe_eval(const RewardProgram& program, const Morphology& m,
                       const Terrain& terrain, const TaskContext& context,
                       const SystemState& s0);

// ---------------------------------------------------------------------------
// Weight evolution
// ---------------------------------------------------------------------------

struct WeightMatrix {
  std::vector<std::string> terms;  // rows, ordered by first appearance
  Eigen::MatrixXd raw;             // terms x stages
  Eigen::MatrixXd normalized;      // columns L1-normalized; zero cols kept
  std::vector<char> degenerate;    // per stage: all-zero weight column
};

WeightMatrix weight_matrix(const std::vector<RewardProgram>& history);

void write_weight_matrix_csv(const std::string& path,
                             const std::vector<std::string>& terms,
                             const Eigen::MatrixXd& matrix);

// Reads a CSV written by write_weight_matrix_csv. Round-trips exactly.
void read_weight_matrix_csv(const std::string& path,
                            std::vector<std::string>& terms,
                            Eigen::MatrixXd& matrix);

}  // namespace myolab

#endif  // MYOLAB_REWARD_H_
