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

#include "myolab/reward.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "myolab/util.h"

namespace {

using namespace myolab;

FeatureFrame test_frame(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot,
                        std::initializer_list<std::pair<FeatureId, double>>
                            values = {}) {
  static Eigen::VectorXd q_store, qdot_store;
  q_store = q;
  qdot_store = qdot;
  FeatureFrame frame;
  frame.q = &q_store;
  frame.qdot = &qdot_store;
  frame.contact = {1, 0};
  for (const auto& [id, v] : values) frame.scalars[static_cast<int>(id)] = v;
  return frame;
}

// ---------------------------------------------------------------------------
// random program generator for the round-trip property
// ---------------------------------------------------------------------------

std::unique_ptr<Expr> random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 4);
  std::uniform_real_distribution<double> num(-5.0, 5.0);
  auto node = std::make_unique<Expr>();
  switch (pick(rng)) {
    case 0: {
      node->kind = Expr::Kind::kNumber;
      node->number = num(rng);
      break;
    }
    case 1: {
      node->kind = Expr::Kind::kFeature;
      const auto& catalog = feature_catalog();
      std::uniform_int_distribution<size_t> fpick(0, catalog.size() - 1);
      const FeatureInfo& info = catalog[fpick(rng)];
      node->feature = info.id;
      if (info.parameterized) {
        std::uniform_int_distribution<int> arg(0, 2);
        node->feature_arg = arg(rng);
      }
      break;
    }
    case 2: {
      node->kind = Expr::Kind::kUnary;
      node->unary_op = Expr::UnaryOp::kNeg;
      node->args.push_back(random_expr(rng, depth - 1));
      // the parser folds -number into a literal; mirror that here
      if (node->args[0]->kind == Expr::Kind::kNumber) {
        auto folded = std::move(node->args[0]);
        folded->number = -folded->number;
        return folded;
      }
      break;
    }
    case 3: {
      node->kind = Expr::Kind::kBinary;
      std::uniform_int_distribution<int> op(0, 8);
      node->binary_op = static_cast<Expr::BinaryOp>(op(rng));
      node->args.push_back(random_expr(rng, depth - 1));
      node->args.push_back(random_expr(rng, depth - 1));
      // single comparison level: no comparison directly under comparison
      auto is_cmp = [](const Expr& e) {
        return e.kind == Expr::Kind::kBinary &&
               e.binary_op >= Expr::BinaryOp::kLt;
      };
      if (is_cmp(*node) && (is_cmp(*node->args[0]) || is_cmp(*node->args[1]))) {
        node->binary_op = Expr::BinaryOp::kAdd;
      }
      break;
    }
    default: {
      node->kind = Expr::Kind::kCall;
      std::uniform_int_distribution<int> fn(0, 5);
      node->call_fn = static_cast<Expr::CallFn>(fn(rng));
      const int arity = node->call_fn == Expr::CallFn::kClamp  ? 3
                        : node->call_fn == Expr::CallFn::kMin  ? 2
                        : node->call_fn == Expr::CallFn::kMax  ? 2
                                                               : 1;
      for (int i = 0; i < arity; ++i) {
        node->args.push_back(random_expr(rng, depth - 1));
      }
      break;
    }
  }
  return node;
}

RewardProgram random_program(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> weight(0.0, 10.0);
  RewardProgram p;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    p.terms.emplace_back("t" + std::to_string(i), random_expr(rng, 4));
    p.weights.push_back(weight(rng));
  }
  return p;
}

TEST_CASE("grammar basics") {
  const RewardProgram p = parse_program("term forward { forward_velocity } @ 1.0");
  REQUIRE(p.terms.size() == 1);
  CHECK(p.terms[0].name == "forward");
  CHECK(p.weights[0] == 1.0);
  CHECK(p.terms[0].expr->kind == Expr::Kind::kFeature);
  CHECK(p.terms[0].expr->feature == FeatureId::kForwardVelocity);
}

TEST_CASE("parse errors carry positions and names") {
  CHECK_THROWS_WITH_AS(parse_program("term bad { nonexistent_feature } @ 1"),
                       doctest::Contains("nonexistent_feature"), ParseError);
  CHECK_THROWS_AS(parse_program("term a { height } @ 1\nterm a { balance } @ 1"),
                  ParseError);
  CHECK_THROWS_AS(parse_program("term a { height } @ -2"), ParseError);
  CHECK_THROWS_AS(parse_program("term a { height + } @ 1"), ParseError);
  CHECK_THROWS_AS(parse_program("term a { clamp(height, 0) } @ 1"), ParseError);
  CHECK_THROWS_AS(parse_program("term a { joint_angle(1.5) } @ 1"), ParseError);
  try {
    parse_program("term a {\n  height +\n} @ 1");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
}

TEST_CASE("comments and whitespace are ignored") {
  const RewardProgram p = parse_program(
      "# walking reward\nterm height { height } @ 2\n"
      "term fwd { forward_velocity } @ 1  # main driver\n");
  CHECK(p.terms.size() == 2);
}

TEST_CASE("serialize-parse round trip on 500 random programs") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const RewardProgram p = random_program(rng);
    const std::string text = serialize_program(p);
    const RewardProgram q = parse_program(text);
    CHECK(serialize_program(q) == text);
  }
}

TEST_CASE("walking-style program evaluates to the dot product") {
  // structure: w_height * r_height + w_balance * r_balance + w_forward * r_forward
  const RewardProgram p = parse_program(
      "term height { height } @ 1\n"
      "term balance { balance } @ 1\n"
      "term forward { forward_velocity } @ 1\n");
  const FeatureFrame frame = test_frame(
      Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3),
      {{FeatureId::kHeight, 0.2},
       {FeatureId::kBalance, 0.3},
       {FeatureId::kForwardVelocity, 0.5}});
  const StepReward r = eval_step_reward(p, frame);
  CHECK(r.total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r.per_term[0] == 0.2);
  CHECK(r.per_term[1] == 0.3);
  CHECK(r.per_term[2] == 0.5);
}

TEST_CASE("empty program evaluates to zero") {
  const RewardProgram p;
  const FeatureFrame frame =
      test_frame(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
  CHECK(eval_step_reward(p, frame).total == 0.0);
}

TEST_CASE("linearity in the weights") {
  std::mt19937_64 rng(5);
  const FeatureFrame frame = test_frame(
      Eigen::VectorXd::Constant(3, 0.4), Eigen::VectorXd::Constant(3, -0.2),
      {{FeatureId::kHeight, 0.9},
       {FeatureId::kBalance, -0.1},
       {FeatureId::kEffort, 2.0}});
  int tested = 0;
  for (int trial = 0; trial < 80 && tested < 40; ++trial) {
    RewardProgram p = random_program(rng);
    StepReward base;
    try {
      base = eval_step_reward(p, frame);
    } catch (const EvalError&) {
      continue;  // skip programs that are non-finite on this frame
    }
    ++tested;
    const double alpha = 3.0;
    RewardProgram scaled = p;
    for (auto& w : scaled.weights) w *= alpha;
    const StepReward s = eval_step_reward(scaled, frame);
    CHECK(s.total == doctest::Approx(alpha * base.total).epsilon(1e-12));
    CHECK(s.per_term == base.per_term);  // per-term values unchanged
  }
  CHECK(tested >= 40);
}

TEST_CASE("evaluation is bitwise deterministic") {
  const RewardProgram p = parse_program(
      "term a { height * 2 + balance } @ 2\nterm b { effort / 3 } @ 3\n");
  const FeatureFrame frame = test_frame(
      Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
      {{FeatureId::kHeight, 1.5},
       {FeatureId::kBalance, 0.25},
       {FeatureId::kEffort, 6.0}});
  const StepReward a = eval_step_reward(p, frame);
  const StepReward b = eval_step_reward(p, frame);
  CHECK(a.total == b.total);
  CHECK(a.per_term == b.per_term);
}

TEST_CASE("guarded division and comparisons") {
  const RewardProgram p =
      parse_program("term g { 1 / (height - height) } @ 1\n"
                    "term c { (height > 0.5) + (height <= 0.5) } @ 1\n");
  const FeatureFrame frame =
      test_frame(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                 {{FeatureId::kHeight, 0.9}});
  const StepReward r = eval_step_reward(p, frame);
  CHECK(r.per_term[0] == 0.0);  // guard returns 0
  CHECK(r.guard_count == 1);
  CHECK(r.per_term[1] == 1.0);  // exactly one comparison true
}

TEST_CASE("non-finite terms raise an error naming the term") {
  const RewardProgram p = parse_program("term blowup { exp(1000000 * height) } @ 1");
  const FeatureFrame frame =
      test_frame(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
                 {{FeatureId::kHeight, 1.0}});
  CHECK_THROWS_WITH_AS(eval_step_reward(p, frame),
                       doctest::Contains("blowup"), EvalError);
}

TEST_CASE("feature argument bounds are checked at evaluation") {
  const RewardProgram p = parse_program("term j { joint_angle(7) } @ 1");
  const FeatureFrame frame =
      test_frame(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3));
  CHECK_THROWS_WITH_AS(eval_step_reward(p, frame), doctest::Contains("j"),
                       EvalError);
}

TEST_CASE("probe_eval accepts constants and flags blowups") {
  const TaskBundle task = build_task("walker_flat", 1);
  TaskContext context;
  context.spec = task.spec;

  const RewardProgram constant = parse_program("term c { 1.0 } @ 1");
  CHECK(probe_eval(constant, task.morphology, task.terrain, context,
                   task.initial_state)
            .ok);

  const RewardProgram guarded = parse_program("term g { height / 0 } @ 1");
  const ProbeResult pr = probe_eval(guarded, task.morphology, task.terrain,
                                    context, task.initial_state);
  CHECK(pr.ok);
  CHECK(pr.guard_count > 0);

  const RewardProgram blowup =
      parse_program("term boom { exp(1000000 * height) } @ 1");
  const ProbeResult bad = probe_eval(blowup, task.morphology, task.terrain,
                                     context, task.initial_state);
  CHECK(!bad.ok);
  CHECK(bad.error.find("boom") != std::string::npos);
}

TEST_CASE("weight matrix: union rows, normalized columns") {
  RewardProgram s0 = parse_program("term a { height } @ 2\nterm b { balance } @ 3");
  RewardProgram s1 = parse_program("term a { height } @ 1\nterm c { effort } @ 1");
  s0.stage_id = 0;
  s1.stage_id = 1;
  const WeightMatrix wm = weight_matrix({s0, s1});
  REQUIRE(wm.terms == std::vector<std::string>{"a", "b", "c"});
  CHECK(wm.raw(0, 0) == 2.0);
  CHECK(wm.raw(1, 0) == 3.0);
  CHECK(wm.raw(2, 0) == 0.0);  // absent at stage 0
  CHECK(wm.normalized(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(wm.normalized(1, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(wm.normalized.col(1).lpNorm<1>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!wm.degenerate[0]);

  // all-zero stage is kept as zeros and flagged
  RewardProgram zero = parse_program("term a { height } @ 0");
  zero.stage_id = 0;
  const WeightMatrix z = weight_matrix({zero});
  CHECK(z.normalized(0, 0) == 0.0);
  CHECK(static_cast<bool>(z.degenerate[0]));
}

TEST_CASE("weight matrix csv round trip is exact") {
  std::mt19937_64 rng(33);
  std::vector<RewardProgram> stages;
  for (int s = 0; s < 5; ++s) {
    stages.push_back(random_program(rng));
    stages.back().stage_id = s;
  }
  const WeightMatrix wm = weight_matrix(stages);
  const std::string path = "reward_test_matrix.csv";
  write_weight_matrix_csv(path, wm.terms, wm.raw);
  std::vector<std::string> terms;
  Eigen::MatrixXd back;
  read_weight_matrix_csv(path, terms, back);
  std::filesystem::remove(path);
  CHECK(terms == wm.terms);
  REQUIRE(back.rows() == wm.raw.rows());
  REQUIRE(back.cols() == wm.raw.cols());
  CHECK(back == wm.raw);
}

}  // namespace
