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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "myolab/util.h"

namespace myolab {

std::unique_ptr<Expr> Expr::clone() const {
  auto out = std::make_unique<Expr>();
  out->kind = kind;
  out->number = number;
  out->feature = feature;
  out->feature_arg = feature_arg;
  out->unary_op = unary_op;
  out->binary_op = binary_op;
  out->call_fn = call_fn;
  out->args.reserve(args.size());
  for (const auto& a : args) out->args.push_back(a->clone());
  return out;
}

int Expr::size() const {
  int n = 1;
  for (const auto& a : args) n += a->size();
  return n;
}

RewardTerm::RewardTerm(const RewardTerm& other)
    : name(other.name), expr(other.expr ? other.expr->clone() : nullptr) {}

RewardTerm& RewardTerm::operator=(const RewardTerm& other) {
  if (this != &other) {
    name = other.name;
    expr = other.expr ? other.expr->clone() : nullptr;
  }
  return *this;
}

int RewardProgram::term_index(std::string_view name) const {
  for (size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

double feature_value(const FeatureFrame& frame, FeatureId id, int arg,
                     const std::string& term) {
  switch (id) {
    case FeatureId::kJointAngle:
    case FeatureId::kJointVelocity: {
      const Eigen::VectorXd& v =
          id == FeatureId::kJointAngle ? *frame.q : *frame.qdot;
      if (arg < 0 || arg >= v.size()) {
        throw EvalError(term, "joint index " + std::to_string(arg) +
                                  " out of range");
      }
      return v[arg];
    }
    case FeatureId::kContactFlag: {
      if (arg < 0 || arg >= static_cast<int>(frame.contact.size())) {
        throw EvalError(term, "contact index " + std::to_string(arg) +
                                  " out of range");
      }
      return frame.contact[static_cast<size_t>(arg)] ? 1.0 : 0.0;
    }
    default:
      return frame.scalar(id);
  }
}

double eval_expr(const Expr& e, const FeatureFrame& frame,
                 const std::string& term, int& guards) {
  switch (e.kind) {
    case Expr::Kind::kNumber:
      return e.number;
    case Expr::Kind::kFeature:
      return feature_value(frame, e.feature, e.feature_arg, term);
    case Expr::Kind::kUnary:
      return -eval_expr(*e.args[0], frame, term, guards);
    case Expr::Kind::kBinary: {
      const double a = eval_expr(*e.args[0], frame, term, guards);
      const double b = eval_expr(*e.args[1], frame, term, guards);
      switch (e.binary_op) {
        case Expr::BinaryOp::kAdd: return a + b;
        case Expr::BinaryOp::kSub: return a - b;
        case Expr::BinaryOp::kMul: return a * b;
        case Expr::BinaryOp::kDiv:
          if (b == 0.0) {
            ++guards;
            return 0.0;
          }
          return a / b;
        case Expr::BinaryOp::kLt: return a < b ? 1.0 : 0.0;
        case Expr::BinaryOp::kLe: return a <= b ? 1.0 : 0.0;
        case Expr::BinaryOp::kGt: return a > b ? 1.0 : 0.0;
        case Expr::BinaryOp::kGe: return a >= b ? 1.0 : 0.0;
        case Expr::BinaryOp::kEq: return a == b ? 1.0 : 0.0;
      }
      return 0.0;
    }
    case Expr::Kind::kCall: {
      const double a = eval_expr(*e.args[0], frame, term, guards);
      switch (e.call_fn) {
        case Expr::CallFn::kAbs: return std::abs(a);
        case Expr::CallFn::kExp: return std::exp(a);
        case Expr::CallFn::kTanh: return std::tanh(a);
        case Expr::CallFn::kMin:
          return std::min(a, eval_expr(*e.args[1], frame, term, guards));
        case Expr::CallFn::kMax:
          return std::max(a, eval_expr(*e.args[1], frame, term, guards));
        case Expr::CallFn::kClamp: {
          const double lo = eval_expr(*e.args[1], frame, term, guards);
          const double hi = eval_expr(*e.args[2], frame, term, guards);
          return std::clamp(a, std::min(lo, hi), std::max(lo, hi));
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace

StepReward eval_step_reward(const RewardProgram& program,
                            const FeatureFrame& frame) {
  StepReward out;
  const int k = static_cast<int>(program.terms.size());
  out.per_term.resize(k);
  for (int i = 0; i < k; ++i) {
    const RewardTerm& term = program.terms[static_cast<size_t>(i)];
    const double v = eval_expr(*term.expr, frame, term.name, out.guard_count);
    if (!std::isfinite(v)) {
      throw EvalError(term.name, "non-finite value");
    }
    out.per_term[i] = v;
    out.total += program.weights[static_cast<size_t>(i)] * v;
  }
  return out;
}

ProbeResult probe_eval(const RewardProgram& program, const Morphology& m,
                       const Terrain& terrain, const TaskContext& context,
                       const SystemState& s0) {
  ProbeResult result;
  FeatureExtractor extractor(m, terrain, context);
  std::mt19937_64 rng(0xC0FFEEULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 0.1);

  SystemState state = s0;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.muscle_count());
  for (int probe = 0; probe <= 10; ++probe) {
    if (probe > 0) {
      state = s0;
      for (int j = 0; j < m.dof(); ++j) state.joints.q[j] += gauss(rng);
      for (int j = 0; j < m.dof(); ++j) state.joints.qdot[j] += gauss(rng);
      for (int i = 0; i < m.muscle_count(); ++i) {
        state.muscles.a[i] = unit(rng);
        u[i] = unit(rng);
      }
      muscle_geometry(m, state.joints.q, state.joints.qdot, state.muscles.l,
                      state.muscles.v);
    }
    try {
      const StepReward r =
          eval_step_reward(program, extractor.extract(state, u, nullptr));
      result.guard_count += r.guard_count;
    } catch (const EvalError& e) {
      result.error = e.what();
      return result;
    }
  }
  result.ok = true;
  return result;
}

WeightMatrix weight_matrix(const std::vector<RewardProgram>& history) {
  WeightMatrix wm;
  if (history.empty()) throw SimError("weight_matrix: empty history");
  for (const auto& program : history) {
    for (const auto& term : program.terms) {
      if (std::find(wm.terms.begin(), wm.terms.end(), term.name) ==
          wm.terms.end()) {
        wm.terms.push_back(term.name);
      }
    }
  }
  const int rows = static_cast<int>(wm.terms.size());
  const int cols = static_cast<int>(history.size());
  wm.raw = Eigen::MatrixXd::Zero(rows, cols);
  for (int s = 0; s < cols; ++s) {
    const RewardProgram& program = history[static_cast<size_t>(s)];
    for (size_t i = 0; i < program.terms.size(); ++i) {
      const auto it =
          std::find(wm.terms.begin(), wm.terms.end(), program.terms[i].name);
      wm.raw(static_cast<int>(it - wm.terms.begin()), s) = program.weights[i];
    }
  }
  wm.normalized = wm.raw;
  wm.degenerate.assign(static_cast<size_t>(cols), 0);
  for (int s = 0; s < cols; ++s) {
    const double sum = wm.raw.col(s).lpNorm<1>();
    if (sum > 0) {
      wm.normalized.col(s) /= sum;
    } else {
      wm.degenerate[static_cast<size_t>(s)] = 1;
    }
  }
  return wm;
}

void write_weight_matrix_csv(const std::string& path,
                             const std::vector<std::string>& terms,
                             const Eigen::MatrixXd& matrix) {
  std::ostringstream out;
  out << "term";
  for (int s = 0; s < matrix.cols(); ++s) out << ",stage_" << s;
  out << "\n";
  for (int r = 0; r < matrix.rows(); ++r) {
    out << terms[static_cast<size_t>(r)];
    for (int s = 0; s < matrix.cols(); ++s) {
      out << "," << format_double(matrix(r, s));
    }
    out << "\n";
  }
  write_file_atomic(path, out.str());
}

void read_weight_matrix_csv(const std::string& path,
                            std::vector<std::string>& terms,
                            Eigen::MatrixXd& matrix) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
  int cols = 0;
  for (char c : line) {
    if (c == ',') ++cols;
  }
  terms.clear();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    terms.push_back(cell);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<int>(row.size()) != cols) {
      throw std::runtime_error("ragged csv row in " + path);
    }
    rows.push_back(std::move(row));
  }
  matrix.resize(static_cast<int>(rows.size()), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int c = 0; c < cols; ++c) {
      matrix(static_cast<int>(r), c) = rows[r][static_cast<size_t>(c)];
    }
  }
}

}  // namespace myolab
