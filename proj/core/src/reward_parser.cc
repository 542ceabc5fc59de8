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

#include <cctype>
#include <cstdlib>
#include <unordered_set>

#include "myolab/reward.h"
#include "myolab/util.h"

namespace myolab {

namespace {

struct Token {
  enum class Kind { kIdent, kNumber, kPunct, kEnd };
  Kind kind = Kind::kEnd;
  std::string text;
  double number = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.col);
  }

 private:
  void advance() {
    skip_space();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_.kind = Token::Kind::kEnd;
      return;
    }
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_')) {
        bump();
      }
      tok_.kind = Token::Kind::kIdent;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const char* begin = src_.c_str() + pos_;
      char* end = nullptr;
      tok_.number = std::strtod(begin, &end);
      tok_.kind = Token::Kind::kNumber;
      tok_.text = std::string(begin, static_cast<size_t>(end - begin));
      for (size_t i = 0; i < tok_.text.size(); ++i) bump();
      return;
    }
    // two-char comparison operators
    if ((c == '<' || c == '>' || c == '=') && pos_ + 1 < src_.size() &&
        src_[pos_ + 1] == '=') {
      tok_.kind = Token::Kind::kPunct;
      tok_.text = src_.substr(pos_, 2);
      bump();
      bump();
      return;
    }
    tok_.kind = Token::Kind::kPunct;
    tok_.text = std::string(1, c);
    bump();
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  RewardProgram parse() {
    RewardProgram program;
    std::unordered_set<std::string> names;
    while (lex_.peek().kind != Token::Kind::kEnd) {
      expect_ident("term");
      const Token name = lex_.take();
      if (name.kind != Token::Kind::kIdent) {
        throw ParseError("expected term name", name.line, name.col);
      }
      if (!names.insert(name.text).second) {
        throw ParseError("duplicate term name '" + name.text + "'", name.line,
                         name.col);
      }
      expect_punct("{");
      auto expr = parse_expr();
      expect_punct("}");
      expect_punct("@");
      const double w = parse_weight();
      if (w < 0) {
        throw ParseError("negative weight for term '" + name.text + "'",
                         lex_.peek().line, lex_.peek().col);
      }
      program.terms.emplace_back(name.text, std::move(expr));
      program.weights.push_back(w);
    }
    return program;
  }

 private:
  double parse_weight() {
    bool neg = false;
    if (lex_.peek().kind == Token::Kind::kPunct && lex_.peek().text == "-") {
      lex_.take();
      neg = true;
    }
    const Token t = lex_.take();
    if (t.kind != Token::Kind::kNumber) {
      throw ParseError("expected weight after '@'", t.line, t.col);
    }
    return neg ? -t.number : t.number;
  }

  std::unique_ptr<Expr> parse_expr() { return parse_comparison(); }

  std::unique_ptr<Expr> parse_comparison() {
    auto lhs = parse_additive();
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::kPunct &&
        (t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=" ||
         t.text == "==")) {
      const std::string op = lex_.take().text;
      auto rhs = parse_additive();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kBinary;
      node->binary_op = op == "<"    ? Expr::BinaryOp::kLt
                        : op == "<=" ? Expr::BinaryOp::kLe
                        : op == ">"  ? Expr::BinaryOp::kGt
                        : op == ">=" ? Expr::BinaryOp::kGe
                                     : Expr::BinaryOp::kEq;
      node->args.push_back(std::move(lhs));
      node->args.push_back(std::move(rhs));
      return node;
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_additive() {
    auto lhs = parse_multiplicative();
    while (lex_.peek().kind == Token::Kind::kPunct &&
           (lex_.peek().text == "+" || lex_.peek().text == "-")) {
      const std::string op = lex_.take().text;
      auto rhs = parse_multiplicative();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kBinary;
      node->binary_op = op == "+" ? Expr::BinaryOp::kAdd : Expr::BinaryOp::kSub;
      node->args.push_back(std::move(lhs));
      node->args.push_back(std::move(rhs));
      lhs = std::move(node);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_multiplicative() {
    auto lhs = parse_unary();
    while (lex_.peek().kind == Token::Kind::kPunct &&
           (lex_.peek().text == "*" || lex_.peek().text == "/")) {
      const std::string op = lex_.take().text;
      auto rhs = parse_unary();
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kBinary;
      node->binary_op = op == "*" ? Expr::BinaryOp::kMul : Expr::BinaryOp::kDiv;
      node->args.push_back(std::move(lhs));
      node->args.push_back(std::move(rhs));
      lhs = std::move(node);
    }
    return lhs;
  }

  std::unique_ptr<Expr> parse_unary() {
    if (lex_.peek().kind == Token::Kind::kPunct && lex_.peek().text == "-") {
      lex_.take();
      auto inner = parse_unary();
      if (inner->kind == Expr::Kind::kNumber) {
        inner->number = -inner->number;  // fold literal sign
        return inner;
      }
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kUnary;
      node->unary_op = Expr::UnaryOp::kNeg;
      node->args.push_back(std::move(inner));
      return node;
    }
    return parse_primary();
  }

  std::unique_ptr<Expr> parse_primary() {
    const Token t = lex_.take();
    if (t.kind == Token::Kind::kNumber) {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kNumber;
      node->number = t.number;
      return node;
    }
    if (t.kind == Token::Kind::kPunct && t.text == "(") {
      auto inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    if (t.kind == Token::Kind::kIdent) {
      static const std::pair<const char*, Expr::CallFn> kFns[] = {
          {"abs", Expr::CallFn::kAbs},   {"exp", Expr::CallFn::kExp},
          {"tanh", Expr::CallFn::kTanh}, {"min", Expr::CallFn::kMin},
          {"max", Expr::CallFn::kMax},   {"clamp", Expr::CallFn::kClamp},
      };
      for (const auto& [fname, fn] : kFns) {
        if (t.text == fname) {
          expect_punct("(");
          auto node = std::make_unique<Expr>();
          node->kind = Expr::Kind::kCall;
          node->call_fn = fn;
          node->args.push_back(parse_expr());
          while (lex_.peek().kind == Token::Kind::kPunct &&
                 lex_.peek().text == ",") {
            lex_.take();
            node->args.push_back(parse_expr());
          }
          expect_punct(")");
          const size_t want = fn == Expr::CallFn::kClamp  ? 3
                              : fn == Expr::CallFn::kMin  ? 2
                              : fn == Expr::CallFn::kMax  ? 2
                                                          : 1;
          if (node->args.size() != want) {
            throw ParseError(std::string(fname) + " takes " +
                                 std::to_string(want) + " argument(s)",
                             t.line, t.col);
          }
          return node;
        }
      }
      const FeatureInfo* info = find_feature(t.text);
      if (!info) {
        throw ParseError("unknown feature '" + t.text + "'", t.line, t.col);
      }
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::kFeature;
      node->feature = info->id;
      if (info->parameterized) {
        expect_punct("(");
        const Token arg = lex_.take();
        if (arg.kind != Token::Kind::kNumber ||
            arg.number != std::floor(arg.number) || arg.number < 0) {
          throw ParseError("feature '" + t.text +
                               "' expects a nonnegative integer index",
                           arg.line, arg.col);
        }
        node->feature_arg = static_cast<int>(arg.number);
        expect_punct(")");
      }
      return node;
    }
    throw ParseError("unexpected token '" + t.text + "'", t.line, t.col);
  }

  void expect_punct(const std::string& p) {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::kPunct || t.text != p) {
      throw ParseError("expected '" + p + "'", t.line, t.col);
    }
  }

  void expect_ident(const std::string& word) {
    const Token t = lex_.take();
    if (t.kind != Token::Kind::kIdent || t.text != word) {
      throw ParseError("expected '" + word + "'", t.line, t.col);
    }
  }

  Lexer lex_;
};

// precedence levels for minimal-paren serialization
int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kBinary:
      switch (e.binary_op) {
        case Expr::BinaryOp::kLt:
        case Expr::BinaryOp::kLe:
        case Expr::BinaryOp::kGt:
        case Expr::BinaryOp::kGe:
        case Expr::BinaryOp::kEq:
          return 0;
        case Expr::BinaryOp::kAdd:
        case Expr::BinaryOp::kSub:
          return 1;
        case Expr::BinaryOp::kMul:
        case Expr::BinaryOp::kDiv:
          return 2;
      }
      return 0;
    case Expr::Kind::kUnary:
      return 3;
    default:
      return 4;
  }
}

const char* op_text(Expr::BinaryOp op) {
  switch (op) {
    case Expr::BinaryOp::kAdd: return "+";
    case Expr::BinaryOp::kSub: return "-";
    case Expr::BinaryOp::kMul: return "*";
    case Expr::BinaryOp::kDiv: return "/";
    case Expr::BinaryOp::kLt: return "<";
    case Expr::BinaryOp::kLe: return "<=";
    case Expr::BinaryOp::kGt: return ">";
    case Expr::BinaryOp::kGe: return ">=";
    case Expr::BinaryOp::kEq: return "==";
  }
  return "?";
}

const char* fn_text(Expr::CallFn fn) {
  switch (fn) {
    case Expr::CallFn::kAbs: return "abs";
    case Expr::CallFn::kExp: return "exp";
    case Expr::CallFn::kTanh: return "tanh";
    case Expr::CallFn::kMin: return "min";
    case Expr::CallFn::kMax: return "max";
    case Expr::CallFn::kClamp: return "clamp";
  }
  return "?";
}

void print_expr(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::kNumber:
      out += format_double(e.number);
      break;
    case Expr::Kind::kFeature: {
      for (const auto& info : feature_catalog()) {
        if (info.id == e.feature) {
          out += info.name;
          break;
        }
      }
      if (e.feature_arg >= 0) {
        out += "(";
        out += std::to_string(e.feature_arg);
        out += ")";
      }
      break;
    }
    case Expr::Kind::kUnary: {
      out += "-";
      const Expr& a = *e.args[0];
      const bool parens = level(a) < level(e);
      if (parens) out += "(";
      print_expr(a, out);
      if (parens) out += ")";
      break;
    }
    case Expr::Kind::kBinary: {
      const int lv = level(e);
      const Expr& a = *e.args[0];
      const Expr& b = *e.args[1];
      // left child may share the level (left associativity); the right
      // child needs parens on ties to preserve evaluation order
      bool lp = level(a) < lv;
      bool rp = level(b) <= lv;
      // negative number literals read like unary minus; parenthesize on the
      // right of any operator to keep reparse unambiguous
      if (b.kind == Expr::Kind::kNumber && b.number < 0) rp = true;
      if (lp) out += "(";
      print_expr(a, out);
      if (lp) out += ")";
      out += " ";
      out += op_text(e.binary_op);
      out += " ";
      if (rp) out += "(";
      print_expr(b, out);
      if (rp) out += ")";
      break;
    }
    case Expr::Kind::kCall: {
      out += fn_text(e.call_fn);
      out += "(";
      for (size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_expr(*e.args[i], out);
      }
      out += ")";
      break;
    }
  }
}

}  // namespace

RewardProgram parse_program(const std::string& text) {
  Parser parser(text);
  return parser.parse();
}

std::string serialize_expr(const Expr& expr) {
  std::string out;
  print_expr(expr, out);
  return out;
}

std::string serialize_program(const RewardProgram& program) {
  std::string out;
  for (size_t i = 0; i < program.terms.size(); ++i) {
    out += "term ";
    out += program.terms[i].name;
    out += " { ";
    print_expr(*program.terms[i].expr, out);
    out += " } @ ";
    out += format_double(program.weights[i]);
    out += "\n";
  }
  return out;
}

}  // namespace myolab
