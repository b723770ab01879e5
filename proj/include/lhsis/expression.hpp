#pragma once

// Scalar expressions in the single variable t.
//
// Grammar (conventional precedence, ^ right-associative and binding tighter
// than unary minus, so -2^2 == -4 and 2^-1 == 0.5):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 't' | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | log

#include <charconv>
#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "lhsis/error.hpp"

namespace lhsis {

class Expression {
 public:
  enum class Op { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log };

  struct Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  static Expression parse(std::string_view text);

  double operator()(double t) const { return eval(*root_, t); }

  /// Fully parenthesized rendering; parse(str()) yields an identical tree.
  std::string str() const { return print(*root_); }

  /// The value of a t-free expression.
  std::optional<double> constant_value() const {
    if (depends_on_t(*root_)) return std::nullopt;
    return eval(*root_, 0.0);
  }

  const Node& root() const { return *root_; }

 private:
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static double eval(const Node& n, double t) {
    switch (n.op) {
      case Op::Literal: return n.value;
      case Op::Var: return t;
      case Op::Neg: return -eval(*n.lhs, t);
      case Op::Add: return eval(*n.lhs, t) + eval(*n.rhs, t);
      case Op::Sub: return eval(*n.lhs, t) - eval(*n.rhs, t);
      case Op::Mul: return eval(*n.lhs, t) * eval(*n.rhs, t);
      case Op::Div: return eval(*n.lhs, t) / eval(*n.rhs, t);
      case Op::Pow: return std::pow(eval(*n.lhs, t), eval(*n.rhs, t));
      case Op::Sin: return std::sin(eval(*n.lhs, t));
      case Op::Cos: return std::cos(eval(*n.lhs, t));
      case Op::Exp: return std::exp(eval(*n.lhs, t));
      case Op::Log: return std::log(eval(*n.lhs, t));
    }
    return 0.0;
  }

  static bool depends_on_t(const Node& n) {
    if (n.op == Op::Var) return true;
    return (n.lhs && depends_on_t(*n.lhs)) || (n.rhs && depends_on_t(*n.rhs));
  }

  static std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }

  static std::string print(const Node& n) {
    switch (n.op) {
      case Op::Literal: return format_number(n.value);
      case Op::Var: return "t";
      case Op::Neg: return "(-" + print(*n.lhs) + ")";
      case Op::Add: return "(" + print(*n.lhs) + "+" + print(*n.rhs) + ")";
      case Op::Sub: return "(" + print(*n.lhs) + "-" + print(*n.rhs) + ")";
      case Op::Mul: return "(" + print(*n.lhs) + "*" + print(*n.rhs) + ")";
      case Op::Div: return "(" + print(*n.lhs) + "/" + print(*n.rhs) + ")";
      case Op::Pow: return "(" + print(*n.lhs) + "^" + print(*n.rhs) + ")";
      case Op::Sin: return "sin(" + print(*n.lhs) + ")";
      case Op::Cos: return "cos(" + print(*n.lhs) + ")";
      case Op::Exp: return "exp(" + print(*n.lhs) + ")";
      case Op::Log: return "log(" + print(*n.lhs) + ")";
    }
    return {};
  }

  class Parser;

  NodePtr root_;
};

class Expression::Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing input", pos_);
    return e;
  }

 private:
  static NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
    return std::make_shared<const Node>(Node{op, value, std::move(lhs), std::move(rhs)});
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("expected operand, found end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    throw ParseError(std::string("expected operand, found '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;  // 'e' belongs to whatever follows; rejected by the caller
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
      throw ParseError("malformed number '" + std::string(text_.substr(start, pos_ - start)) + "'",
                       start);
    }
    return make(Op::Literal, nullptr, nullptr, value);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "t") return make(Op::Var);
    Op op;
    if (name == "sin") {
      op = Op::Sin;
    } else if (name == "cos") {
      op = Op::Cos;
    } else if (name == "exp") {
      op = Op::Exp;
    } else if (name == "log") {
      op = Op::Log;
    } else {
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
    NodePtr arg = expr();
    if (!accept(')')) throw ParseError("expected ')'", pos_);
    return make(op, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

inline Expression Expression::parse(std::string_view text) {
  return Expression(Parser(text).parse_all());
}

}  // namespace lhsis
