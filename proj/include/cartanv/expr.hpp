#pragma once

/// Plain-text expressions for K^2.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | x<i> | p<i> | sqrt '(' expr ')' | '(' expr ')'
///
/// Exponents must be constant. Lines starting with '#' are ignored.

#include <cctype>
#include <cmath>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "cartanv/errors.hpp"
#include "cartanv/jet.hpp"

namespace cartanv::expr {

struct Node {
  enum class Kind { Const, X, P, Add, Sub, Mul, Div, Neg, Sqrt, Pow };
  Kind kind = Kind::Const;
  double value = 0.0;  // constant or exponent
  int index = 0;       // coordinate index (0-based)
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

template <class S>
S evaluate(const Node& n, std::span<const S> x, std::span<const S> p) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::Const:
      return constant_like(x[0], n.value);
    case K::X:
      return x[n.index];
    case K::P:
      return p[n.index];
    case K::Add:
      return evaluate(*n.lhs, x, p) + evaluate(*n.rhs, x, p);
    case K::Sub:
      return evaluate(*n.lhs, x, p) - evaluate(*n.rhs, x, p);
    case K::Mul:
      return evaluate(*n.lhs, x, p) * evaluate(*n.rhs, x, p);
    case K::Div: {
      const S den = evaluate(*n.rhs, x, p);
      if constexpr (std::is_same_v<S, double>) {
        if (den == 0.0) throw SingularityError("division by zero in metric expression");
      }
      return evaluate(*n.lhs, x, p) / den;
    }
    case K::Neg:
      return -evaluate(*n.lhs, x, p);
    case K::Sqrt: {
      const S arg = evaluate(*n.lhs, x, p);
      if constexpr (std::is_same_v<S, double>) {
        if (!(arg > 0.0)) throw DomainError("sqrt of non-positive value in metric expression");
        return std::sqrt(arg);
      } else {
        return sqrt(arg);
      }
    }
    case K::Pow: {
      const S base = evaluate(*n.lhs, x, p);
      const double r = n.value;
      if (r == std::round(r)) return ipow(base, static_cast<int>(r));
      if constexpr (std::is_same_v<S, double>) {
        if (!(base > 0.0)) throw DomainError("fractional power of non-positive value");
        return std::pow(base, r);
      } else {
        return pow(base, r);
      }
    }
  }
  throw ParseError("corrupt expression tree");
}

/// A parsed K^2 expression together with the largest coordinate index used.
struct Expression {
  NodePtr root;
  int max_index = 0;  // 1-based; 0 when no coordinate appears
  std::string text;
};

class Parser {
 public:
  explicit Parser(std::string text) : text_(strip_comments(std::move(text))) {}

  Expression parse() {
    pos_ = 0;
    NodePtr root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return {root, max_index_, text_};
  }

 private:
  static std::string strip_comments(std::string s) {
    std::istringstream in(s);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] == '#') continue;
      out += line;
      out += ' ';
    }
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_));
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

  static NodePtr make(Node::Kind k, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0,
                      int idx = 0) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    n->value = v;
    n->index = idx;
    return n;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::Add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::Sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Node::Kind::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make(Node::Kind::Neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (!accept('^')) return base;
    const std::size_t at = pos_;
    NodePtr exponent = parse_unary();
    double r = 0.0;
    if (!constant_value(*exponent, r)) {
      pos_ = at;
      fail("exponent must be a constant");
    }
    return make(Node::Kind::Pow, base, nullptr, r);
  }

  static bool constant_value(const Node& n, double& out) {
    using K = Node::Kind;
    double a = 0.0;
    double b = 0.0;
    switch (n.kind) {
      case K::Const:
        out = n.value;
        return true;
      case K::Neg:
        if (!constant_value(*n.lhs, a)) return false;
        out = -a;
        return true;
      case K::Add:
      case K::Sub:
      case K::Mul:
      case K::Div:
        if (!constant_value(*n.lhs, a) || !constant_value(*n.rhs, b)) return false;
        out = n.kind == K::Add   ? a + b
              : n.kind == K::Sub ? a - b
              : n.kind == K::Mul ? a * b
                                 : a / b;
        return true;
      default:
        return false;
    }
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return make(Node::Kind::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end]))) ++end;
      const std::string ident = text_.substr(pos_, end - pos_);
      if (ident == "sqrt") {
        pos_ = end;
        if (!accept('(')) fail("expected '(' after sqrt");
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return make(Node::Kind::Sqrt, arg);
      }
      if ((ident[0] == 'x' || ident[0] == 'p') && ident.size() > 1) {
        int idx = 0;
        for (std::size_t i = 1; i < ident.size(); ++i) {
          if (!std::isdigit(static_cast<unsigned char>(ident[i]))) fail("unknown identifier " + ident);
          idx = idx * 10 + (ident[i] - '0');
        }
        if (idx < 1 || idx > kMaxDim) fail("coordinate index out of range in " + ident);
        pos_ = end;
        max_index_ = std::max(max_index_, idx);
        return make(ident[0] == 'x' ? Node::Kind::X : Node::Kind::P, nullptr, nullptr, 0.0,
                    idx - 1);
      }
      fail("unknown identifier " + ident);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
  int max_index_ = 0;
};

inline Expression parse(const std::string& text) { return Parser(text).parse(); }

inline Expression parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metric file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace cartanv::expr
