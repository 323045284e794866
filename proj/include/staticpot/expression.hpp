#pragma once

// Minimal arithmetic grammar for closed-form scalar fields:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | x1 | x2 | x3 | r | sqrt(expr) | ln(expr) | '(' expr ')'
// The tree is evaluated generically so it can be differentiated with duals.

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "staticpot/core/dual.hpp"
#include "staticpot/core/errors.hpp"
#include "staticpot/core/tensor.hpp"

namespace staticpot {

class Expression {
 public:
  enum class Op { Const, Coord, Radius, Add, Sub, Mul, Div, Neg, Pow, Sqrt, Ln };

  struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int coord = 0;
    std::shared_ptr<const Node> lhs, rhs;
  };

  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    auto root = p.expr();
    p.skip();
    if (p.pos != text.size())
      throw ParseError("unexpected '" + std::string(1, text[p.pos]) + "' at position " + std::to_string(p.pos) +
                       " in expression '" + text + "'");
    Expression e;
    e.root_ = std::move(root);
    e.text_ = text;
    return e;
  }

  const std::string& text() const { return text_; }

  template <class S>
  S operator()(const Vec3<S>& x) const {
    return eval(*root_, x);
  }

 private:
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0, int c = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->value = v;
    n->coord = c;
    return n;
  }

  struct Parser {
    const std::string& s;
    std::size_t pos;

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& what) {
      throw ParseError(what + " at position " + std::to_string(pos) + " in expression '" + s + "'");
    }

    NodePtr expr() {
      NodePtr a = term();
      for (;;) {
        if (accept('+'))
          a = make(Op::Add, a, term());
        else if (accept('-'))
          a = make(Op::Sub, a, term());
        else
          return a;
      }
    }
    NodePtr term() {
      NodePtr a = unary();
      for (;;) {
        if (accept('*'))
          a = make(Op::Mul, a, unary());
        else if (accept('/'))
          a = make(Op::Div, a, unary());
        else
          return a;
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
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      if (accept('(')) {
        NodePtr e = expr();
        if (!accept(')')) fail("expected ')'");
        return e;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(s.substr(pos), &used);
        } catch (const std::exception&) {
          fail("malformed number");
        }
        pos += used;
        return make(Op::Const, nullptr, nullptr, v);
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string id = s.substr(start, pos - start);
        if (id == "x1" || id == "x2" || id == "x3") return make(Op::Coord, nullptr, nullptr, 0.0, id[1] - '1');
        if (id == "r") return make(Op::Radius);
        if (id == "sqrt" || id == "ln") {
          if (!accept('(')) fail("expected '(' after " + id);
          NodePtr arg = expr();
          if (!accept(')')) fail("expected ')'");
          return make(id == "sqrt" ? Op::Sqrt : Op::Ln, arg);
        }
        pos = start;
        fail("unknown identifier '" + id + "'");
      }
      fail("unexpected character '" + std::string(1, c) + "'");
    }
  };

  template <class S>
  static S eval(const Node& n, const Vec3<S>& x) {
    using std::log;
    using std::sqrt;
    switch (n.op) {
      case Op::Const: return S(n.value);
      case Op::Coord: return x[n.coord];
      case Op::Radius: return sqrt(dot(x, x));
      case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
      case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
      case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
      case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
      case Op::Neg: return -eval(*n.lhs, x);
      case Op::Sqrt: return sqrt(eval(*n.lhs, x));
      case Op::Ln: return log(eval(*n.lhs, x));
      case Op::Pow: {
        const S base = eval(*n.lhs, x);
        if (n.rhs->op == Op::Const) {
          const double e = n.rhs->value;
          if (e == std::floor(e) && std::abs(e) <= 16) return ipow(base, static_cast<int>(e));
          using std::pow;
          return pow(base, e);
        }
        using std::exp;
        return exp(eval(*n.rhs, x) * log(base));
      }
    }
    return S(0.0);
  }

  NodePtr root_;
  std::string text_;
};

}  // namespace staticpot
