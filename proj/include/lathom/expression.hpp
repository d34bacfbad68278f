#ifndef LATHOM_EXPRESSION_HPP
#define LATHOM_EXPRESSION_HPP

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "lathom/error.hpp"

namespace lathom {

/// Scalar formula in x, y: numbers, + - * / ^, unary minus, parentheses,
/// pi and sin cos exp log sqrt abs tanh.
class Expression {
 public:
  static Expression parse(const std::string& text) {
    Parser p{text, 0};
    Expression e;
    e.text_ = text;
    e.root_ = p.sum();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    return e;
  }

  double operator()(const std::vector<double>& x) const {
    const double v = eval(*root_, x);
    if (!std::isfinite(v)) throw Error(ErrorKind::DatumUndefined, "'" + text_ + "' is not finite here");
    return v;
  }

  /// Largest variable index used plus one (x -> 1, y -> 2).
  int arity() const { return arity(*root_); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { num, var, add, sub, mul, div, pow, neg, fn };

  struct Node {
    Op op;
    double value = 0.0;
    int var = 0;
    double (*fn)(double) = nullptr;
    std::shared_ptr<Node> lhs, rhs;
  };
  using Ptr = std::shared_ptr<Node>;

  struct Parser {
    const std::string& s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw Error(ErrorKind::InvalidArgument, "expression '" + s + "' at " + std::to_string(pos + 1) + ": " + what);
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    static Ptr make(Op op, Ptr a, Ptr b = nullptr) {
      auto n = std::make_shared<Node>();
      n->op = op;
      n->lhs = std::move(a);
      n->rhs = std::move(b);
      return n;
    }

    Ptr sum() {
      Ptr a = product();
      for (;;) {
        if (eat('+')) a = make(Op::add, a, product());
        else if (eat('-')) a = make(Op::sub, a, product());
        else return a;
      }
    }
    Ptr product() {
      Ptr a = unary();
      for (;;) {
        if (eat('*')) a = make(Op::mul, a, unary());
        else if (eat('/')) a = make(Op::div, a, unary());
        else return a;
      }
    }
    Ptr unary() {
      if (eat('-')) return make(Op::neg, unary());
      if (eat('+')) return unary();
      return power();
    }
    Ptr power() {
      Ptr a = primary();
      if (eat('^')) return make(Op::pow, a, unary());
      return a;
    }
    Ptr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end");
      if (eat('(')) {
        Ptr a = sum();
        if (!eat(')')) fail("expected ')'");
        return a;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        auto n = std::make_shared<Node>();
        n->op = Op::num;
        const auto [end, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), n->value);
        if (ec != std::errc()) fail("bad number");
        pos = static_cast<std::size_t>(end - s.data());
        return n;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string id = s.substr(start, pos - start);
        auto n = std::make_shared<Node>();
        if (id == "x" || id == "y") {
          n->op = Op::var;
          n->var = id == "x" ? 0 : 1;
          return n;
        }
        if (id == "pi") {
          n->op = Op::num;
          n->value = std::numbers::pi;
          return n;
        }
        static const std::pair<const char*, double (*)(double)> fns[] = {
            {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
            {"exp", [](double v) { return std::exp(v); }},   {"log", [](double v) { return std::log(v); }},
            {"sqrt", [](double v) { return std::sqrt(v); }}, {"abs", [](double v) { return std::abs(v); }},
            {"tanh", [](double v) { return std::tanh(v); }}};
        for (const auto& [name, f] : fns)
          if (id == name) {
            if (!eat('(')) fail("expected '(' after " + id);
            n->op = Op::fn;
            n->fn = f;
            n->lhs = sum();
            if (!eat(')')) fail("expected ')'");
            return n;
          }
        pos = start;
        fail("unknown name '" + id + "'");
      }
      fail("unexpected '" + std::string(1, c) + "'");
    }
  };

  static double eval(const Node& n, const std::vector<double>& x) {
    switch (n.op) {
      case Op::num: return n.value;
      case Op::var:
        if (static_cast<std::size_t>(n.var) >= x.size())
          throw Error(ErrorKind::DatumUndefined, std::string("variable ") + "xy"[n.var] + " is not defined here");
        return x[n.var];
      case Op::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
      case Op::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
      case Op::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
      case Op::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
      case Op::pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
      case Op::neg: return -eval(*n.lhs, x);
      case Op::fn: return n.fn(eval(*n.lhs, x));
    }
    return 0.0;
  }

  static int arity(const Node& n) {
    int a = n.op == Op::var ? n.var + 1 : 0;
    if (n.lhs) a = std::max(a, arity(*n.lhs));
    if (n.rhs) a = std::max(a, arity(*n.rhs));
    return a;
  }

  std::string text_;
  Ptr root_;
};

}  // namespace lathom

#endif  // LATHOM_EXPRESSION_HPP
