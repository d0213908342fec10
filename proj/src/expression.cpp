#include "parea/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace parea {

struct Expression::Node {
  enum Kind { num, var_x, var_y, neg, add, sub, mul, div, pow, call } kind;
  double value = 0.0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x, double y) const {
    switch (kind) {
      case num: return value;
      case var_x: return x;
      case var_y: return y;
      case neg: return -args[0]->eval(x, y);
      case add: return args[0]->eval(x, y) + args[1]->eval(x, y);
      case sub: return args[0]->eval(x, y) - args[1]->eval(x, y);
      case mul: return args[0]->eval(x, y) * args[1]->eval(x, y);
      case div: return args[0]->eval(x, y) / args[1]->eval(x, y);
      case pow: return std::pow(args[0]->eval(x, y), args[1]->eval(x, y));
      case call: {
        const double a = args[0]->eval(x, y);
        if (fn == "sin") return std::sin(a);
        if (fn == "cos") return std::cos(a);
        if (fn == "tan") return std::tan(a);
        if (fn == "exp") return std::exp(a);
        if (fn == "log") return std::log(a);
        if (fn == "sqrt") return std::sqrt(a);
        if (fn == "abs") return std::abs(a);
        if (fn == "tanh") return std::tanh(a);
        if (fn == "sinh") return std::sinh(a);
        if (fn == "cosh") return std::cosh(a);
        if (fn == "atan") return std::atan(a);
        if (fn == "sign") return static_cast<double>((a > 0) - (a < 0));
        const double b = args[1]->eval(x, y);
        if (fn == "min") return std::min(a, b);
        if (fn == "max") return std::max(a, b);
        if (fn == "atan2") return std::atan2(a, b);
      }
    }
    return 0.0;
  }
};

namespace {

using NodeP = std::shared_ptr<const Expression::Node>;
using N = Expression::Node;

NodeP make(N::Kind k, std::vector<NodeP> args = {}, double v = 0.0, std::string fn = {}) {
  auto n = std::make_shared<N>();
  n->kind = k;
  n->args = std::move(args);
  n->value = v;
  n->fn = std::move(fn);
  return n;
}

int arity(const std::string& fn) {
  static const char* one[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "sinh", "cosh", "atan", "sign"};
  for (const char* f : one)
    if (fn == f) return 1;
  if (fn == "min" || fn == "max" || fn == "atan2") return 2;
  return 0;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodeP parse() {
    NodeP e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("expression '" + s_ + "' at " + std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodeP expr() {
    NodeP l = term();
    for (;;) {
      if (eat('+')) l = make(N::add, {l, term()});
      else if (eat('-')) l = make(N::sub, {l, term()});
      else return l;
    }
  }
  NodeP term() {
    NodeP l = unary();
    for (;;) {
      if (eat('*')) l = make(N::mul, {l, unary()});
      else if (eat('/')) l = make(N::div, {l, unary()});
      else return l;
    }
  }
  NodeP unary() {
    if (eat('-')) return make(N::neg, {unary()});
    if (eat('+')) return unary();
    return power();
  }
  NodeP power() {
    NodeP base = atom();
    if (eat('^')) return make(N::pow, {base, unary()});  // right associative
    return base;
  }
  NodeP atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodeP e = expr();
      if (!eat(')')) fail("missing ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(N::num, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(N::var_x);
      if (id == "y") return make(N::var_y);
      if (id == "pi") return make(N::num, {}, std::numbers::pi);
      const int n = arity(id);
      if (n == 0) fail("unknown identifier '" + id + "'");
      if (!eat('(')) fail("expected '(' after " + id);
      std::vector<NodeP> args{expr()};
      for (int k = 1; k < n; ++k) {
        if (!eat(',')) fail(id + " takes " + std::to_string(n) + " arguments");
        args.push_back(expr());
      }
      if (!eat(')')) fail("missing ')'");
      return make(N::call, std::move(args), 0.0, id);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text), root_(Parser(text).parse()) {}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace parea
