#include "vvfrac/expression.hpp"

#include "vvfrac/error.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace vvfrac {

struct Expression::Node {
  enum class Kind { Const, X, Y, T, Neg, Add, Sub, Mul, Div, Min, Max } kind;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression '" << s_ << "': " << what << " at offset " << pos_;
    throw ConfigError(os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+'))
        n = make(Kind::Add, n, term());
      else if (accept('-'))
        n = make(Kind::Sub, n, term());
      else
        return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Kind::Mul, n, unary());
      else if (accept('/'))
        n = make(Kind::Div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make(Kind::X);
      if (id == "y") return make(Kind::Y);
      if (id == "t") return make(Kind::T);
      if (id == "min" || id == "max") {
        expect('(');
        NodePtr a = expr();
        expect(',');
        NodePtr b = expr();
        expect(')');
        return make(id == "min" ? Kind::Min : Kind::Max, a, b);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

Expression::Value eval_node(const Expression::Node& n, double x, double y, double t) {
  using V = Expression::Value;
  switch (n.kind) {
    case Kind::Const:
      return {n.value, 0.0, 0.0};
    case Kind::X:
      return {x, 1.0, 0.0};
    case Kind::Y:
      return {y, 0.0, 1.0};
    case Kind::T:
      return {t, 0.0, 0.0};
    case Kind::Neg: {
      V a = eval_node(*n.a, x, y, t);
      return {-a.v, -a.dx, -a.dy};
    }
    default:
      break;
  }
  V a = eval_node(*n.a, x, y, t);
  V b = eval_node(*n.b, x, y, t);
  switch (n.kind) {
    case Kind::Add:
      return {a.v + b.v, a.dx + b.dx, a.dy + b.dy};
    case Kind::Sub:
      return {a.v - b.v, a.dx - b.dx, a.dy - b.dy};
    case Kind::Mul:
      return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
    case Kind::Div: {
      double q = a.v / b.v;
      return {q, (a.dx - q * b.dx) / b.v, (a.dy - q * b.dy) / b.v};
    }
    case Kind::Min:
      return a.v <= b.v ? a : b;
    case Kind::Max:
      return a.v >= b.v ? a : b;
    default:
      return {};
  }
}

bool node_constant(const Expression::Node& n) {
  switch (n.kind) {
    case Kind::Const:
      return true;
    case Kind::X:
    case Kind::Y:
    case Kind::T:
      return false;
    case Kind::Neg:
      return node_constant(*n.a);
    default:
      return node_constant(*n.a) && node_constant(*n.b);
  }
}

}  // namespace

Expression::Expression() : Expression(0.0) {}

Expression::Expression(double constant)
    : root_(make(Kind::Const, nullptr, nullptr, constant)) {
  std::ostringstream os;
  os.precision(17);
  os << constant;
  source_ = os.str();
}

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.source_ = text;
  return e;
}

Expression::Value Expression::eval(double x, double y, double t) const {
  return eval_node(*root_, x, y, t);
}

bool Expression::is_constant() const { return node_constant(*root_); }

}  // namespace vvfrac
