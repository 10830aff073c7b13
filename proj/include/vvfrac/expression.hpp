#pragma once

#include <memory>
#include <string>
#include <vector>

namespace vvfrac {

// Small arithmetic language for spatial fields:
//   expr := term (('+'|'-') term)*
//   term := unary (('*'|'/') unary)*
//   unary := '-' unary | primary
//   primary := number | 'x' | 'y' | 't' | '(' expr ')' | ('min'|'max') '(' expr ',' expr ')'
// Values and exact partial derivatives in x and y are evaluated together.
class Expression {
 public:
  struct Value {
    double v = 0.0;
    double dx = 0.0;
    double dy = 0.0;
  };

  Expression();  // constant zero
  explicit Expression(double constant);
  static Expression parse(const std::string& text);

  Value eval(double x, double y, double t = 0.0) const;
  double operator()(double x, double y, double t = 0.0) const { return eval(x, y, t).v; }

  bool is_constant() const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace vvfrac
