#pragma once

#include <memory>
#include <string>

namespace varexp {

// Tiny closed-form expression evaluator for exponent and coefficient specs,
// e.g. "2 + 0.5*sin(pi*x)".  Supports + - * / ^, parentheses, unary minus,
// the variables x and y, the constant pi, and the functions
// sin cos tan exp log sqrt abs tanh.
class Expr {
 public:
  static Expr parse(const std::string& text);  // throws ParseError

  double eval(double x, double y = 0.0) const;
  const std::string& text() const { return text_; }

  Expr(const Expr&);
  Expr& operator=(const Expr&);
  Expr(Expr&&) noexcept;
  Expr& operator=(Expr&&) noexcept;
  ~Expr();

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> root, std::string text);
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace varexp
