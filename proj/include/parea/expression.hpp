#pragma once

#include <memory>
#include <string>

namespace parea {

// Arithmetic expression in x and y: numbers, pi, + - * / ^, parentheses and
// sin cos tan exp log sqrt abs tanh sinh cosh atan sign min max.
class Expression {
 public:
  explicit Expression(const std::string& text);  // throws std::invalid_argument
  double operator()(double x, double y) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace parea
