#pragma once

#include <memory>
#include <span>
#include <string>

namespace subfreq {

/// Parsed arithmetic expression over variables x1..xn with +, -, *, /, ^,
/// parentheses, the usual elementary functions (sin, cos, tan, asin, acos,
/// atan, sinh, cosh, tanh, exp, log, sqrt, abs) and the constants pi and e.
/// Used to load custom vector-field coefficient functions from JSON specs.
class Expression {
 public:
  static Expression parse(const std::string& text, std::size_t num_vars);

  double eval(std::span<const double> vars) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string text)
      : root_(std::move(root)), text_(std::move(text)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
};

} // namespace subfreq
