#pragma once

#include <memory>
#include <string>

namespace act {

/// Parsed arithmetic expression in the single variable t. Grammar: numbers,
/// t, + - * / ^ (right associative), unary minus, the functions sin cos tanh
/// exp sinh cosh sqrt, parentheses, and the constants pi and e. Precedence:
/// ^ before unary minus before * / before + -.
class Expression {
 public:
  Expression() = default;

  double operator()(double t) const { return eval(t); }
  double eval(double t) const;

  /// Symbolic derivative; chains of derivatives stay exact.
  Expression derivative() const;

  std::string text() const { return source_; }
  bool empty() const { return root_ == nullptr; }

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  static Expression from_root(NodePtr root, std::string source);

 private:
  NodePtr root_;
  std::string source_;
};

/// Recursive-descent parse; throws SyntaxError (with byte offset) or
/// UnknownIdentifier. Input is limited to 4096 characters.
Expression parse_expression(const std::string& text);

}  // namespace act
