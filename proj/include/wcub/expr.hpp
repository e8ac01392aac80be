#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wcub {

/// Syntax or validation error with a 1-based source position.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

enum class Func { sin, cos, exp, log, sqrt, tanh };

struct ExprNode {
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };
  Kind kind = Kind::number;
  double value = 0.0;  // number
  int variable = 0;    // 1-based, for x1..xN
  Func func = Func::sin;
  std::shared_ptr<const ExprNode> lhs;  // operand for negate/call
  std::shared_ptr<const ExprNode> rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

/// Structural equality of two trees.
bool same_tree(const ExprNode& a, const ExprNode& b);

/// Parsed arithmetic expression over x1..xN. Immutable; evaluation is reentrant.
class Expression {
public:
  Expression() = default;
  Expression(ExprPtr root, int variables) : root_(std::move(root)), variables_(variables) {}

  double evaluate(std::span<const double> x) const;
  int variables() const { return variables_; }
  const ExprNode& root() const { return *root_; }

  /// Fully parenthesised text; parses back to an identical tree.
  std::string to_string() const;

  friend bool operator==(const Expression& a, const Expression& b) {
    return a.variables_ == b.variables_ && same_tree(*a.root_, *b.root_);
  }

private:
  ExprPtr root_;
  int variables_ = 0;
};

/**
 * Grammar (whitespace-insensitive):
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?          -- right-associative
 *   primary := NUMBER | 'x' INT | FUNC '(' expr ')' | '(' expr ')'
 *   FUNC    := sin | cos | exp | log | sqrt | tanh
 * Unary minus binds looser than '^', so -2^2 = -4.
 */
Expression parse_expression(std::string_view text, int variables);

}  // namespace wcub
