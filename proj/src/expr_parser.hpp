#pragma once

// Lexer and recursive-descent parser shared by expression and system parsing.

#include <string>
#include <string_view>
#include <vector>

#include "wcub/expr.hpp"

namespace wcub::detail {

struct Token {
  enum class Kind { number, ident, symbol, newline, end };
  Kind kind = Kind::end;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view text);

class ExprParser {
public:
  ExprParser(std::vector<Token> tokens, int variables) : tokens_(std::move(tokens)), variables_(variables) {}

  ExprPtr parse_expr();

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool at_symbol(char c) const { return peek().kind == Token::Kind::symbol && peek().text[0] == c; }
  void expect_symbol(char c, const char* context);
  [[noreturn]] void fail(const std::string& what, const Token& at) const;
  void set_variables(int n) { variables_ = n; }

private:
  ExprPtr parse_term();
  ExprPtr parse_unary();
  ExprPtr parse_power();
  ExprPtr parse_primary();

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int variables_;
};

}  // namespace wcub::detail
