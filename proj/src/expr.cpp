#include "wcub/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "expr_parser.hpp"

namespace wcub {

namespace {

struct FuncName {
  const char* name;
  Func func;
};
constexpr FuncName kFuncs[] = {{"sin", Func::sin},   {"cos", Func::cos},   {"exp", Func::exp},
                               {"log", Func::log},   {"sqrt", Func::sqrt}, {"tanh", Func::tanh}};

const char* func_name(Func f) {
  for (const auto& fn : kFuncs)
    if (fn.func == f) return fn.name;
  return "?";
}

ExprPtr make_binary(ExprNode::Kind kind, ExprPtr lhs, ExprPtr rhs) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

double eval(const ExprNode& n, std::span<const double> x) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::number:
      return n.value;
    case K::variable:
      return x[static_cast<std::size_t>(n.variable - 1)];
    case K::negate:
      return -eval(*n.lhs, x);
    case K::add:
      return eval(*n.lhs, x) + eval(*n.rhs, x);
    case K::sub:
      return eval(*n.lhs, x) - eval(*n.rhs, x);
    case K::mul:
      return eval(*n.lhs, x) * eval(*n.rhs, x);
    case K::div:
      return eval(*n.lhs, x) / eval(*n.rhs, x);
    case K::pow:
      return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
    case K::call: {
      const double a = eval(*n.lhs, x);
      switch (n.func) {
        case Func::sin:
          return std::sin(a);
        case Func::cos:
          return std::cos(a);
        case Func::exp:
          return std::exp(a);
        case Func::log:
          return std::log(a);
        case Func::sqrt:
          return std::sqrt(a);
        case Func::tanh:
          return std::tanh(a);
      }
    }
  }
  return std::nan("");
}

void print(const ExprNode& n, std::string& out) {
  using K = ExprNode::Kind;
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  switch (n.kind) {
    case K::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    }
    case K::variable:
      out += "x" + std::to_string(n.variable);
      break;
    case K::negate:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      break;
    case K::add:
      binary(" + ");
      break;
    case K::sub:
      binary(" - ");
      break;
    case K::mul:
      binary(" * ");
      break;
    case K::div:
      binary(" / ");
      break;
    case K::pow:
      binary("^");
      break;
    case K::call:
      out += func_name(n.func);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      break;
  }
}

}  // namespace

bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind) return false;
  using K = ExprNode::Kind;
  switch (a.kind) {
    case K::number:
      return a.value == b.value;
    case K::variable:
      return a.variable == b.variable;
    case K::negate:
      return same_tree(*a.lhs, *b.lhs);
    case K::call:
      return a.func == b.func && same_tree(*a.lhs, *b.lhs);
    default:
      return same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
}

double Expression::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) < variables_) throw std::invalid_argument("expression: too few variable values");
  return eval(*root_, x);
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

Expression parse_expression(std::string_view text, int variables) {
  detail::ExprParser p(detail::tokenize(text), variables);
  auto root = p.parse_expr();
  while (p.peek().kind == detail::Token::Kind::newline) p.next();
  if (p.peek().kind != detail::Token::Kind::end) p.fail("unexpected '" + p.peek().text + "' after expression", p.peek());
  return {std::move(root), variables};
}

namespace detail {

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    i += n;
    col += static_cast<int>(n);
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      out.push_back({Token::Kind::newline, "newline", 0.0, line, col});
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      tok.kind = Token::Kind::number;
      tok.text = std::string(text.substr(i, j - i));
      char* end = nullptr;
      tok.number = std::strtod(tok.text.c_str(), &end);
      if (end != tok.text.c_str() + tok.text.size()) throw ParseError("malformed number '" + tok.text + "'", line, col);
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      tok.kind = Token::Kind::ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (std::string_view("+-*/^()[]=,;").find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::symbol;
      tok.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back(std::move(tok));
  }
  out.push_back({Token::Kind::end, "end of input", 0.0, line, col});
  return out;
}

void ExprParser::fail(const std::string& what, const Token& at) const { throw ParseError(what, at.line, at.column); }

void ExprParser::expect_symbol(char c, const char* context) {
  if (!at_symbol(c)) fail(std::string("expected '") + c + "' " + context + ", found '" + peek().text + "'", peek());
  next();
}

ExprPtr ExprParser::parse_expr() {
  auto lhs = parse_term();
  while (at_symbol('+') || at_symbol('-')) {
    const auto kind = next().text[0] == '+' ? ExprNode::Kind::add : ExprNode::Kind::sub;
    lhs = make_binary(kind, std::move(lhs), parse_term());
  }
  return lhs;
}

ExprPtr ExprParser::parse_term() {
  auto lhs = parse_unary();
  while (at_symbol('*') || at_symbol('/')) {
    const auto kind = next().text[0] == '*' ? ExprNode::Kind::mul : ExprNode::Kind::div;
    lhs = make_binary(kind, std::move(lhs), parse_unary());
  }
  return lhs;
}

ExprPtr ExprParser::parse_unary() {
  if (at_symbol('-')) {
    next();
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::negate;
    n->lhs = parse_unary();
    return n;
  }
  return parse_power();
}

ExprPtr ExprParser::parse_power() {
  auto base = parse_primary();
  if (at_symbol('^')) {
    next();
    return make_binary(ExprNode::Kind::pow, std::move(base), parse_unary());
  }
  return base;
}

ExprPtr ExprParser::parse_primary() {
  const Token& tok = peek();
  if (tok.kind == Token::Kind::number) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::number;
    n->value = next().number;
    return n;
  }
  if (at_symbol('(')) {
    next();
    auto inner = parse_expr();
    expect_symbol(')', "to close parenthesis");
    return inner;
  }
  if (tok.kind == Token::Kind::ident) {
    const Token id = next();
    if (at_symbol('(')) {
      const FuncName* fn = nullptr;
      for (const auto& f : kFuncs)
        if (id.text == f.name) fn = &f;
      if (!fn) fail("unknown function '" + id.text + "'", id);
      next();
      std::vector<ExprPtr> args;
      if (!at_symbol(')')) {
        args.push_back(parse_expr());
        while (at_symbol(',')) {
          next();
          args.push_back(parse_expr());
        }
      }
      expect_symbol(')', "after function arguments");
      if (args.size() != 1)
        fail("function '" + id.text + "' takes 1 argument, got " + std::to_string(args.size()), id);
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::call;
      n->func = fn->func;
      n->lhs = std::move(args.front());
      return n;
    }
    if (id.text.size() > 1 && id.text[0] == 'x') {
      const std::string digits = id.text.substr(1);
      bool numeric = !digits.empty();
      for (char c : digits) numeric = numeric && std::isdigit(static_cast<unsigned char>(c));
      if (numeric) {
        const long k = digits[0] == '0' ? 0 : std::strtol(digits.c_str(), nullptr, 10);
        if (k < 1 || k > variables_)
          fail("unknown variable " + id.text + " (state dimension is " + std::to_string(variables_) + ")", id);
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::variable;
        n->variable = static_cast<int>(k);
        return n;
      }
    }
    for (const auto& f : kFuncs)
      if (id.text == f.name) fail("function '" + id.text + "' must be called with parentheses", id);
    fail("unknown identifier '" + id.text + "'", id);
  }
  fail("expected an expression, found '" + tok.text + "'", tok);
}

}  // namespace detail

}  // namespace wcub
