#include "wcub/sde.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>

#include "expr_parser.hpp"

namespace wcub {

VectorFieldSystem::VectorFieldSystem(int state_dim, int driving_dim, std::vector<std::vector<Expression>> fields)
    : n_(state_dim), d_(driving_dim), fields_(std::move(fields)) {
  if (n_ < 1) throw std::invalid_argument("system: N must be >= 1");
  if (d_ < 1) throw std::invalid_argument("system: d must be >= 1");
  if (fields_.size() != static_cast<std::size_t>(d_ + 1)) throw std::invalid_argument("system: need d+1 fields");
  for (const auto& f : fields_)
    if (f.size() != static_cast<std::size_t>(n_)) throw std::invalid_argument("system: each field needs N components");
}

Eigen::VectorXd VectorFieldSystem::evaluate_field(int i, const Eigen::VectorXd& x) const {
  if (i < 0 || i > d_) throw std::out_of_range("evaluate_field: field index out of range");
  if (x.size() != n_) throw std::invalid_argument("evaluate_field: state has wrong dimension");
  Eigen::VectorXd out(n_);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
  for (int c = 0; c < n_; ++c) {
    const double v = component(i, c).evaluate(xs);
    if (!std::isfinite(v)) throw DomainError(i, c + 1, v);
    out[c] = v;
  }
  return out;
}

Eigen::VectorXd VectorFieldSystem::drive(const Eigen::VectorXd& g, const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i <= d_; ++i)
    if (g[i] != 0.0) out += g[i] * evaluate_field(i, x);
  return out;
}

void VectorFieldSystem::validate_at(const std::vector<Eigen::VectorXd>& points) const {
  for (const auto& p : points)
    for (int i = 0; i <= d_; ++i) evaluate_field(i, p);
}

std::string VectorFieldSystem::to_string() const {
  std::string out = "N = " + std::to_string(n_) + "; d = " + std::to_string(d_) + "\n";
  for (int i = 0; i <= d_; ++i)
    for (int c = 0; c < n_; ++c)
      out += "V" + std::to_string(i) + "[" + std::to_string(c + 1) + "] = " + component(i, c).to_string() + "\n";
  return out;
}

namespace {

using detail::Token;

int parse_int(detail::ExprParser& p, const char* what) {
  const Token& t = p.peek();
  if (t.kind != Token::Kind::number || t.number != std::floor(t.number) || t.number < 0)
    p.fail(std::string("expected a nonnegative integer for ") + what, t);
  return static_cast<int>(p.next().number);
}

bool is_field_name(const std::string& s) {
  if (s.size() < 2 || s[0] != 'V') return false;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
  return true;
}

}  // namespace

VectorFieldSystem parse_system(std::string_view text) {
  detail::ExprParser p(detail::tokenize(text), 0);
  std::optional<int> n;
  std::optional<int> d;
  std::vector<std::vector<std::optional<Expression>>> fields;

  auto ensure_shape = [&](const Token& at) {
    if (!n || !d) p.fail("N and d must be declared before the first field", at);
    if (fields.empty()) {
      fields.assign(static_cast<std::size_t>(*d + 1), std::vector<std::optional<Expression>>(static_cast<std::size_t>(*n)));
      p.set_variables(*n);
    }
  };

  for (;;) {
    while (p.peek().kind == Token::Kind::newline || p.at_symbol(';')) p.next();
    if (p.peek().kind == Token::Kind::end) break;
    const Token head = p.next();
    if (head.kind != Token::Kind::ident) p.fail("expected 'N', 'd' or a field like V1[1], found '" + head.text + "'", head);
    if (head.text == "N" || head.text == "d") {
      if (!fields.empty()) p.fail(head.text + " must be declared before the first field", head);
      p.expect_symbol('=', ("after " + head.text).c_str());
      const int v = parse_int(p, head.text.c_str());
      if (v < 1) p.fail(head.text + " must be at least 1", head);
      (head.text == "N" ? n : d) = v;
      continue;
    }
    if (!is_field_name(head.text)) p.fail("unknown identifier '" + head.text + "'", head);
    ensure_shape(head);
    const int i = std::atoi(head.text.c_str() + 1);
    if (i > *d) p.fail("field " + head.text + " exceeds d = " + std::to_string(*d), head);
    p.expect_symbol('[', "after field name");
    const Token comp_tok = p.peek();
    const int c = parse_int(p, "component index");
    if (c < 1 || c > *n) p.fail("component index must be in 1.." + std::to_string(*n), comp_tok);
    p.expect_symbol(']', "after component index");
    p.expect_symbol('=', "after field component");
    auto& slot = fields[static_cast<std::size_t>(i)][static_cast<std::size_t>(c - 1)];
    if (slot) p.fail(head.text + "[" + std::to_string(c) + "] is defined twice", head);
    slot = Expression(p.parse_expr(), *n);
    const Token& after = p.peek();
    if (after.kind != Token::Kind::newline && after.kind != Token::Kind::end && !p.at_symbol(';') &&
        after.kind != Token::Kind::ident)
      p.fail("unexpected '" + after.text + "' after field expression", after);
  }

  const Token& end = p.peek();
  if (!n || !d) p.fail("system must declare N and d", end);
  if (fields.empty()) p.fail("system defines no fields", end);
  std::vector<std::vector<Expression>> out(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t c = 0; c < fields[i].size(); ++c) {
      if (!fields[i][c]) p.fail("missing component V" + std::to_string(i) + "[" + std::to_string(c + 1) + "]", end);
      out[i].push_back(*fields[i][c]);
    }
  return {*n, *d, std::move(out)};
}

namespace {

struct Builtin {
  const char* name;
  const char* source;
};

// gbm: dX = X o dB. ou: dX = -X dt + dB. linear: a 2-d linear system driven
// by two Brownian motions.
constexpr Builtin kBuiltins[] = {
    {"gbm", "N = 1; d = 1\nV0[1] = 0\nV1[1] = x1\n"},
    {"ou", "N = 1; d = 1\nV0[1] = -x1\nV1[1] = 1\n"},
    {"linear",
     "N = 2; d = 2\n"
     "V0[1] = -0.5*x1 + 0.2*x2\nV0[2] = 0.1*x1 - 0.3*x2\n"
     "V1[1] = 0.4*x1\nV1[2] = 0.2*x2\n"
     "V2[1] = 0.1*x2\nV2[2] = 0.3*x1\n"},
};

}  // namespace

VectorFieldSystem builtin_system(const std::string& name) {
  for (const auto& b : kBuiltins) {
    if (name == b.name) {
      auto sys = parse_system(b.source);
      sys.validate_at({Eigen::VectorXd::Zero(sys.state_dim()), Eigen::VectorXd::Ones(sys.state_dim())});
      return sys;
    }
  }
  throw std::invalid_argument("unknown SDE name '" + name + "'");
}

std::vector<std::string> builtin_system_names() {
  std::vector<std::string> out;
  for (const auto& b : kBuiltins) out.emplace_back(b.name);
  return out;
}

bool is_builtin_system(const std::string& name) {
  for (const auto& b : kBuiltins)
    if (name == b.name) return true;
  return false;
}

}  // namespace wcub
