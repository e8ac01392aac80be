#include <doctest.h>

#include <cmath>
#include <random>

#include "wcub/expr.hpp"
#include "wcub/sde.hpp"

using wcub::parse_expression;
using wcub::ParseError;

namespace {

double eval(const std::string& text, std::vector<double> x = {}) {
  return parse_expression(text, static_cast<int>(x.size())).evaluate(x);
}

std::string error_of(const std::string& text, int variables) {
  try {
    parse_expression(text, variables);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("precedence and associativity") {
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("(-2)^2") == 4.0);
  CHECK(eval("2^-1") == 0.5);
  CHECK(eval("1 - 2 - 3") == -4.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("--3") == 3.0);
  CHECK(eval("2 * -3") == -6.0);
  CHECK(eval("1.5e2 + .5") == 150.5);
  CHECK(eval("x1 * x2 - x3", {2.0, 3.0, 10.0}) == -4.0);
}

TEST_CASE("functions match the host math library") {
  const double x = 0.7;
  CHECK(eval("sin(x1)", {x}) == doctest::Approx(std::sin(x)).epsilon(1e-15));
  CHECK(eval("cos(x1)", {x}) == doctest::Approx(std::cos(x)).epsilon(1e-15));
  CHECK(eval("exp(x1)", {x}) == doctest::Approx(std::exp(x)).epsilon(1e-15));
  CHECK(eval("log(x1)", {x}) == doctest::Approx(std::log(x)).epsilon(1e-15));
  CHECK(eval("sqrt(x1)", {x}) == doctest::Approx(std::sqrt(x)).epsilon(1e-15));
  CHECK(eval("tanh(x1)", {x}) == doctest::Approx(std::tanh(x)).epsilon(1e-15));
  CHECK(eval("sin(x1)^2 + cos(x1)^2", {x}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expression errors") {
  CHECK(error_of("sin(x1)*x2", 1).find("unknown variable x2") != std::string::npos);
  CHECK(error_of("foo(x1)", 1).find("unknown function") != std::string::npos);
  CHECK(error_of("sin(x1, x1)", 1).find("takes 1 argument, got 2") != std::string::npos);
  CHECK(error_of("y + 1", 1).find("unknown identifier") != std::string::npos);
  CHECK(error_of("1 +", 1).find("expected an expression") != std::string::npos);
  CHECK(error_of("(1 + 2", 1).find("expected ')'") != std::string::npos);
  CHECK(error_of("1 $ 2", 1).find("unexpected character") != std::string::npos);
  CHECK(error_of("x0", 1).find("unknown variable") != std::string::npos);
  try {
    parse_expression("1 + 2\n  * 3", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("print then parse reproduces the tree") {
  std::mt19937 rng(41);
  const char* samples[] = {"2^3^2",     "-x1^2 + 3*x2", "sin(x1)*cos(x2)/(1 + x1^2)", "-(-x1)",
                           "0.1*x1 - 0.30000000000000004", "exp(-x2/3)", "1e-300 * x1", "tanh(x1) - log(sqrt(x2))"};
  for (const char* s : samples) {
    CAPTURE(s);
    const auto e = parse_expression(s, 2);
    const auto again = parse_expression(e.to_string(), 2);
    CHECK(again == e);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    const std::vector<double> x{u(rng), u(rng)};
    CHECK(again.evaluate(x) == e.evaluate(x));
  }
}

TEST_CASE("parse a system") {
  const auto sys = wcub::parse_system("N=1 d=1; V0[1]=0; V1[1]=x1");
  CHECK(sys.state_dim() == 1);
  CHECK(sys.driving_dim() == 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(sys.evaluate_field(1, x)[0] == 2.0);
  CHECK(sys.evaluate_field(0, x)[0] == 0.0);

  const auto two = wcub::parse_system(
      "# a rotation driven by one noise\n"
      "N = 2\n"
      "d = 1\n"
      "V0[1] = 0; V0[2] = 0\n"
      "V1[1] = sin(x1)\n"
      "V1[2] = cos(x1)\n");
  const Eigen::Vector2d y(0.7, 0.0);
  CHECK(two.evaluate_field(1, y)[0] == std::sin(0.7));
  CHECK(two.evaluate_field(1, y)[1] == std::cos(0.7));
  CHECK(two.drive(Eigen::Vector2d(1.0, 2.0), y).isApprox(2.0 * Eigen::Vector2d(std::sin(0.7), std::cos(0.7))));

  const auto again = wcub::parse_system(two.to_string());
  for (int i = 0; i <= 1; ++i)
    for (int c = 0; c < 2; ++c) CHECK(again.component(i, c) == two.component(i, c));
}

TEST_CASE("system errors") {
  auto message = [](const std::string& text) -> std::string {
    try {
      wcub::parse_system(text);
    } catch (const ParseError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("N=1 d=1; V0[1]=0; V1[1]=sin(x1)*x2").find("unknown variable x2") != std::string::npos);
  CHECK(message("N=1 d=1; V0[1]=0").find("missing component V1[1]") != std::string::npos);
  CHECK(message("N=1 d=1; V0[1]=0; V0[1]=1; V1[1]=x1").find("defined twice") != std::string::npos);
  CHECK(message("N=1 d=1; V0[1]=0; V2[1]=x1").find("exceeds d") != std::string::npos);
  CHECK(message("N=1 d=1; V0[2]=0").find("component index") != std::string::npos);
  CHECK(message("V0[1]=0").find("declared before") != std::string::npos);
  CHECK(message("N=1; V0[1]=0").find("declared before") != std::string::npos);
  CHECK(message("N=0 d=1").find("at least 1") != std::string::npos);
  CHECK(message("N=1 d=1; W0[1]=0").find("unknown identifier") != std::string::npos);
  CHECK(message("").find("must declare N and d") != std::string::npos);
}

TEST_CASE("domain errors carry the component") {
  const auto sys = wcub::parse_system("N=2 d=1; V0[1]=0; V0[2]=0; V1[1]=1; V1[2]=log(x2)");
  try {
    sys.evaluate_field(1, Eigen::Vector2d(1.0, -1.0));
    FAIL("expected a domain error");
  } catch (const wcub::DomainError& e) {
    CHECK(e.field() == 1);
    CHECK(e.component() == 2);
  }
  CHECK_THROWS_AS(sys.validate_at({Eigen::Vector2d(0.0, 0.0)}), wcub::DomainError);
  CHECK_NOTHROW(sys.validate_at({Eigen::Vector2d(0.0, 1.0)}));
  CHECK_THROWS_AS(sys.evaluate_field(2, Eigen::Vector2d(1.0, 1.0)), std::out_of_range);
}

TEST_CASE("built-in systems") {
  CHECK(wcub::builtin_system_names() == std::vector<std::string>{"gbm", "ou", "linear"});
  const auto gbm = wcub::builtin_system("gbm");
  CHECK(gbm.evaluate_field(1, Eigen::VectorXd::Constant(1, 2.0))[0] == 2.0);
  CHECK(gbm.evaluate_field(0, Eigen::VectorXd::Constant(1, 5.0))[0] == 0.0);
  const auto ou = wcub::builtin_system("ou");
  CHECK(ou.evaluate_field(0, Eigen::VectorXd::Constant(1, 3.0))[0] == -3.0);
  const auto lin = wcub::builtin_system("linear");
  CHECK(lin.state_dim() == 2);
  CHECK(lin.driving_dim() == 2);
  CHECK(wcub::is_builtin_system("ou"));
  CHECK_FALSE(wcub::is_builtin_system("heston"));
  CHECK_THROWS_AS(wcub::builtin_system("heston"), std::invalid_argument);
}
