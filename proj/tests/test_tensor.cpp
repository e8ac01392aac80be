#include <doctest.h>

#include <cmath>
#include <random>

#include "wcub/lie.hpp"
#include "wcub/signature.hpp"
#include "wcub/tensor.hpp"

using wcub::Multiindex;
using Tensor = wcub::TruncatedTensor<double>;

namespace {

Tensor Z(const wcub::BasisPtr& b, int i) { return Tensor::generator(b, i); }

Tensor random_tensor(const wcub::BasisPtr& b, std::mt19937& rng, double constant) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor t(b);
  for (std::size_t i = 0; i < b->size(); ++i) t[i] = n(rng);
  t[0] = constant;
  return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("product basics") {
  const auto b = wcub::enumerate_basis(1, 3);
  std::mt19937 rng(1);
  const auto x = random_tensor(b, rng, 0.3);
  CHECK(max_abs_diff(mul(Tensor::unit(b), x), x) == 0.0);
  CHECK(max_abs_diff(mul(x, Tensor::unit(b)), x) == 0.0);

  const auto b2 = wcub::enumerate_basis(1, 2);
  const auto zz = mul(Z(b2, 1), Z(b2, 1));
  CHECK(zz.at({1, 1}) == 1.0);
  CHECK(zz.coeffs().sum() == 1.0);

  // (0,0) has degree 4 and is truncated away at m = 3.
  const auto z0z0 = mul(Z(b, 0), Z(b, 0));
  CHECK(z0z0.coeffs().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("product rejects mismatched bases") {
  const auto a = Tensor::unit(wcub::enumerate_basis(1, 3));
  const auto c = Tensor::unit(wcub::enumerate_basis(2, 3));
  CHECK_THROWS_AS(mul(a, c), std::invalid_argument);
}

TEST_CASE("associativity on random tensors") {
  const auto b = wcub::enumerate_basis(2, 5);
  std::mt19937 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_tensor(b, rng, 0.5);
    const auto y = random_tensor(b, rng, -1.0);
    const auto z = random_tensor(b, rng, 2.0);
    CHECK(max_abs_diff(mul(mul(x, y), z), mul(x, mul(y, z))) < 1e-12);
  }
}

TEST_CASE("exp") {
  const auto b = wcub::enumerate_basis(1, 3);
  const auto e = exp(Z(b, 1));
  CHECK(e.at({}) == 1.0);
  CHECK(e.at({1}) == 1.0);
  CHECK(e.at({1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.at({1, 1, 1}) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(e.at({0}) == 0.0);
  CHECK(max_abs_diff(exp(Tensor(b)), Tensor::unit(b)) == 0.0);
  CHECK_THROWS_AS(exp(Tensor::unit(b)), std::invalid_argument);
}

TEST_CASE("exp of Z0 + [Z0, Z1] reproduces the counterexample coefficients") {
  const auto b = wcub::enumerate_basis(1, 4);
  const auto a = Z(b, 0) + mul(Z(b, 0), Z(b, 1)) - mul(Z(b, 1), Z(b, 0));
  const auto e = exp(a);
  CHECK(e.at({1, 0}) == -1.0);
  CHECK(e.at({1, 1, 0}) == 0.0);
}

TEST_CASE("log and exp are mutually inverse") {
  const auto b = wcub::enumerate_basis(2, 5);
  CHECK(max_abs_diff(log(Tensor::unit(b)), Tensor(b)) == 0.0);
  const auto s = Z(b, 0) + Z(b, 1);
  CHECK(max_abs_diff(log(exp(s)), s) < 1e-15);

  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_tensor(b, rng, 0.0);
    CHECK(max_abs_diff(log(exp(x)), x) < 1e-12);
    const auto g = exp(x);
    CHECK(max_abs_diff(exp(log(g)), g) < 1e-12);
  }
  auto scaled = Tensor::unit(b) * 3.0;
  CHECK(log(scaled).at({}) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(log(Tensor(b)), std::invalid_argument);
}

TEST_CASE("inverse") {
  const auto b = wcub::enumerate_basis(2, 4);
  CHECK(max_abs_diff(inverse(Tensor::unit(b)), Tensor::unit(b)) == 0.0);
  CHECK(max_abs_diff(inverse(exp(Z(b, 1))), exp(-Z(b, 1))) < 1e-15);
  std::mt19937 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = exp(random_tensor(b, rng, 0.0));
    CHECK(max_abs_diff(mul(g, inverse(g)), Tensor::unit(b)) < 1e-12);
    CHECK(max_abs_diff(mul(inverse(g), g), Tensor::unit(b)) < 1e-12);
  }
  const auto h = random_tensor(b, rng, -2.5);
  CHECK(max_abs_diff(mul(h, inverse(h)), Tensor::unit(b)) < 1e-12);
  CHECK_THROWS_AS(inverse(Tensor(b)), std::invalid_argument);
}

TEST_CASE("project") {
  const auto b = wcub::enumerate_basis(1, 3);
  const auto e = exp(Z(b, 1));
  CHECK(max_abs_diff(project(e, 3), e) == 0.0);
  const auto p1 = project(e, 1);
  CHECK(p1.at({}) == 1.0);
  CHECK(p1.at({1}) == 1.0);
  CHECK(p1.coeffs().sum() == 2.0);
  std::mt19937 rng(5);
  const auto x = random_tensor(b, rng, 0.7);
  CHECK(max_abs_diff(project(x, 0), Tensor::unit(b) * 0.7) == 0.0);
  CHECK_THROWS_AS(project(e, 4), std::invalid_argument);
  CHECK_THROWS_AS(project(e, -1), std::invalid_argument);
}

TEST_CASE("products never populate words above the truncation") {
  const auto b = wcub::enumerate_basis(2, 4);
  const auto big = wcub::enumerate_basis(2, 8);
  std::mt19937 rng(6);
  const auto x = random_tensor(b, rng, 1.0);
  const auto y = random_tensor(b, rng, 1.0);
  // Embed into a larger truncation, multiply there, and project back down.
  Tensor xb(big), yb(big);
  for (std::size_t i = 0; i < b->size(); ++i) {
    xb[big->index_of((*b)[i])] = x[i];
    yb[big->index_of((*b)[i])] = y[i];
  }
  const auto full = mul(xb, yb);
  const auto small = mul(x, y);
  for (std::size_t i = 0; i < big->size(); ++i) {
    if (big->degree(i) <= 4) CHECK(full[i] == doctest::Approx(small.at((*big)[i])).epsilon(1e-13));
  }
}

TEST_CASE("Lie residual") {
  const auto b = wcub::enumerate_basis(1, 3);
  CHECK(wcub::lie_residual(Z(b, 0) + bracket(Z(b, 0), Z(b, 1))) < 1e-12);

  // Z1 Z2 = 1/2 [Z1, Z2] + 1/2 (Z1 Z2 + Z2 Z1); the symmetric half has norm 1/sqrt(2).
  const auto b2 = wcub::enumerate_basis(2, 2);
  CHECK(wcub::lie_residual(mul(Z(b2, 1), Z(b2, 2))) == doctest::Approx(0.70710678118654757).epsilon(1e-12));

  const auto b3 = wcub::enumerate_basis(2, 4);
  CHECK_THROWS_AS(wcub::lie_residual(Tensor::unit(b3)), std::invalid_argument);
  // Lie elements of A(4), d=2: degree-graded dimensions 3 + 2 + (1+2) + (2+2+1+...)
  // are checked indirectly: brackets stay in the span.
  const auto x = bracket(Z(b3, 1), bracket(Z(b3, 2), Z(b3, 1))) + 0.3 * bracket(Z(b3, 0), Z(b3, 2));
  CHECK(wcub::lie_residual(x) < 1e-12);
  CHECK(wcub::lie_residual(mul(Z(b3, 1), Z(b3, 1))) > 0.5);
}

TEST_CASE("log of a path signature is a Lie polynomial") {
  const auto b = wcub::enumerate_basis(2, 3);
  Eigen::MatrixXd slopes(3, 2);
  slopes << 1.0, 1.0, 0.7, -1.3, 0.2, 0.9;
  const wcub::PiecewiseLinearPath w({0.0, 0.4, 1.0}, slopes);
  const auto sig = wcub::path_signature(w, b);
  CHECK(wcub::lie_residual(log(sig)) < 1e-12);
}

TEST_CASE("tensor algebra works in extended precision") {
  using LTensor = wcub::TruncatedTensor<long double>;
  const auto b = wcub::enumerate_basis(2, 4);
  auto x = LTensor::generator(b, 1) + LTensor::generator(b, 0) * 0.25L;
  const auto g = exp(x);
  CHECK(static_cast<double>((log(g).coeffs() - x.coeffs()).cwiseAbs().maxCoeff()) < 1e-17);
}
