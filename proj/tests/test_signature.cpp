#include <doctest.h>

#include <cmath>
#include <random>

#include "wcub/lie.hpp"
#include "wcub/signature.hpp"

using wcub::Multiindex;
using wcub::PiecewiseLinearPath;

namespace {

PiecewiseLinearPath random_path(std::mt19937& rng, int d, int segments) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<double> bp{0.0};
  for (int j = 0; j < segments; ++j) bp.push_back(bp.back() + u(rng));
  Eigen::MatrixXd slopes(d + 1, segments);
  for (Eigen::Index i = 0; i < slopes.size(); ++i) slopes.data()[i] = n(rng);
  return {bp, slopes};
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

TEST_CASE("segment signature example") {
  const auto b = wcub::enumerate_basis(1, 3);
  const auto s = wcub::segment_signature(Eigen::Vector2d(1.0, 1.0), 1.0, b);
  CHECK(s.at({}) == 1.0);
  CHECK(s.at({0}) == 1.0);
  CHECK(s.at({1}) == 1.0);
  CHECK(s.at({1, 1}) == 0.5);
  CHECK(s.at({0, 1}) == 0.5);
  CHECK(s.at({1, 0}) == 0.5);
  CHECK(s.at({1, 1, 1}) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(b->size() == 7);

  const auto zero = wcub::segment_signature(Eigen::Vector2d::Zero(), 0.5, b);
  CHECK((zero.coeffs() - wcub::TruncatedTensor<double>::unit(b).coeffs()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(wcub::segment_signature(Eigen::Vector2d(1.0, 1.0), 0.0, b), std::invalid_argument);
  CHECK_THROWS_AS(wcub::segment_signature(Eigen::Vector3d(1.0, 1.0, 1.0), 1.0, b), std::invalid_argument);
}

TEST_CASE("segment signature equals the tensor exponential") {
  std::mt19937 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto b = wcub::enumerate_basis(3, 5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector4d g(n(rng), n(rng), n(rng), n(rng));
    const double dt = 0.1 + std::abs(n(rng));
    wcub::TruncatedTensor<double> x(b);
    for (int i = 0; i <= 3; ++i) x += wcub::TruncatedTensor<double>::generator(b, i) * (dt * g[i]);
    const auto e = exp(x);
    const auto s = wcub::segment_signature(g, dt, b);
    CHECK((e.coeffs() - s.coeffs()).cwiseAbs().maxCoeff() < 1e-14 * std::max(1.0, e.coeffs().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("constant-slope coefficients z^a / k!") {
  const auto b = wcub::enumerate_basis(2, 5);
  const Eigen::Vector3d g(1.0, 1.0, -1.0);
  const PiecewiseLinearPath w({0.0, 1.0}, g);
  const auto s = wcub::path_signature(w, b);
  for (std::size_t i = 0; i < b->size(); ++i) {
    double expected = 1.0 / factorial(static_cast<int>(b->length(i)));
    for (int l : (*b)[i].letters()) expected *= g[l];
    CHECK(s[i] == doctest::Approx(expected).epsilon(1e-15));
  }
}

TEST_CASE("path signature agrees with the splitting oracle") {
  std::mt19937 rng(22);
  int checked = 0;
  for (int d = 1; d <= 3; ++d)
    for (int m = 1; m <= 5; ++m)
      for (int segs = 1; segs <= 4; ++segs) {
        const auto b = wcub::enumerate_basis(d, m);
        const auto w = random_path(rng, d, segs);
        const auto fast = wcub::path_signature(w, b);
        const auto slow = wcub::signature_bruteforce(w, b);
        const double scale = std::max(1.0, slow.coeffs().cwiseAbs().maxCoeff());
        CAPTURE(d);
        CAPTURE(m);
        CAPTURE(segs);
        CHECK((fast.coeffs() - slow.coeffs()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        CHECK(slow.at({}) == 1.0);
        ++checked;
      }
  CHECK(checked == 60);
}

TEST_CASE("shuffle identity") {
  std::mt19937 rng(23);
  const auto b = wcub::enumerate_basis(2, 5);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = wcub::path_signature(random_path(rng, 2, 3), b);
    CHECK(s.at({1}) * s.at({1}) == doctest::Approx(2.0 * s.at({1, 1})).epsilon(1e-12));
    for (std::size_t i = 1; i < b->size(); ++i)
      for (std::size_t j = 1; j < b->size(); ++j) {
        if (b->degree(i) + b->degree(j) > 5) continue;
        double sum = 0.0;
        for (const auto& g : wcub::shuffles((*b)[i], (*b)[j])) sum += s.at(g);
        CHECK(std::abs(s[i] * s[j] - sum) <= 1e-10 * std::max(1.0, std::abs(sum)));
      }
  }
}

TEST_CASE("time-only words") {
  const auto b = wcub::enumerate_basis(1, 8);
  std::mt19937 rng(24);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd sp(1, 5);
  for (int j = 0; j < 5; ++j) sp(0, j) = n(rng);
  const auto s = wcub::path_signature(PiecewiseLinearPath::with_unit_time(sp), b);
  for (int k = 1; k <= 4; ++k)
    CHECK(s.at(Multiindex(std::vector<int>(static_cast<std::size_t>(k), 0))) ==
          doctest::Approx(1.0 / factorial(k)).epsilon(1e-14));
}

TEST_CASE("log signature is a Lie element") {
  std::mt19937 rng(25);
  const auto b = wcub::enumerate_basis(2, 4);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = wcub::path_signature(random_path(rng, 2, 3), b);
    CHECK(wcub::lie_residual(log(s)) <= 1e-10);
  }
}

TEST_CASE("oracle guards") {
  const auto b = wcub::enumerate_basis(1, 3);
  const auto w2 = wcub::enumerate_basis(2, 3);
  std::mt19937 rng(26);
  const auto w = random_path(rng, 1, 2);
  CHECK_THROWS_AS(wcub::path_signature(w, w2), std::invalid_argument);
  CHECK(wcub::signature_bruteforce(w, b).at({}) == 1.0);
  // 60 segments and words of length 12 exceed the splitting guard
  const auto long_path = random_path(rng, 1, 60);
  CHECK_THROWS(wcub::signature_bruteforce(long_path, wcub::enumerate_basis(1, 12)));
}
