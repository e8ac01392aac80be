#include <doctest.h>

#include <cmath>
#include <sstream>

#include "wcub/lp_construct.hpp"
#include "wcub/moments.hpp"
#include "wcub/signature.hpp"

using wcub::Multiindex;

namespace {

double factorial(std::size_t k) { return std::tgamma(static_cast<double>(k) + 1.0); }

// E[xi^k] for a standard normal.
double normal_moment(int k) {
  if (k % 2) return 0.0;
  double r = 1.0;
  for (int j = k - 1; j > 1; j -= 2) r *= j;
  return r;
}

// Exact expected signature of the linear interpolation of Brownian motion on
// 2^levels equal steps: the n-th tensor power of one step's expectation,
// E[exp(h Z0 + sqrt(h) sum xi_i Z_i)], whose coefficient at a is
// h^(zeros) h^(nonzeros/2) / |a|! prod_i E[xi^count_i].
wcub::TruncatedTensor<double> dyadic_expectation(const wcub::BasisPtr& b, int levels) {
  const double h = std::ldexp(1.0, -levels);
  wcub::TruncatedTensor<double> step(b);
  for (std::size_t i = 0; i < b->size(); ++i) {
    std::vector<int> count(static_cast<std::size_t>(b->dim()) + 1, 0);
    for (int l : (*b)[i].letters()) ++count[static_cast<std::size_t>(l)];
    double v = std::pow(h, b->degree(i) / 2.0) / factorial(b->length(i));
    for (int l = 1; l <= b->dim(); ++l) v *= normal_moment(count[static_cast<std::size_t>(l)]);
    step[i] = v;
  }
  auto out = step;
  for (int k = 0; k < levels; ++k) out = mul(out, out);
  return out;
}

}  // namespace

TEST_CASE("analytic moments: hand values") {
  const auto b = wcub::enumerate_basis(2, 4);
  const auto m = wcub::analytic_moments(b);
  CHECK(m.source == wcub::MomentSource::analytic);
  CHECK(m.stderrs.size() == 0);
  CHECK(m.at({}) == 1.0);
  CHECK(m.at({1}) == 0.0);
  CHECK(m.at({2}) == 0.0);
  CHECK(m.at({1, 1}) == 0.5);
  CHECK(m.at({1, 2}) == 0.0);
  CHECK(m.at({0}) == 1.0);
  CHECK(m.at({0, 0}) == 0.5);
  // E[B^4]/4! = 3/24 for the constant-slope-free fourth iterated integral
  CHECK(m.at({1, 1, 1, 1}) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK(m.at({0, 1, 1}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.at({1, 1, 0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.at({1, 0, 1}) == 0.0);
}

TEST_CASE("analytic moments vanish on words odd in some letter") {
  const auto b = wcub::enumerate_basis(3, 5);
  const auto m = wcub::analytic_moments(b);
  for (std::size_t i = 0; i < b->size(); ++i) {
    bool odd = false;
    for (int l = 1; l <= 3; ++l) {
      const auto c = std::count((*b)[i].letters().begin(), (*b)[i].letters().end(), l);
      odd = odd || (c % 2 == 1);
    }
    if (odd) CHECK(m.values[static_cast<Eigen::Index>(i)] == 0.0);
  }
}

TEST_CASE("degree-3 formula matches analytic moments") {
  for (int d = 1; d <= 4; ++d) {
    const auto f = wcub::degree3_formula(d);
    CHECK(f.size() == (std::size_t{1} << d));
    CHECK(wcub::check_moments(f).max_residual <= 1e-14);
  }
  const auto f2 = wcub::degree3_formula(2);
  const auto b = wcub::enumerate_basis(2, 3);
  double v = 0.0;
  for (std::size_t j = 0; j < f2.size(); ++j) v += f2.weights[j] * wcub::path_signature(f2.paths[j], b).at({1, 2});
  CHECK(v == 0.0);
}

TEST_CASE("dyadic expectation converges to the analytic moments") {
  const auto b = wcub::enumerate_basis(2, 5);
  const auto exact = wcub::analytic_moments(b);
  double prev = 1.0;
  for (int levels = 2; levels <= 10; levels += 2) {
    const double gap = (dyadic_expectation(b, levels).coeffs() - exact.values).cwiseAbs().maxCoeff();
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
  // First-order bias on (1,0,1) is h/6.
  const double h = 1.0 / 64.0;
  CHECK(dyadic_expectation(b, 6).at({1, 0, 1}) == doctest::Approx(h / 6.0).epsilon(0.05));
}

TEST_CASE("Monte Carlo moments agree with the exact dyadic expectation") {
  const auto b = wcub::enumerate_basis(2, 3);
  const auto mc = wcub::mc_moments(b, 3, 20000, 99);
  const auto exact = dyadic_expectation(b, 3);
  CHECK(mc.source == wcub::MomentSource::monte_carlo);
  CHECK(mc.at({}) == 1.0);
  CHECK(mc.stderrs[0] == 0.0);
  for (std::size_t i = 1; i < b->size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    CAPTURE((*b)[i].to_string());
    CHECK(std::abs(mc.values[k] - exact[i]) <= 4.0 * mc.stderrs[k] + 1e-15);
  }
  CHECK(std::abs(mc.at({1})) <= 4.0 * mc.stderrs[1]);
}

TEST_CASE("Monte Carlo is deterministic and error shrinks with samples") {
  const auto b = wcub::enumerate_basis(1, 3);
  const auto a = wcub::mc_moments(b, 2, 3000, 5);
  const auto c = wcub::mc_moments(b, 2, 3000, 5);
  CHECK(a.values == c.values);
  CHECK(a.stderrs == c.stderrs);
  const auto big = wcub::mc_moments(b, 2, 12000, 5);
  // stderr scales like 1/sqrt(samples): quadrupling halves it, within noise
  for (Eigen::Index k = 1; k < a.stderrs.size(); ++k) {
    if (a.stderrs[k] == 0.0) continue;
    CHECK(big.stderrs[k] / a.stderrs[k] == doctest::Approx(0.5).epsilon(0.15));
  }
  CHECK_THROWS_AS(wcub::mc_moments(b, 0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(wcub::mc_moments(b, 2, 0, 1), std::invalid_argument);
}

TEST_CASE("moments CSV") {
  const auto b = wcub::enumerate_basis(1, 2);
  std::ostringstream out;
  wcub::write_moments_csv(out, wcub::analytic_moments(b));
  CHECK(out.str() ==
        "word,degree,value,stderr\n"
        "(),0,1,\n"
        "(1),1,0,\n"
        "(0),2,1,\n"
        "\"(1,1)\",2,0.5,\n");
}
