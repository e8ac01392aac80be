#include "wcub/moments.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "wcub/parallel.hpp"
#include "wcub/rng.hpp"
#include "wcub/signature.hpp"
#include "wcub/tensor.hpp"

namespace wcub {

MomentVector analytic_moments(const BasisPtr& basis) {
  auto generator = TruncatedTensor<double>::generator(basis, 0);
  for (int i = 1; i <= basis->dim(); ++i) {
    const auto z = TruncatedTensor<double>::generator(basis, i);
    generator += 0.5 * mul(z, z);
  }
  return {basis, exp(generator).coeffs(), MomentSource::analytic, {}};
}

namespace {

// Running mean and sum of squared deviations, merged with Chan's update.
struct Accumulator {
  double count = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd m2;
};

Accumulator merge(const Accumulator& a, const Accumulator& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  Accumulator out;
  out.count = a.count + b.count;
  const Eigen::VectorXd delta = b.mean - a.mean;
  out.mean = a.mean + delta * (b.count / out.count);
  out.m2 = a.m2 + b.m2 + delta.cwiseProduct(delta) * (a.count * b.count / out.count);
  return out;
}

constexpr std::int64_t kChunk = 1024;

}  // namespace

MomentVector mc_moments(const BasisPtr& basis, int levels, std::int64_t samples, std::uint64_t seed) {
  if (levels < 1) throw std::invalid_argument("mc_moments: levels must be >= 1");
  if (samples < 1) throw std::invalid_argument("mc_moments: samples must be >= 1");
  if (levels > 20) throw std::invalid_argument("mc_moments: levels too large");
  const int d = basis->dim();
  const std::int64_t segments = std::int64_t{1} << levels;
  const double dt = 1.0 / static_cast<double>(segments);
  const double sd = std::sqrt(dt);
  const CounterRng rng(seed);
  const auto n = static_cast<Eigen::Index>(basis->size());

  const std::size_t chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  std::vector<Accumulator> partial(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    Accumulator acc{0.0, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    const std::int64_t lo = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t hi = std::min(samples, lo + kChunk);
    Eigen::VectorXd slope(d + 1);
    slope[0] = 1.0;
    for (std::int64_t s = lo; s < hi; ++s) {
      TruncatedTensor<double> sig = TruncatedTensor<double>::unit(basis);
      for (std::int64_t j = 0; j < segments; ++j) {
        for (int i = 1; i <= d; ++i)
          slope[i] = sd * rng.normal({static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(j),
                                      static_cast<std::uint64_t>(i)}) / dt;
        sig = j == 0 ? segment_signature(slope, dt, basis) : mul(sig, segment_signature(slope, dt, basis));
      }
      acc.count += 1.0;
      const Eigen::VectorXd delta = sig.coeffs() - acc.mean;
      acc.mean += delta / acc.count;
      acc.m2 += delta.cwiseProduct(sig.coeffs() - acc.mean);
    }
    partial[c] = std::move(acc);
  });
  const Accumulator total = pairwise_reduce(std::move(partial), merge);

  MomentVector out{basis, total.mean, MomentSource::monte_carlo, Eigen::VectorXd::Zero(n)};
  out.values[0] = 1.0;
  if (total.count > 1.0)
    out.stderrs = (total.m2 / (total.count - 1.0) / total.count).cwiseMax(0.0).cwiseSqrt();
  out.stderrs[0] = 0.0;
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_moments_csv(std::ostream& out, const MomentVector& m) {
  out << "word,degree,value,stderr\n";
  char buf[64];
  for (std::size_t i = 0; i < m.basis->size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    std::snprintf(buf, sizeof buf, "%.17g", m.values[k]);
    out << csv_escape((*m.basis)[i].to_string()) << ',' << m.basis->degree(i) << ',' << buf << ',';
    if (m.stderrs.size() == m.values.size()) {
      std::snprintf(buf, sizeof buf, "%.17g", m.stderrs[k]);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace wcub
