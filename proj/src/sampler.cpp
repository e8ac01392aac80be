#include "wcub/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "wcub/rng.hpp"

namespace wcub {

namespace {

void validate(const SamplerConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("sampler: d must be >= 1");
  if (cfg.segments < 1) throw std::invalid_argument("sampler: M must be >= 1");
  if (cfg.scheme == Scheme::b && cfg.segments < 2)
    throw std::invalid_argument("sampler: scheme b needs M >= 2 (the last time increment is not free)");
}

}  // namespace

PiecewiseLinearPath sample_path(const SamplerConfig& cfg, std::uint64_t index) {
  validate(cfg);
  const CounterRng rng(cfg.seed);
  const int M = cfg.segments;
  const double h = 1.0 / M;
  const double sd = std::sqrt(h);
  Eigen::MatrixXd slopes(cfg.d + 1, M);
  double elapsed = 0.0;
  for (int j = 0; j < M; ++j) {
    const auto seg = static_cast<std::uint64_t>(j);
    for (int i = 1; i <= cfg.d; ++i)
      slopes(i, j) = sd * rng.normal({index, seg, static_cast<std::uint64_t>(i)}) / h;
    if (cfg.scheme == Scheme::a) {
      slopes(0, j) = 1.0;
    } else {
      const double inc = j + 1 < M ? h + h * rng.normal({index, seg, 0}) : 1.0 - elapsed;
      elapsed += inc;
      slopes(0, j) = inc / h;
    }
  }
  std::vector<double> bp(static_cast<std::size_t>(M) + 1);
  for (int k = 0; k <= M; ++k) bp[static_cast<std::size_t>(k)] = static_cast<double>(k) / M;
  return {std::move(bp), std::move(slopes)};
}

std::vector<PiecewiseLinearPath> sample_paths(const SamplerConfig& cfg, std::size_t count, std::uint64_t first_index) {
  validate(cfg);
  if (count == 0) throw std::invalid_argument("sample_paths: N must be >= 1");
  std::vector<PiecewiseLinearPath> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(sample_path(cfg, first_index + k));
  return out;
}

}  // namespace wcub
