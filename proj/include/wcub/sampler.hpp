#pragma once

#include <cstdint>
#include <vector>

#include "wcub/formula.hpp"
#include "wcub/path.hpp"

namespace wcub {

/// Candidate-path distribution. Spatial increments are N(0, 1/M); under
/// scheme (a) time runs at unit speed, under scheme (b) the first M-1 time
/// increments are N(1/M, (1/M)^2) and the last one balances w0(1) = 1.
struct SamplerConfig {
  int d = 1;
  int segments = 2;  // M
  Scheme scheme = Scheme::a;
  std::uint64_t seed = 0;
};

/// Path number `index` of the stream defined by cfg. Deterministic.
PiecewiseLinearPath sample_path(const SamplerConfig& cfg, std::uint64_t index);

/// Paths first_index, ..., first_index + count - 1.
std::vector<PiecewiseLinearPath> sample_paths(const SamplerConfig& cfg, std::size_t count,
                                              std::uint64_t first_index = 0);

}  // namespace wcub
