#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace wcub {

/**
 * @brief Counter-based random numbers.
 *
 * Every draw is a pure function of (seed, counters...), so results do not
 * depend on the order in which work items are scheduled.
 */
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::initializer_list<std::uint64_t> counters) const {
    std::uint64_t h = mix(seed_);
    for (auto c : counters) h = mix(h ^ mix(c));
    return h;
  }

  /// Uniform on the open interval (0, 1).
  double uniform(std::initializer_list<std::uint64_t> counters) const { return to_unit(bits(counters)); }

  /// Standard normal via Box-Muller on two derived uniforms.
  double normal(std::initializer_list<std::uint64_t> counters) const {
    const std::uint64_t h = bits(counters);
    const double u1 = to_unit(h);
    const double u2 = to_unit(mix(h ^ 0x5851f42d4c957f2dULL));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  static double to_unit(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t seed_;
};

}  // namespace wcub
