#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "wcub/multiindex.hpp"

namespace wcub {

enum class MomentSource { analytic, monte_carlo };

/// Expected truncated signature of Brownian motion (with time), one value per word.
struct MomentVector {
  BasisPtr basis;
  Eigen::VectorXd values;
  MomentSource source = MomentSource::analytic;
  /// Per-word standard errors; empty for analytic moments.
  Eigen::VectorXd stderrs;

  double at(const Multiindex& w) const { return values[static_cast<Eigen::Index>(basis->index_of(w))]; }
};

/// E[pi_m(S(B))] = pi_m(exp(Z_0 + 1/2 sum_i Z_i Z_i)).
MomentVector analytic_moments(const BasisPtr& basis);

/**
 * Monte Carlo estimate of the expected signature from dyadic piecewise-linear
 * interpolations of Brownian motion with 2^levels segments. Sample s draws its
 * increments from CounterRng(seed) at counters (s, segment, coordinate).
 */
MomentVector mc_moments(const BasisPtr& basis, int levels, std::int64_t samples, std::uint64_t seed);

/// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_escape(const std::string& s);

/// Writes the moments CSV (word, degree, value, stderr).
void write_moments_csv(std::ostream& out, const MomentVector& m);

}  // namespace wcub
