#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "wcub/path.hpp"
#include "wcub/tensor.hpp"

namespace wcub {

/**
 * Signature of one linear segment with velocity g over a time step dt:
 * coefficient at a = dt^|a| / |a|! * prod_k g[a_k], i.e. exp(dt sum_i g_i Z_i).
 * Filled along the prefix tree so each word costs one multiply.
 */
template <typename Scalar = double, typename Derived>
TruncatedTensor<Scalar> segment_signature(const Eigen::MatrixBase<Derived>& g, Scalar dt, const BasisPtr& basis) {
  if (!(dt > Scalar(0))) throw std::invalid_argument("segment_signature: dt must be positive");
  if (g.size() != basis->dim() + 1) throw std::invalid_argument("segment_signature: slope has wrong dimension");
  TruncatedTensor<Scalar> out(basis);
  out[0] = Scalar(1);
  for (std::size_t i = 1; i < basis->size(); ++i) {
    const auto len = static_cast<Scalar>(basis->length(i));
    out[i] = out[basis->parent(i)] * dt * static_cast<Scalar>(g[basis->last_letter(i)]) / len;
  }
  return out;
}

/// Truncated signature of a piecewise-linear path: Chen products of the
/// segment signatures, accumulated left to right.
template <typename Scalar = double>
TruncatedTensor<Scalar> path_signature(const PiecewiseLinearPath& w, const BasisPtr& basis) {
  if (w.dim() != basis->dim()) throw std::invalid_argument("path_signature: path and basis dimensions differ");
  auto sig = segment_signature<Scalar>(w.slopes().col(0), static_cast<Scalar>(w.segment_length(0)), basis);
  for (std::size_t j = 1; j < w.segments(); ++j) {
    const auto next =
        segment_signature<Scalar>(w.slopes().col(static_cast<Eigen::Index>(j)), static_cast<Scalar>(w.segment_length(j)), basis);
    sig = mul(sig, next);
  }
  return sig;
}

/// Largest number of segment splittings signature_bruteforce will enumerate
/// for a single word.
inline constexpr std::size_t kMaxSplittings = 2'000'000;

/**
 * Independent evaluation of the truncated signature: for each word, sum over
 * all ways of distributing its letters (in order) across the segments of
 * prod_j (dt_j^c_j / c_j!) * prod(slope letters in block j).
 * Exponential in word length; for cross-checking only.
 */
TruncatedTensor<double> signature_bruteforce(const PiecewiseLinearPath& w, const BasisPtr& basis);

}  // namespace wcub
