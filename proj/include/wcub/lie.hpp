#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "wcub/tensor.hpp"

namespace wcub {

/**
 * @brief Orthogonal projector onto the truncated free Lie algebra.
 *
 * The spanning set is the right-nested bracket [Z_i1, [Z_i2, ... Z_ik]] of
 * every nonempty word of A(m). It is redundant; a column-pivoted QR with
 * drop tolerance 1e-10 extracts an orthonormal basis of its span.
 */
template <typename Scalar = double>
class LieProjector {
public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit LieProjector(BasisPtr basis, Scalar drop_tolerance = Scalar(1e-10)) : basis_(std::move(basis)) {
    const auto& b = *basis_;
    const auto n = static_cast<Eigen::Index>(b.size());
    Matrix span(n, n - 1);
    // Right-nested brackets, built from the tail: R(i w) = [Z_i, R(w)].
    std::vector<TruncatedTensor<Scalar>> nested;
    nested.reserve(b.size());
    nested.emplace_back(basis_);
    for (std::size_t w = 1; w < b.size(); ++w) {
      const auto& letters = b[w].letters();
      const auto head = TruncatedTensor<Scalar>::generator(basis_, letters.front());
      if (letters.size() == 1) {
        nested.push_back(head);
      } else {
        const auto tail = b.index_of(Multiindex(std::vector<int>(letters.begin() + 1, letters.end())));
        nested.push_back(bracket(head, nested[tail]));
      }
      span.col(static_cast<Eigen::Index>(w) - 1) = nested.back().coeffs();
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(span);
    qr.setThreshold(drop_tolerance);
    rank_ = qr.rank();
    q_ = qr.householderQ() * Matrix::Identity(n, rank_);
  }

  Eigen::Index rank() const { return rank_; }

  Vector project(const Vector& v) const { return q_ * (q_.transpose() * v); }

  /// Euclidean distance from a to the Lie span.
  Scalar residual(const TruncatedTensor<Scalar>& a) const {
    if (a.constant() != Scalar(0)) throw std::invalid_argument("lie_residual: constant term must be zero");
    return (a.coeffs() - project(a.coeffs())).norm();
  }

private:
  BasisPtr basis_;
  Eigen::Index rank_ = 0;
  Matrix q_;
};

/// Cached per (d, m); the projector is immutable once built.
template <typename Scalar>
const LieProjector<Scalar>& lie_projector(const BasisPtr& basis) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<LieProjector<Scalar>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{basis->dim(), basis->max_degree()}];
  if (!slot) slot = std::make_unique<LieProjector<Scalar>>(basis);
  return *slot;
}

template <typename S>
S lie_residual(const TruncatedTensor<S>& a) {
  return lie_projector<S>(a.basis()).residual(a);
}

}  // namespace wcub
