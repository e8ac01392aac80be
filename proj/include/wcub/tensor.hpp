#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wcub/multiindex.hpp"

namespace wcub {

/**
 * @brief Element of the truncated tensor algebra over A(m).
 *
 * Dense coefficient vector indexed by the canonical order of the basis.
 * Words beyond degree m simply do not exist in the basis, so every
 * product is truncated by construction.
 */
template <typename Scalar = double>
class TruncatedTensor {
public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit TruncatedTensor(BasisPtr basis)
      : basis_(std::move(basis)), coeffs_(Vector::Zero(static_cast<Eigen::Index>(basis_->size()))) {}

  TruncatedTensor(BasisPtr basis, Vector coeffs) : basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != static_cast<Eigen::Index>(basis_->size()))
      throw std::invalid_argument("TruncatedTensor: coefficient vector length does not match basis");
  }

  static TruncatedTensor unit(BasisPtr basis) {
    TruncatedTensor out(std::move(basis));
    out.coeffs_[0] = Scalar(1);
    return out;
  }

  /// The degree-one generator Z_i.
  static TruncatedTensor generator(BasisPtr basis, int letter) {
    TruncatedTensor out(basis);
    if (auto pos = basis->find(Multiindex{letter})) out.coeffs_[static_cast<Eigen::Index>(*pos)] = Scalar(1);
    return out;
  }

  const BasisPtr& basis() const { return basis_; }
  const Vector& coeffs() const { return coeffs_; }
  Vector& coeffs() { return coeffs_; }
  Eigen::Index size() const { return coeffs_.size(); }

  Scalar operator[](std::size_t i) const { return coeffs_[static_cast<Eigen::Index>(i)]; }
  Scalar& operator[](std::size_t i) { return coeffs_[static_cast<Eigen::Index>(i)]; }

  /// Coefficient of w; zero when w lies outside the truncation.
  Scalar at(const Multiindex& w) const {
    auto pos = basis_->find(w);
    return pos ? coeffs_[static_cast<Eigen::Index>(*pos)] : Scalar(0);
  }

  Scalar constant() const { return coeffs_[0]; }

  TruncatedTensor& operator+=(const TruncatedTensor& o) {
    check_same_basis(o);
    coeffs_ += o.coeffs_;
    return *this;
  }
  TruncatedTensor& operator-=(const TruncatedTensor& o) {
    check_same_basis(o);
    coeffs_ -= o.coeffs_;
    return *this;
  }
  TruncatedTensor& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

  void check_same_basis(const TruncatedTensor& o) const {
    if (basis_ != o.basis_ && !basis_->same_shape(*o.basis_))
      throw std::invalid_argument("TruncatedTensor: basis mismatch");
  }

private:
  BasisPtr basis_;
  Vector coeffs_;
};

template <typename S>
TruncatedTensor<S> operator+(TruncatedTensor<S> a, const TruncatedTensor<S>& b) { return a += b; }
template <typename S>
TruncatedTensor<S> operator-(TruncatedTensor<S> a, const TruncatedTensor<S>& b) { return a -= b; }
template <typename S>
TruncatedTensor<S> operator-(TruncatedTensor<S> a) { return a *= S(-1); }
template <typename S>
TruncatedTensor<S> operator*(S s, TruncatedTensor<S> a) { return a *= s; }
template <typename S>
TruncatedTensor<S> operator*(TruncatedTensor<S> a, S s) { return a *= s; }

/// Truncated tensor product: (a b)[g] = sum over splits g = p*q of a[p] b[q].
template <typename S>
TruncatedTensor<S> mul(const TruncatedTensor<S>& a, const TruncatedTensor<S>& b) {
  a.check_same_basis(b);
  const auto& basis = *a.basis();
  TruncatedTensor<S> out(a.basis());
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  for (std::size_t g = 0; g < basis.size(); ++g) {
    S acc(0);
    for (const auto& sp : basis.splits(g))
      acc += x[static_cast<Eigen::Index>(sp.prefix)] * y[static_cast<Eigen::Index>(sp.suffix)];
    out[g] = acc;
  }
  return out;
}

template <typename S>
TruncatedTensor<S> operator*(const TruncatedTensor<S>& a, const TruncatedTensor<S>& b) { return mul(a, b); }

/// Lie bracket [a, b] = ab - ba.
template <typename S>
TruncatedTensor<S> bracket(const TruncatedTensor<S>& a, const TruncatedTensor<S>& b) {
  return mul(a, b) - mul(b, a);
}

namespace detail {

/// Number of nilpotent factors after which every product vanishes.
inline int nilpotency(const MultiindexBasis& basis) { return basis.max_degree(); }

template <typename S>
void require_nilpotent(const TruncatedTensor<S>& a, const char* what) {
  if (a.constant() != S(0)) throw std::invalid_argument(std::string(what) + ": constant term must be zero");
}

}  // namespace detail

/// Truncated exponential of a nilpotent element, by Horner's scheme
/// 1 + a(1 + a/2(1 + a/3(...))).
template <typename S>
TruncatedTensor<S> exp(const TruncatedTensor<S>& a) {
  detail::require_nilpotent(a, "exp");
  const auto unit = TruncatedTensor<S>::unit(a.basis());
  auto acc = unit;
  for (int k = detail::nilpotency(*a.basis()); k >= 1; --k) {
    acc = mul(a, acc);
    acc *= S(1) / S(k);
    acc += unit;
  }
  return acc;
}

/// Logarithm for a[empty] > 0: log a0 + log(1 + y) with y = a/a0 - 1.
template <typename S>
TruncatedTensor<S> log(const TruncatedTensor<S>& a) {
  using std::log;
  const S a0 = a.constant();
  if (!(a0 > S(0))) throw std::invalid_argument("log: constant term must be positive");
  auto y = a * (S(1) / a0);
  y[0] = S(0);
  const auto unit = TruncatedTensor<S>::unit(a.basis());
  // log(1+y) = y (1 - y (1/2 - y (1/3 - ...)))
  const int n = detail::nilpotency(*a.basis());
  auto acc = unit * (S(1) / S(n));
  for (int k = n - 1; k >= 1; --k) acc = unit * (S(1) / S(k)) - mul(y, acc);
  auto out = mul(y, acc);
  out[0] = log(a0);
  return out;
}

/// Multiplicative inverse for a[empty] != 0: (1/a0) sum_k (-y)^k.
template <typename S>
TruncatedTensor<S> inverse(const TruncatedTensor<S>& a) {
  const S a0 = a.constant();
  if (a0 == S(0)) throw std::invalid_argument("inverse: constant term must be nonzero");
  auto y = a * (S(1) / a0);
  y[0] = S(0);
  const auto unit = TruncatedTensor<S>::unit(a.basis());
  auto acc = unit;
  for (int k = detail::nilpotency(*a.basis()); k >= 1; --k) acc = unit - mul(y, acc);
  return acc * (S(1) / a0);
}

/// Zeroes every coefficient of degree above n.
template <typename S>
TruncatedTensor<S> project(const TruncatedTensor<S>& a, int n) {
  const auto& basis = *a.basis();
  if (n < 0 || n > basis.max_degree()) throw std::invalid_argument("project: level out of range");
  auto out = a;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis.degree(i) > n) out[i] = S(0);
  return out;
}

}  // namespace wcub
