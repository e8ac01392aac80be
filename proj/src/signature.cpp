#include "wcub/signature.hpp"

#include <cmath>

namespace wcub {

namespace {

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Letters [pos, end) of the word still to place; segments [seg, n) left.
double splittings(const PiecewiseLinearPath& w, const std::vector<int>& letters, std::size_t pos, std::size_t seg) {
  const std::size_t n = w.segments();
  const std::size_t remaining = letters.size() - pos;
  if (seg + 1 == n) {
    // All remaining letters go to the last segment.
    const double dt = w.segment_length(seg);
    double term = 1.0;
    for (std::size_t k = 0; k < remaining; ++k)
      term *= dt * w.slopes()(letters[pos + k], static_cast<Eigen::Index>(seg)) / static_cast<double>(k + 1);
    return term;
  }
  double total = 0.0;
  const double dt = w.segment_length(seg);
  double block = 1.0;  // dt^c / c! * prod of slopes for the first c letters
  for (std::size_t c = 0; c <= remaining; ++c) {
    if (c > 0)
      block *= dt * w.slopes()(letters[pos + c - 1], static_cast<Eigen::Index>(seg)) / static_cast<double>(c);
    total += block * splittings(w, letters, pos + c, seg + 1);
  }
  return total;
}

}  // namespace

TruncatedTensor<double> signature_bruteforce(const PiecewiseLinearPath& w, const BasisPtr& basis) {
  if (w.dim() != basis->dim()) throw std::invalid_argument("signature_bruteforce: path and basis dimensions differ");
  const std::size_t n = w.segments();
  std::size_t longest = 0;
  for (const auto& word : basis->words()) longest = std::max(longest, word.length());
  if (binomial(longest + n - 1, n - 1) > static_cast<double>(kMaxSplittings))
    throw std::invalid_argument("signature_bruteforce: too many segment splittings to enumerate");
  TruncatedTensor<double> out(basis);
  for (std::size_t i = 0; i < basis->size(); ++i) out[i] = splittings(w, (*basis)[i].letters(), 0, 0);
  return out;
}

}  // namespace wcub
