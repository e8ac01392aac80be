#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wcub {

/// A word over the alphabet {0, 1, ..., d}. Letter 0 is the time direction.
class Multiindex {
public:
  Multiindex() = default;
  Multiindex(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Multiindex(std::vector<int> letters) : letters_(std::move(letters)) {}

  /// Number of letters, |a|.
  std::size_t length() const { return letters_.size(); }
  /// Graded degree: length plus the number of zero letters.
  int degree() const;
  bool empty() const { return letters_.empty(); }

  int operator[](std::size_t k) const { return letters_[k]; }
  const std::vector<int>& letters() const { return letters_; }

  /// Largest letter, or -1 for the empty word.
  int max_letter() const;

  /// Textual form "(1,0,2)"; the empty word is "()".
  std::string to_string() const;
  static Multiindex parse(std::string_view text);

  auto operator<=>(const Multiindex&) const = default;

private:
  std::vector<int> letters_;
};

/// Concatenation a*b.
Multiindex operator*(const Multiindex& a, const Multiindex& b);

/// All order-preserving interleavings of a and b, with multiplicity.
/// Throws std::invalid_argument when |a| + |b| exceeds kMaxShuffleLength.
std::vector<Multiindex> shuffles(const Multiindex& a, const Multiindex& b);
inline constexpr std::size_t kMaxShuffleLength = 12;

/// Canonical ordering: by graded degree, then lexicographically.
bool canonical_less(const Multiindex& a, const Multiindex& b);

/**
 * @brief The set A(m) of words with graded degree at most m over {0,...,d}.
 *
 * Words are stored in canonical order with the empty word at position 0.
 * The set is closed under prefixes and suffixes, so every split of a member
 * is again a member; those splits are tabulated once and drive the
 * truncated tensor product.
 */
class MultiindexBasis {
public:
  struct Split {
    std::size_t prefix;
    std::size_t suffix;
  };

  MultiindexBasis(int d, int m);

  int dim() const { return d_; }
  int max_degree() const { return m_; }
  std::size_t size() const { return words_.size(); }

  const Multiindex& operator[](std::size_t i) const { return words_[i]; }
  const std::vector<Multiindex>& words() const { return words_; }

  std::optional<std::size_t> find(const Multiindex& w) const;
  /// Throws std::out_of_range when w is not in the basis.
  std::size_t index_of(const Multiindex& w) const;

  int degree(std::size_t i) const { return degrees_[i]; }
  std::size_t length(std::size_t i) const { return words_[i].length(); }
  /// Index of the word with its last letter removed (undefined at 0).
  std::size_t parent(std::size_t i) const { return parents_[i]; }
  int last_letter(std::size_t i) const { return words_[i][words_[i].length() - 1]; }

  /// Every (prefix, suffix) pair whose concatenation is word i, prefix
  /// length ascending from the empty prefix.
  std::span<const Split> splits(std::size_t i) const {
    return {splits_.data() + split_offsets_[i], splits_.data() + split_offsets_[i + 1]};
  }

  /// Positions of the words satisfying pred, in canonical order.
  template <typename Pred>
  std::vector<std::size_t> indices_where(Pred pred) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (pred(words_[i])) out.push_back(i);
    return out;
  }

  bool same_shape(const MultiindexBasis& other) const {
    return d_ == other.d_ && m_ == other.m_;
  }

private:
  int d_;
  int m_;
  std::vector<Multiindex> words_;
  std::vector<int> degrees_;
  std::vector<std::size_t> parents_;
  std::vector<Split> splits_;
  std::vector<std::size_t> split_offsets_;
  std::map<Multiindex, std::size_t> lookup_;
};

using BasisPtr = std::shared_ptr<const MultiindexBasis>;

/// Builds A(m) for the given dimension. Rejects d < 1 or m < 1.
BasisPtr enumerate_basis(int d, int m);

}  // namespace wcub
