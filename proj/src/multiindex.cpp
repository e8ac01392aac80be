#include "wcub/multiindex.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace wcub {

int Multiindex::degree() const {
  int deg = static_cast<int>(letters_.size());
  for (int l : letters_)
    if (l == 0) ++deg;
  return deg;
}

int Multiindex::max_letter() const {
  int out = -1;
  for (int l : letters_) out = std::max(out, l);
  return out;
}

std::string Multiindex::to_string() const {
  std::string out = "(";
  for (std::size_t k = 0; k < letters_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(letters_[k]);
  }
  out += ')';
  return out;
}

Multiindex Multiindex::parse(std::string_view text) {
  auto bad = [&] { return std::invalid_argument("malformed multiindex: '" + std::string(text) + "'"); };
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  skip_ws();
  if (pos >= text.size() || text[pos] != '(') throw bad();
  ++pos;
  std::vector<int> letters;
  skip_ws();
  if (pos < text.size() && text[pos] == ')') {
    ++pos;
  } else {
    for (;;) {
      skip_ws();
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (start == pos) throw bad();
      letters.push_back(std::stoi(std::string(text.substr(start, pos - start))));
      skip_ws();
      if (pos >= text.size()) throw bad();
      if (text[pos] == ')') { ++pos; break; }
      if (text[pos] != ',') throw bad();
      ++pos;
    }
  }
  skip_ws();
  if (pos != text.size()) throw bad();
  return Multiindex(std::move(letters));
}

Multiindex operator*(const Multiindex& a, const Multiindex& b) {
  std::vector<int> letters = a.letters();
  letters.insert(letters.end(), b.letters().begin(), b.letters().end());
  return Multiindex(std::move(letters));
}

namespace {

void shuffle_into(const std::vector<int>& a, std::size_t i, const std::vector<int>& b, std::size_t j,
                  std::vector<int>& prefix, std::vector<Multiindex>& out) {
  if (i == a.size() && j == b.size()) {
    out.emplace_back(prefix);
    return;
  }
  if (i < a.size()) {
    prefix.push_back(a[i]);
    shuffle_into(a, i + 1, b, j, prefix, out);
    prefix.pop_back();
  }
  if (j < b.size()) {
    prefix.push_back(b[j]);
    shuffle_into(a, i, b, j + 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Multiindex> shuffles(const Multiindex& a, const Multiindex& b) {
  if (a.length() + b.length() > kMaxShuffleLength)
    throw std::invalid_argument("shuffles: combined length exceeds enumeration guard");
  std::vector<Multiindex> out;
  std::vector<int> prefix;
  shuffle_into(a.letters(), 0, b.letters(), 0, prefix, out);
  return out;
}

bool canonical_less(const Multiindex& a, const Multiindex& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da < db;
  return a.letters() < b.letters();
}

MultiindexBasis::MultiindexBasis(int d, int m) : d_(d), m_(m) {
  if (d < 1) throw std::invalid_argument("enumerate_basis: dimension d must be >= 1");
  if (m < 1) throw std::invalid_argument("enumerate_basis: degree m must be >= 1");

  // Grow words letter by letter; degree only increases, so this terminates.
  std::vector<Multiindex> frontier{Multiindex{}};
  words_.push_back(Multiindex{});
  while (!frontier.empty()) {
    std::vector<Multiindex> next;
    for (const auto& w : frontier) {
      const int deg = w.degree();
      for (int letter = 0; letter <= d; ++letter) {
        const int step = letter == 0 ? 2 : 1;
        if (deg + step > m) continue;
        next.push_back(w * Multiindex{letter});
      }
    }
    words_.insert(words_.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(words_.begin(), words_.end(), canonical_less);

  for (std::size_t i = 0; i < words_.size(); ++i) lookup_.emplace(words_[i], i);

  degrees_.reserve(words_.size());
  parents_.reserve(words_.size());
  split_offsets_.reserve(words_.size() + 1);
  for (const auto& w : words_) {
    degrees_.push_back(w.degree());
    const auto& l = w.letters();
    parents_.push_back(l.empty() ? 0 : lookup_.at(Multiindex(std::vector<int>(l.begin(), l.end() - 1))));
    split_offsets_.push_back(splits_.size());
    for (std::size_t k = 0; k <= l.size(); ++k) {
      Multiindex pre(std::vector<int>(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(k)));
      Multiindex suf(std::vector<int>(l.begin() + static_cast<std::ptrdiff_t>(k), l.end()));
      splits_.push_back({lookup_.at(pre), lookup_.at(suf)});
    }
  }
  split_offsets_.push_back(splits_.size());
}

std::optional<std::size_t> MultiindexBasis::find(const Multiindex& w) const {
  auto it = lookup_.find(w);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t MultiindexBasis::index_of(const Multiindex& w) const {
  auto it = lookup_.find(w);
  if (it == lookup_.end())
    throw std::out_of_range("word " + w.to_string() + " is not in A(" + std::to_string(m_) + ")");
  return it->second;
}

BasisPtr enumerate_basis(int d, int m) { return std::make_shared<const MultiindexBasis>(d, m); }

}  // namespace wcub
