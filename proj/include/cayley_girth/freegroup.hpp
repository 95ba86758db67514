#pragma once

// Words in the free group F_d on generators a, b, c, ...
//
// Text format: lowercase letter = generator, uppercase = its inverse, so
// "abAB" is the commutator a b a^-1 b^-1. A string is read as a product in
// the usual algebraic way, and words act on points from the left: the
// rightmost letter is applied first. For w = "abAbaB" the first letter to
// act is B and the last is a. `Word::applied(j)` gives the j-th letter in
// application order (1-based) so callers never have to reverse by hand.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cayley_girth/errors.hpp"

namespace cayley_girth {

inline constexpr int kMaxRank = 26;
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct Letter {
  int generator = 1;  // 1-based
  bool inverted = false;

  constexpr Letter inverse() const noexcept { return {generator, !inverted}; }

  // a < A < b < B < ...
  friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
};

inline char to_char(Letter l) {
  const char base = l.inverted ? 'A' : 'a';
  return static_cast<char>(base + l.generator - 1);
}

inline Letter letter_from_char(char ch) {
  if (ch >= 'a' && ch <= 'z') return {ch - 'a' + 1, false};
  if (ch >= 'A' && ch <= 'Z') return {ch - 'A' + 1, true};
  throw InvalidInput(std::string("invalid letter '") + ch +
                     "' (expected a-z or A-Z)");
}

inline std::vector<Letter> parse_letters(std::string_view text) {
  std::vector<Letter> out;
  out.reserve(text.size());
  for (char ch : text) out.push_back(letter_from_char(ch));
  return out;
}

inline void check_rank(int d) {
  if (d < 1 || d > kMaxRank) {
    throw InvalidParameters("rank d must lie in [1, 26], got " +
                            std::to_string(d));
  }
}

/// A freely reduced word of F_d.
class Word {
 public:
  explicit Word(int rank = 1) : rank_(rank) { check_rank(rank); }

  /// Wraps letters that are already reduced; throws InvalidInput otherwise.
  static Word from_reduced(std::vector<Letter> letters, int rank) {
    Word w(rank);
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (letters[i].generator < 1 || letters[i].generator > rank) {
        throw InvalidInput("generator index out of range for rank " +
                           std::to_string(rank));
      }
      if (i > 0 && letters[i] == letters[i - 1].inverse()) {
        throw InvalidInput("word is not freely reduced");
      }
    }
    w.letters_ = std::move(letters);
    return w;
  }

  /// Parses and freely reduces. rank 0 means "smallest rank that fits".
  static Word parse(std::string_view text, int rank = 0);

  int rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return letters_.size(); }
  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }

  /// Letters in written order (leftmost first).
  std::span<const Letter> letters() const noexcept { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }

  /// w_j: the j-th letter to act on a point, 1 <= j <= length().
  Letter applied(std::size_t j) const { return letters_[letters_.size() - j]; }

  /// Letters in application order, w_1 first.
  std::vector<Letter> application_order() const {
    return {letters_.rbegin(), letters_.rend()};
  }

  Word inverse() const {
    Word w(rank_);
    w.letters_.reserve(letters_.size());
    for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) {
      w.letters_.push_back(it->inverse());
    }
    return w;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(letters_.size());
    for (Letter l : letters_) s.push_back(to_char(l));
    return s;
  }

  bool operator==(const Word& o) const noexcept {
    return letters_ == o.letters_;
  }

  /// Length first, then lexicographic with a < A < b < B < ...
  friend bool shortlex_less(const Word& x, const Word& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    return x.letters_ < y.letters_;
  }

 private:
  int rank_;
  std::vector<Letter> letters_;
};

/// Free reduction of an arbitrary letter sequence.
inline Word reduce(std::span<const Letter> raw, int d) {
  check_rank(d);
  std::vector<Letter> stack;
  stack.reserve(raw.size());
  for (Letter l : raw) {
    if (l.generator < 1 || l.generator > d) {
      throw InvalidInput("generator index " + std::to_string(l.generator) +
                         " out of range for rank " + std::to_string(d));
    }
    if (!stack.empty() && stack.back() == l.inverse()) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  return Word::from_reduced(std::move(stack), d);
}

inline Word Word::parse(std::string_view text, int rank) {
  auto raw = parse_letters(text);
  if (rank == 0) {
    rank = 1;
    for (Letter l : raw) rank = std::max(rank, l.generator);
  }
  return reduce(raw, rank);
}

/// Product u·v, freely reduced.
inline Word multiply(const Word& u, const Word& v) {
  std::vector<Letter> raw(u.letters().begin(), u.letters().end());
  raw.insert(raw.end(), v.letters().begin(), v.letters().end());
  return reduce(raw, std::max(u.rank(), v.rank()));
}

inline bool is_cyclically_reduced(const Word& w) {
  return w.size() < 2 || w[0] != w[w.size() - 1].inverse();
}

struct CyclicReduction {
  Word core;
  Word conjugator;  // w = conjugator · core · conjugator^-1
};

inline CyclicReduction cyclically_reduce(const Word& w) {
  const auto letters = w.letters();
  std::size_t lo = 0;
  std::size_t hi = letters.size();
  while (hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  return {
      Word::from_reduced({letters.begin() + lo, letters.begin() + hi}, w.rank()),
      Word::from_reduced({letters.begin(), letters.begin() + lo}, w.rank()),
  };
}

/// Number of nontrivial reduced words of length 1..k:
/// sum_j 2d (2d-1)^(j-1). Throws std::overflow_error past 2^64.
inline std::uint64_t count_reduced(int d, int k) {
  if (d < 1) throw InvalidParameters("d must be >= 1");
  if (k < 0) throw InvalidParameters("k must be >= 0");
  std::uint64_t total = 0;
  std::uint64_t level = 2 * static_cast<std::uint64_t>(d);
  const std::uint64_t branch = 2 * static_cast<std::uint64_t>(d) - 1;
  for (int j = 1; j <= k; ++j) {
    if (__builtin_add_overflow(total, level, &total)) {
      throw std::overflow_error("count_reduced overflows 64 bits");
    }
    if (j < k && __builtin_mul_overflow(level, branch, &level)) {
      throw std::overflow_error("count_reduced overflows 64 bits");
    }
  }
  return total;
}

namespace detail {

template <typename Fn>
void extend_reduced(std::vector<Letter>& prefix, std::size_t target, int d,
                    Fn& fn) {
  if (prefix.size() == target) {
    fn(Word::from_reduced(prefix, d));
    return;
  }
  for (int g = 1; g <= d; ++g) {
    for (bool inv : {false, true}) {
      const Letter l{g, inv};
      if (!prefix.empty() && prefix.back() == l.inverse()) continue;
      prefix.push_back(l);
      extend_reduced(prefix, target, d, fn);
      prefix.pop_back();
    }
  }
}

}  // namespace detail

/// Streams every nontrivial reduced word of length 1..k to `fn`, ordered by
/// length and then lexicographically (a < A < b < B < ...).
template <typename Fn>
void for_each_reduced(int d, int k, Fn&& fn,
                      std::uint64_t cap = kDefaultEnumerationCap) {
  check_rank(d);
  if (k < 0) throw InvalidParameters("k must be >= 0");
  std::uint64_t total = 0;
  try {
    total = count_reduced(d, k);
  } catch (const std::overflow_error&) {
    throw EnumerationTooLarge("enumeration size overflows 64 bits");
  }
  if (total > cap) {
    throw EnumerationTooLarge("enumeration of " + std::to_string(total) +
                              " words exceeds cap " + std::to_string(cap));
  }
  std::vector<Letter> prefix;
  prefix.reserve(static_cast<std::size_t>(k));
  for (int len = 1; len <= k; ++len) {
    detail::extend_reduced(prefix, static_cast<std::size_t>(len), d, fn);
  }
}

inline std::vector<Word> enumerate_reduced(
    int d, int k, std::uint64_t cap = kDefaultEnumerationCap) {
  std::vector<Word> out;
  for_each_reduced(d, k, [&](Word w) { out.push_back(std::move(w)); }, cap);
  return out;
}

/// Least word among all cyclic rotations of w and of w^-1. Two cyclically
/// reduced words share a representative iff one is a rotation of the other
/// or of its inverse.
inline Word canonical_representative(const Word& w) {
  if (!is_cyclically_reduced(w)) {
    throw InvalidInput("canonical_representative needs a cyclically reduced word");
  }
  if (w.empty()) return w;
  const std::size_t k = w.size();
  std::vector<Letter> best(w.letters().begin(), w.letters().end());
  std::vector<Letter> candidate(k);
  for (const Word& base : {w, w.inverse()}) {
    const auto src = base.letters();
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t i = 0; i < k; ++i) candidate[i] = src[(r + i) % k];
      if (candidate < best) best = candidate;
    }
  }
  return Word::from_reduced(std::move(best), w.rank());
}

}  // namespace cayley_girth
