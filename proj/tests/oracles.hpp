#pragma once

// Brute-force reference implementations used only by tests. They avoid the
// library's evaluation, search, and revelation code paths on purpose.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/perm.hpp"
#include "cayley_girth/rational.hpp"

namespace oracle {

using cayley_girth::GeneratorTuple;
using cayley_girth::Permutation;
using cayley_girth::Point;
using cayley_girth::Rational;

using Row = std::vector<int>;  // 0-based images

inline std::vector<Row> symmetric_group(int n) {
  Row r(n);
  for (int i = 0; i < n; ++i) r[i] = i;
  std::vector<Row> out;
  do out.push_back(r);
  while (std::next_permutation(r.begin(), r.end()));
  return out;
}

inline Row invert(const Row& p) {
  Row q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

// Product of the letters' permutations, built as a right fold
// w = s_1 (s_2 (... s_k)) with explicit composition.
inline Row evaluate(const std::string& word, const std::vector<Row>& gens) {
  const int n = static_cast<int>(gens.front().size());
  Row acc(n);
  for (int i = 0; i < n; ++i) acc[i] = i;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const char ch = *it;
    const int g = (ch >= 'a' ? ch - 'a' : ch - 'A');
    const Row p = ch >= 'a' ? gens[g] : invert(gens[g]);
    Row next(n);
    for (int x = 0; x < n; ++x) next[x] = p[acc[x]];
    acc = next;
  }
  return acc;
}

inline bool is_identity(const Row& r) {
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] != static_cast<int>(i)) return false;
  }
  return true;
}

inline Rational word_probability(const std::string& word, int n, int d) {
  const auto group = symmetric_group(n);
  std::int64_t hits = 0;
  std::int64_t total = 0;
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    std::vector<Row> gens;
    for (int g = 0; g < d; ++g) gens.push_back(group[idx[g]]);
    ++total;
    if (is_identity(evaluate(word, gens))) ++hits;
    int g = d - 1;
    while (g >= 0 && ++idx[g] == group.size()) idx[g--] = 0;
    if (g < 0) break;
  }
  return Rational(hits, total);
}

// All strings over {a, A, b, B, ...} of exact length `len`, no filtering.
inline std::vector<std::string> all_strings(int d, int len) {
  std::string alphabet;
  for (int g = 0; g < d; ++g) {
    alphabet.push_back(static_cast<char>('a' + g));
    alphabet.push_back(static_cast<char>('A' + g));
  }
  std::vector<std::string> out{""};
  for (int i = 0; i < len; ++i) {
    std::vector<std::string> next;
    for (const auto& s : out) {
      for (char c : alphabet) next.push_back(s + c);
    }
    out = std::move(next);
  }
  return out;
}

inline bool is_reduced_string(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] != s[i - 1] && std::tolower(s[i]) == std::tolower(s[i - 1])) {
      return false;
    }
  }
  return true;
}

inline std::vector<std::string> reduced_strings(int d, int len) {
  std::vector<std::string> out;
  for (auto& s : all_strings(d, len)) {
    if (is_reduced_string(s)) out.push_back(s);
  }
  return out;
}

inline std::vector<Row> rows_of(const GeneratorTuple& t) {
  std::vector<Row> out;
  for (const auto& p : t.generators()) {
    Row r;
    for (Point y : p.images()) r.push_back(static_cast<int>(y) - 1);
    out.push_back(r);
  }
  return out;
}

inline GeneratorTuple tuple_of(const std::vector<Row>& rows) {
  std::vector<Permutation> perms;
  for (const auto& r : rows) {
    std::vector<Point> images;
    for (int y : r) images.push_back(static_cast<Point>(y + 1));
    perms.push_back(Permutation::from_images(images));
  }
  return GeneratorTuple(perms);
}

// Shortest nontrivial reduced word evaluating to the identity, by
// exhaustive enumeration up to max_len; 0 if none.
inline bool any_relator_of_length(std::string& prefix, int len, const std::string& alphabet,
                                  const std::vector<Row>& gens) {
  if (static_cast<int>(prefix.size()) == len) return is_identity(evaluate(prefix, gens));
  for (char c : alphabet) {
    if (!prefix.empty() && c != prefix.back() &&
        std::tolower(c) == std::tolower(prefix.back())) {
      continue;
    }
    prefix.push_back(c);
    const bool hit = any_relator_of_length(prefix, len, alphabet, gens);
    prefix.pop_back();
    if (hit) return true;
  }
  return false;
}

inline int shortest_relator_length(const GeneratorTuple& t, int max_len) {
  const auto gens = rows_of(t);
  std::string alphabet;
  for (int g = 0; g < t.d(); ++g) {
    alphabet.push_back(static_cast<char>('a' + g));
    alphabet.push_back(static_cast<char>('A' + g));
  }
  for (int len = 1; len <= max_len; ++len) {
    std::string prefix;
    if (any_relator_of_length(prefix, len, alphabet, gens)) return len;
  }
  return 0;
}

// Law of the trajectory x^0..x^k over all tuples (exact).
inline std::map<std::vector<Point>, Rational> enumerated_trajectory_distribution(
    const std::string& word, int n, int d, Point x) {
  const auto group = symmetric_group(n);
  std::map<std::vector<Point>, std::int64_t> counts;
  std::int64_t total = 0;
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    std::vector<Row> gens;
    for (int g = 0; g < d; ++g) gens.push_back(group[idx[g]]);
    std::vector<Point> pts{x};
    int cur = static_cast<int>(x) - 1;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      const char ch = *it;
      const int g = ch >= 'a' ? ch - 'a' : ch - 'A';
      cur = ch >= 'a' ? gens[g][cur] : invert(gens[g])[cur];
      pts.push_back(static_cast<Point>(cur + 1));
    }
    ++counts[pts];
    ++total;
    int g = d - 1;
    while (g >= 0 && ++idx[g] == group.size()) idx[g--] = 0;
    if (g < 0) break;
  }
  std::map<std::vector<Point>, Rational> out;
  for (const auto& [k, c] : counts) out[k] = Rational(c, total);
  return out;
}

}  // namespace oracle
