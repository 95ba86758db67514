#pragma once

// Permutations of {1..n} acting on the left, generator tuples, and point
// trajectories of words. Points are 1-based everywhere in the public API.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cayley_girth/errors.hpp"
#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/random.hpp"

namespace cayley_girth {

using Point = std::uint32_t;

class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.images_.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.images_[i] = static_cast<Point>(i + 1);
    return p;
  }

  /// images[i] is the image of point i+1. Throws unless it is a bijection
  /// of {1..n}.
  static Permutation from_images(std::vector<Point> images) {
    std::vector<bool> seen(images.size() + 1, false);
    for (Point y : images) {
      if (y < 1 || y > images.size() || seen[y]) {
        throw InvalidInput("image array is not a permutation of 1.." +
                           std::to_string(images.size()));
      }
      seen[y] = true;
    }
    Permutation p;
    p.images_ = std::move(images);
    return p;
  }

  std::size_t degree() const noexcept { return images_.size(); }

  /// Image of x, range-checked.
  Point image(Point x) const {
    if (x < 1 || x > images_.size()) {
      throw InvalidInput("point " + std::to_string(x) + " outside 1.." +
                         std::to_string(images_.size()));
    }
    return images_[x - 1];
  }

  /// Image of x without range checking.
  Point operator()(Point x) const noexcept { return images_[x - 1]; }

  std::span<const Point> images() const noexcept { return images_; }

  Permutation inverse() const {
    Permutation p;
    p.images_.resize(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
      p.images_[images_[i] - 1] = static_cast<Point>(i + 1);
    }
    return p;
  }

  bool is_identity() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[i] != i + 1) return false;
    }
    return true;
  }

  bool is_involution_or_identity() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[images_[i] - 1] != i + 1) return false;
    }
    return true;
  }

  /// Cycle notation with fixed points omitted; the identity prints as "()".
  std::string to_cycle_string() const {
    std::string out;
    std::vector<bool> done(images_.size(), false);
    for (std::size_t start = 0; start < images_.size(); ++start) {
      if (done[start] || images_[start] == start + 1) continue;
      out += '(';
      std::size_t x = start;
      bool first = true;
      while (!done[x]) {
        done[x] = true;
        if (!first) out += ' ';
        out += std::to_string(x + 1);
        first = false;
        x = images_[x] - 1;
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<Point> images_;
};

/// x ↦ p(q(x)); q acts first.
inline Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.degree() != q.degree()) {
    throw InvalidInput("compose: degree mismatch (" +
                       std::to_string(p.degree()) + " vs " +
                       std::to_string(q.degree()) + ")");
  }
  std::vector<Point> out(p.degree());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p(q(static_cast<Point>(i + 1)));
  return Permutation::from_images(std::move(out));
}

/// Parses cycle notation such as "(1 3)(2 4 5)" on {1..n}. Fixed points may
/// be omitted; commas are accepted as separators; "" and "()" are the
/// identity.
inline Permutation parse_cycles(std::string_view text, std::size_t n) {
  std::vector<Point> images(n);
  for (std::size_t i = 0; i < n; ++i) images[i] = static_cast<Point>(i + 1);
  std::vector<bool> used(n + 1, false);

  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == ',' ||
                                 text[pos] == '\t')) {
      ++pos;
    }
  };
  auto fail = [&](const std::string& why) -> void {
    throw InvalidInput("bad cycle notation '" + std::string(text) + "': " + why);
  };

  skip_space();
  while (pos < text.size()) {
    if (text[pos] != '(') fail("expected '('");
    ++pos;
    std::vector<Point> cycle;
    for (;;) {
      skip_space();
      if (pos >= text.size()) fail("unterminated cycle");
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      if (text[pos] < '0' || text[pos] > '9') fail("expected a point");
      std::uint64_t v = 0;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
        if (v > n) fail("point exceeds n = " + std::to_string(n));
        ++pos;
      }
      if (v < 1) fail("points are 1-based");
      if (used[v]) fail("point " + std::to_string(v) + " repeated");
      used[v] = true;
      cycle.push_back(static_cast<Point>(v));
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      images[cycle[i] - 1] = cycle[(i + 1) % cycle.size()];
    }
    skip_space();
  }
  return Permutation::from_images(std::move(images));
}

/// Uniform over all n! permutations (Fisher-Yates on an unbiased draw).
template <typename Engine>
Permutation random_uniform(std::size_t n, Engine& rng) {
  if (n < 1) throw InvalidParameters("random_uniform needs n >= 1");
  std::vector<Point> images(n);
  for (std::size_t i = 0; i < n; ++i) images[i] = static_cast<Point>(i + 1);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i + 1));
    std::swap(images[i], images[j]);
  }
  return Permutation::from_images(std::move(images));
}

/// The generators π_1..π_d of a Cayley graph, with inverses cached.
class GeneratorTuple {
 public:
  GeneratorTuple() = default;

  explicit GeneratorTuple(std::vector<Permutation> perms)
      : perms_(std::move(perms)) {
    if (perms_.empty()) throw InvalidInput("generator tuple must be nonempty");
    for (const auto& p : perms_) {
      if (p.degree() != perms_.front().degree()) {
        throw InvalidInput("generators act on different degrees");
      }
    }
    inverses_.reserve(perms_.size());
    for (const auto& p : perms_) inverses_.push_back(p.inverse());
  }

  std::size_t n() const noexcept {
    return perms_.empty() ? 0 : perms_.front().degree();
  }
  int d() const noexcept { return static_cast<int>(perms_.size()); }

  const Permutation& generator(int index) const { return perms_.at(index - 1); }
  std::span<const Permutation> generators() const noexcept { return perms_; }

  /// The permutation a letter stands for (π_i or π_i^-1).
  const Permutation& operator[](Letter l) const {
    return l.inverted ? inverses_[l.generator - 1] : perms_[l.generator - 1];
  }

  Point act(Letter l, Point x) const noexcept { return (*this)[l](x); }

  bool operator==(const GeneratorTuple& o) const { return perms_ == o.perms_; }

 private:
  std::vector<Permutation> perms_;
  std::vector<Permutation> inverses_;
};

template <typename Engine>
GeneratorTuple random_tuple(std::size_t n, int d, Engine& rng) {
  std::vector<Permutation> perms;
  perms.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) perms.push_back(random_uniform(n, rng));
  return GeneratorTuple(std::move(perms));
}

inline void check_word_fits(const Word& w, const GeneratorTuple& t) {
  if (w.rank() > t.d()) {
    throw InvalidInput("word of rank " + std::to_string(w.rank()) +
                       " needs at least that many generators, tuple has " +
                       std::to_string(t.d()));
  }
}

/// w(π_1..π_d). eval(u·v) = eval(u) ∘ eval(v); the empty word gives the
/// identity.
inline Permutation evaluate_word(const Word& w, const GeneratorTuple& t) {
  check_word_fits(w, t);
  const std::size_t n = t.n();
  std::vector<Point> images(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point x = static_cast<Point>(i + 1);
    for (std::size_t j = 1; j <= w.size(); ++j) x = t.act(w.applied(j), x);
    images[i] = x;
  }
  return Permutation::from_images(std::move(images));
}

/// True iff w(π) fixes every point. Stops at the first moved point.
inline bool word_is_identity(const Word& w, const GeneratorTuple& t) {
  check_word_fits(w, t);
  const auto order = w.application_order();
  for (Point x0 = 1; x0 <= t.n(); ++x0) {
    Point x = x0;
    for (Letter l : order) x = t.act(l, x);
    if (x != x0) return false;
  }
  return true;
}

/// Point sequence x^0..x^k of a word acting letter by letter.
struct Trajectory {
  std::vector<Point> points;    // k + 1 entries
  std::vector<Letter> letters;  // application order: letters[j-1] = w_j
  // Exposure runs only: revealed[j-1] is true when step j drew a fresh
  // value. Empty for trajectories computed from a full tuple.
  std::vector<bool> revealed;

  std::size_t steps() const noexcept { return letters.size(); }

  bool injective() const {
    std::vector<Point> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  }

  bool returned() const { return points.back() == points.front(); }
};

inline Trajectory trajectory(const Word& w, const GeneratorTuple& t, Point x) {
  check_word_fits(w, t);
  if (x < 1 || x > t.n()) {
    throw InvalidInput("start point " + std::to_string(x) + " outside 1.." +
                       std::to_string(t.n()));
  }
  Trajectory tr;
  tr.letters = w.application_order();
  tr.points.reserve(w.size() + 1);
  tr.points.push_back(x);
  for (Letter l : tr.letters) tr.points.push_back(t.act(l, tr.points.back()));
  return tr;
}

}  // namespace cayley_girth
