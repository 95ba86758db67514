#pragma once

// Lazy revelation of random generators: each π_i is uncovered one image at a
// time, each new image uniform over the targets still consistent with what
// has been seen. Along with it, exact and Monte Carlo computation of
// P_{S_n}(w), the probability that w(π_1..π_d) = 1.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cayley_girth/errors.hpp"
#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/parallel.hpp"
#include "cayley_girth/perm.hpp"
#include "cayley_girth/random.hpp"
#include "cayley_girth/rational.hpp"

namespace cayley_girth {

inline constexpr std::uint64_t kDefaultTupleCap = 10'000'000;
inline constexpr std::uint64_t kTrialBlock = 4096;
inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Partial injections π_i restricted to the values revealed so far, kept
/// in both directions.
class PartialGenerators {
 public:
  PartialGenerators(std::size_t n, int d)
      : n_(n),
        d_(d),
        forward_(static_cast<std::size_t>(d) * (n + 1), 0),
        backward_(static_cast<std::size_t>(d) * (n + 1), 0),
        revealed_(static_cast<std::size_t>(d), 0) {
    if (n < 1) throw InvalidParameters("PartialGenerators needs n >= 1");
    check_rank(d);
  }

  std::size_t n() const noexcept { return n_; }
  int d() const noexcept { return d_; }

  /// The image of x under the letter's permutation, if already revealed.
  std::optional<Point> lookup(Letter l, Point x) const {
    const Point y = l.inverted ? backward(l.generator, x) : forward(l.generator, x);
    if (y == 0) return std::nullopt;
    return y;
  }

  /// Records π_gen(x) = y. Re-revealing an identical pair is a no-op; any
  /// conflict with earlier revelations throws InvalidInput.
  void reveal(int gen, Point x, Point y) {
    check_point(x);
    check_point(y);
    if (gen < 1 || gen > d_) throw InvalidInput("generator index out of range");
    const Point fx = forward(gen, x);
    const Point by = backward(gen, y);
    if (fx == y && by == x) return;
    if (fx != 0 || by != 0) {
      throw InvalidInput("revelation conflicts with the partial permutation");
    }
    forward_[slot(gen, x)] = y;
    backward_[slot(gen, y)] = x;
    ++revealed_[gen - 1];
    touched_.emplace_back(gen, x);
  }

  /// Revealing `l` at x maps to y: for an inverted letter this records
  /// π(y) = x.
  void reveal_step(Letter l, Point x, Point y) {
    if (l.inverted) {
      reveal(l.generator, y, x);
    } else {
      reveal(l.generator, x, y);
    }
  }

  std::size_t revealed_count(int gen) const { return revealed_.at(gen - 1); }

  /// Targets still available to a fresh draw of `l`: unused images for a
  /// forward letter, unused preimages for an inverted one.
  std::vector<Point> available_targets(Letter l) const {
    std::vector<Point> out;
    out.reserve(n_ - revealed_[l.generator - 1]);
    for (Point y = 1; y <= n_; ++y) {
      const Point taken =
          l.inverted ? forward(l.generator, y) : backward(l.generator, y);
      if (taken == 0) out.push_back(y);
    }
    return out;
  }

  bool is_available(Letter l, Point y) const {
    return (l.inverted ? forward(l.generator, y) : backward(l.generator, y)) == 0;
  }

  /// Forget everything revealed, in time proportional to what was revealed.
  void reset() {
    for (auto [gen, x] : touched_) {
      const Point y = forward_[slot(gen, x)];
      forward_[slot(gen, x)] = 0;
      backward_[slot(gen, y)] = 0;
    }
    touched_.clear();
    std::fill(revealed_.begin(), revealed_.end(), 0);
  }

  /// Revealed pairs (gen, x, π_gen(x)) in the order they were revealed.
  std::vector<std::tuple<int, Point, Point>> revealed_pairs() const {
    std::vector<std::tuple<int, Point, Point>> out;
    out.reserve(touched_.size());
    for (auto [gen, x] : touched_) out.emplace_back(gen, x, forward(gen, x));
    return out;
  }

 private:
  std::size_t slot(int gen, Point x) const {
    return static_cast<std::size_t>(gen - 1) * (n_ + 1) + x;
  }
  Point forward(int gen, Point x) const { return forward_[slot(gen, x)]; }
  Point backward(int gen, Point y) const { return backward_[slot(gen, y)]; }
  void check_point(Point x) const {
    if (x < 1 || x > n_) {
      throw InvalidInput("point " + std::to_string(x) + " outside 1.." +
                         std::to_string(n_));
    }
  }

  std::size_t n_;
  int d_;
  std::vector<Point> forward_;
  std::vector<Point> backward_;
  std::vector<std::size_t> revealed_;
  std::vector<std::pair<int, Point>> touched_;
};

struct ExposedPoint {
  Point point;
  bool was_revealed;
};

/// One step of the revelation process from point x under letter l.
template <typename Engine>
ExposedPoint expose_step(PartialGenerators& state, Letter l, Point x,
                         Engine& rng) {
  if (auto known = state.lookup(l, x)) return {*known, false};
  // The pool is nonempty: x itself has no image yet, so some target is free.
  assert(state.revealed_count(l.generator) < state.n());
  for (;;) {
    const auto y = static_cast<Point>(uniform_below(rng, state.n()) + 1);
    if (state.is_available(l, y)) {
      state.reveal_step(l, x, y);
      return {y, true};
    }
  }
}

/// Exact law of the next point given the revealed history: a point mass if
/// determined, else uniform on the available pool.
inline std::map<Point, Rational> exact_conditional_step_distribution(
    const PartialGenerators& state, Letter l, Point x) {
  std::map<Point, Rational> dist;
  if (auto known = state.lookup(l, x)) {
    dist.emplace(*known, Rational(1));
    return dist;
  }
  const auto pool = state.available_targets(l);
  const Rational each(1, static_cast<std::int64_t>(pool.size()));
  for (Point y : pool) dist.emplace(y, each);
  return dist;
}

struct SingleTrajectoryRun {
  Trajectory trajectory;
  bool injective = false;  // x^0..x^k pairwise distinct
  bool returned = false;   // x^k == x^0
};

/// Runs the revelation process for one start point, continuing from
/// whatever `state` already holds.
template <typename Engine>
SingleTrajectoryRun run_single_trajectory(const Word& w, PartialGenerators& state,
                                          Point x, Engine& rng) {
  if (w.empty()) throw InvalidInput("run_single_trajectory needs a nontrivial word");
  if (x < 1 || x > state.n()) throw InvalidInput("start point out of range");
  if (w.rank() > state.d()) throw InvalidInput("word rank exceeds state rank");
  SingleTrajectoryRun run;
  auto& tr = run.trajectory;
  tr.letters = w.application_order();
  tr.points.reserve(tr.letters.size() + 1);
  tr.revealed.reserve(tr.letters.size());
  tr.points.push_back(x);
  for (Letter l : tr.letters) {
    const auto step = expose_step(state, l, tr.points.back(), rng);
    tr.points.push_back(step.point);
    tr.revealed.push_back(step.was_revealed);
  }
  run.injective = tr.injective();
  run.returned = tr.returned();
  return run;
}

template <typename Engine>
SingleTrajectoryRun run_single_trajectory(const Word& w, std::size_t n, Point x,
                                          Engine& rng) {
  PartialGenerators state(n, w.rank());
  return run_single_trajectory(w, state, x, rng);
}

struct CollisionStep {
  std::size_t trajectory;  // 1-based
  std::size_t step;        // 1-based j
};

/// One trial of the m-point argument: trajectories from fresh start points,
/// each start the smallest point not visited so far. The trial stops at the
/// first trajectory that does not close, since the event "all m close" is
/// then already decided.
struct ExposureOutcome {
  std::vector<Trajectory> trajectories;
  // Per trajectory: it repeated a point or hit an earlier trajectory.
  std::vector<bool> failed;
  std::optional<CollisionStep> first_collision;
  bool returned_all = false;
};

template <typename Engine>
ExposureOutcome run_multipoint_trial(const Word& w, PartialGenerators& state,
                                     std::size_t m, Engine& rng) {
  const std::size_t n = state.n();
  ExposureOutcome out;
  std::vector<bool> visited(n + 1, false);
  Point next_start = 1;
  for (std::size_t i = 1; i <= m; ++i) {
    while (next_start <= n && visited[next_start]) ++next_start;
    // Earlier trajectories all closed, so they cover at most (i-1)k < n points.
    assert(next_start <= n);
    auto run = run_single_trajectory(w, state, next_start, rng);
    const auto& pts = run.trajectory.points;

    bool failed = false;
    std::vector<bool> own(n + 1, false);
    own[pts[0]] = true;
    for (std::size_t j = 1; j < pts.size(); ++j) {
      const bool closing = j + 1 == pts.size() && pts[j] == pts[0];
      if (!closing && (own[pts[j]] || visited[pts[j]])) {
        if (!failed && !out.first_collision) out.first_collision = CollisionStep{i, j};
        failed = true;
      }
      own[pts[j]] = true;
    }
    for (Point p : pts) visited[p] = true;

    out.failed.push_back(failed);
    const bool closed = run.returned;
    out.trajectories.push_back(std::move(run.trajectory));
    if (!closed) return out;
  }
  out.returned_all = true;
  return out;
}

/// Bernoulli estimate with a Wilson score interval.
struct ProbabilityEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;

  double half_width() const { return (ci_high - ci_low) / 2.0; }
};

inline ProbabilityEstimate wilson_estimate(std::uint64_t successes,
                                           std::uint64_t trials,
                                           double z = kWilsonZ95) {
  if (trials == 0) throw InvalidParameters("trials must be >= 1");
  if (successes > trials) throw InvalidParameters("successes exceed trials");
  ProbabilityEstimate e;
  e.successes = successes;
  e.trials = trials;
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  e.estimate = p;
  e.ci_low = std::clamp(center - half, 0.0, p);
  e.ci_high = std::clamp(center + half, p, 1.0);
  return e;
}

/// (mk²/(n-mk)) for the i-th trajectory, i.e. the per-trajectory failure
/// bound with m replaced by i.
inline double trajectory_failure_bound(std::size_t n, std::size_t k, std::size_t i) {
  const double mk = static_cast<double>(i * k);
  return mk * static_cast<double>(k) / (static_cast<double>(n) - mk);
}

struct MultipointResult {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  ProbabilityEstimate closure;  // all m trajectories closed
  // Indexed by trajectory (0-based): trials that reached it, and how many
  // of those saw it fail.
  std::vector<std::uint64_t> attempts;
  std::vector<std::uint64_t> failures;

  double failure_rate(std::size_t i) const {
    return attempts[i] == 0 ? 0.0
                            : static_cast<double>(failures[i]) /
                                  static_cast<double>(attempts[i]);
  }
};

inline void check_multipoint_params(const Word& w, std::size_t n, std::size_t m) {
  if (w.empty()) throw InvalidParameters("multipoint experiment needs a nontrivial word");
  if (m < 1) throw InvalidParameters("m must be >= 1");
  if (m * w.size() >= n) {
    throw InvalidParameters("need m*k < n (m=" + std::to_string(m) +
                            ", k=" + std::to_string(w.size()) +
                            ", n=" + std::to_string(n) + ")");
  }
}

namespace detail {

template <typename Engine>
void accumulate_multipoint(const Word& w, std::size_t m,
                           std::uint64_t trials, Engine& rng,
                           PartialGenerators& state, MultipointResult& acc) {
  for (std::uint64_t t = 0; t < trials; ++t) {
    state.reset();
    const auto outcome = run_multipoint_trial(w, state, m, rng);
    for (std::size_t i = 0; i < outcome.failed.size(); ++i) {
      ++acc.attempts[i];
      if (outcome.failed[i]) ++acc.failures[i];
    }
    if (outcome.returned_all) ++acc.closure.successes;
  }
  acc.closure.trials += trials;
}

inline MultipointResult empty_multipoint(const Word& w, std::size_t n, std::size_t m) {
  MultipointResult r;
  r.n = n;
  r.m = m;
  r.k = w.size();
  r.attempts.assign(m, 0);
  r.failures.assign(m, 0);
  return r;
}

inline void finish(MultipointResult& r) {
  r.closure = wilson_estimate(r.closure.successes, r.closure.trials);
}

}  // namespace detail

/// Sequential run on a caller-supplied stream.
template <typename Engine>
MultipointResult run_multipoint_experiment(const Word& w, std::size_t n,
                                           std::size_t m, std::uint64_t trials,
                                           Engine& rng) {
  check_multipoint_params(w, n, m);
  if (trials < 1) throw InvalidParameters("trials must be >= 1");
  auto result = detail::empty_multipoint(w, n, m);
  PartialGenerators state(n, w.rank());
  detail::accumulate_multipoint(w, m, trials, rng, state, result);
  detail::finish(result);
  return result;
}

/// Seeded parallel run. Trials are cut into blocks of kTrialBlock, block b
/// drawing from make_stream(seed, b); the result does not depend on
/// `threads`.
inline MultipointResult run_multipoint_experiment(const Word& w, std::size_t n,
                                                  std::size_t m,
                                                  std::uint64_t trials,
                                                  std::uint64_t seed,
                                                  unsigned threads) {
  check_multipoint_params(w, n, m);
  if (trials < 1) throw InvalidParameters("trials must be >= 1");
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<MultipointResult> partial(blocks, detail::empty_multipoint(w, n, m));
  parallel_for_index(blocks, threads, [&](std::size_t b) {
    auto rng = make_stream(seed, b);
    PartialGenerators state(n, w.rank());
    const std::uint64_t count = std::min<std::uint64_t>(kTrialBlock, trials - b * kTrialBlock);
    detail::accumulate_multipoint(w, m, count, rng, state, partial[b]);
  });
  auto result = detail::empty_multipoint(w, n, m);
  for (const auto& p : partial) {
    result.closure.successes += p.closure.successes;
    result.closure.trials += p.closure.trials;
    for (std::size_t i = 0; i < m; ++i) {
      result.attempts[i] += p.attempts[i];
      result.failures[i] += p.failures[i];
    }
  }
  detail::finish(result);
  return result;
}

/// All n! permutations of {1..n} as flat image rows (1-based values), in
/// lexicographic order.
inline std::vector<Point> all_permutations_flat(std::size_t n) {
  std::vector<Point> row(n);
  for (std::size_t i = 0; i < n; ++i) row[i] = static_cast<Point>(i + 1);
  std::vector<Point> out;
  do {
    out.insert(out.end(), row.begin(), row.end());
  } while (std::next_permutation(row.begin(), row.end()));
  return out;
}

/// (n!)^d, or nullopt past 2^64.
inline std::optional<std::uint64_t> tuple_count(std::size_t n, int d) {
  std::uint64_t fact = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (__builtin_mul_overflow(fact, static_cast<std::uint64_t>(i), &fact)) {
      return std::nullopt;
    }
  }
  std::uint64_t total = 1;
  for (int i = 0; i < d; ++i) {
    if (__builtin_mul_overflow(total, fact, &total)) return std::nullopt;
  }
  return total;
}

/// P_{S_n}(w) by brute force over every tuple (π_1..π_r), r = w.rank().
/// Generators beyond the word's rank do not change the probability and are
/// not enumerated.
inline Rational exact_word_probability(const Word& w, std::size_t n,
                                       std::uint64_t cap = kDefaultTupleCap,
                                       unsigned threads = 0) {
  if (n < 1) throw InvalidParameters("n must be >= 1");
  const int d = w.rank();
  const auto total = tuple_count(n, d);
  if (!total || *total > cap) {
    throw ResourceLimit("exact_word_probability: (n!)^d exceeds tuple cap " +
                        std::to_string(cap));
  }
  if (w.empty()) return Rational(1);

  const auto perms = all_permutations_flat(n);
  const std::size_t count = perms.size() / n;
  std::vector<Point> inverses(perms.size());
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      inverses[p * n + perms[p * n + i] - 1] = static_cast<Point>(i + 1);
    }
  }
  const auto order = w.application_order();

  // Parallel over the choice of π_1; each slice enumerates the rest.
  std::vector<std::uint64_t> hits(count, 0);
  parallel_for_index(count, threads, [&](std::size_t first) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    idx[0] = first;
    std::vector<const Point*> fwd(static_cast<std::size_t>(d));
    std::vector<const Point*> inv(static_cast<std::size_t>(d));
    std::uint64_t local = 0;
    for (;;) {
      for (int g = 0; g < d; ++g) {
        fwd[g] = perms.data() + idx[g] * n;
        inv[g] = inverses.data() + idx[g] * n;
      }
      bool identity = true;
      for (Point x0 = 1; x0 <= n && identity; ++x0) {
        Point x = x0;
        for (Letter l : order) {
          x = (l.inverted ? inv[l.generator - 1] : fwd[l.generator - 1])[x - 1];
        }
        identity = x == x0;
      }
      if (identity) ++local;

      int g = d - 1;
      while (g >= 1 && ++idx[g] == count) idx[g--] = 0;
      if (g < 1) break;
    }
    hits[first] = local;
  });

  std::uint64_t successes = 0;
  for (auto h : hits) successes += h;
  return Rational(static_cast<std::int64_t>(successes),
                  static_cast<std::int64_t>(*total));
}

namespace detail {

// Fills `images`/`inverse` with a uniform permutation, reusing storage.
template <typename Engine>
void shuffle_into(std::vector<Point>& images, std::vector<Point>& inverse,
                  Engine& rng) {
  const std::size_t n = images.size();
  for (std::size_t i = 0; i < n; ++i) images[i] = static_cast<Point>(i + 1);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i + 1));
    std::swap(images[i], images[j]);
  }
  for (std::size_t i = 0; i < n; ++i) inverse[images[i] - 1] = static_cast<Point>(i + 1);
}

template <typename Engine>
std::uint64_t count_identity_samples(const Word& w, std::size_t n,
                                     std::uint64_t trials, Engine& rng) {
  const auto d = static_cast<std::size_t>(w.rank());
  std::vector<std::vector<Point>> fwd(d, std::vector<Point>(n));
  std::vector<std::vector<Point>> inv(d, std::vector<Point>(n));
  const auto order = w.application_order();
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    for (std::size_t g = 0; g < d; ++g) shuffle_into(fwd[g], inv[g], rng);
    bool identity = true;
    for (Point x0 = 1; x0 <= n && identity; ++x0) {
      Point x = x0;
      for (Letter l : order) {
        x = (l.inverted ? inv[l.generator - 1] : fwd[l.generator - 1])[x - 1];
      }
      identity = x == x0;
    }
    if (identity) ++hits;
  }
  return hits;
}

}  // namespace detail

/// Monte Carlo P_{S_n}(w): sample full uniform tuples, count identities.
template <typename Engine>
ProbabilityEstimate estimate_word_probability(const Word& w, std::size_t n,
                                              std::uint64_t trials, Engine& rng) {
  if (n < 1) throw InvalidParameters("n must be >= 1");
  if (trials < 1) throw InvalidParameters("trials must be >= 1");
  return wilson_estimate(detail::count_identity_samples(w, n, trials, rng), trials);
}

/// Seeded parallel version; blocks of kTrialBlock trials, block b on
/// make_stream(seed, b).
inline ProbabilityEstimate estimate_word_probability(const Word& w, std::size_t n,
                                                     std::uint64_t trials,
                                                     std::uint64_t seed,
                                                     unsigned threads) {
  if (n < 1) throw InvalidParameters("n must be >= 1");
  if (trials < 1) throw InvalidParameters("trials must be >= 1");
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for_index(blocks, threads, [&](std::size_t b) {
    auto rng = make_stream(seed, b);
    const std::uint64_t count = std::min<std::uint64_t>(kTrialBlock, trials - b * kTrialBlock);
    hits[b] = detail::count_identity_samples(w, n, count, rng);
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return wilson_estimate(total, trials);
}

/// Exact law of the whole trajectory of x under w when the generators are
/// revealed lazily: chains exact_conditional_step_distribution through
/// every branch. Keys are point sequences x^0..x^k.
inline std::map<std::vector<Point>, Rational> exposure_trajectory_distribution(
    const Word& w, std::size_t n, Point x) {
  if (x < 1 || x > n) throw InvalidInput("start point out of range");
  const auto order = w.application_order();
  std::map<std::vector<Point>, Rational> dist;
  std::vector<Point> path{x};

  auto recurse = [&](auto& self, const PartialGenerators& state,
                     const Rational& mass) -> void {
    const std::size_t j = path.size() - 1;
    if (j == order.size()) {
      dist[path] += mass;
      return;
    }
    const Letter l = order[j];
    for (const auto& [y, p] : exact_conditional_step_distribution(state, l, path.back())) {
      PartialGenerators next = state;
      next.reveal_step(l, path.back(), y);
      path.push_back(y);
      self(self, next, mass * p);
      path.pop_back();
    }
  };
  recurse(recurse, PartialGenerators(n, w.rank()), Rational(1));
  return dist;
}

}  // namespace cayley_girth
