#pragma once

// Replays the "first return" argument for random Cayley graph girth and
// shows where it breaks. Two of its steps are sound and are checked here
// exhaustively on small cases; the third, a 1/(n - j + 1) bound on the
// conditional probability that the trajectory first returns to its start
// at step j, fails on the word abAbaB because the closing transition can
// already be forced by earlier revelations.

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cayley_girth/errors.hpp"
#include "cayley_girth/exposure.hpp"
#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/perm.hpp"
#include "cayley_girth/rational.hpp"

namespace cayley_girth {

struct ReturnAnalysis {
  Word word;
  GeneratorTuple tuple;
  Point start = 1;
  Trajectory trajectory;  // with revealed flags from a replay
  // Steps j with x^j = start and w_j != w_1^-1.
  std::vector<std::size_t> qualifying_indices;
  std::size_t first_qualifying = 0;
  // Whether the transition into first_qualifying was already forced.
  bool determined_at_first = false;
};

/// Checks that a closed trajectory of a cyclically reduced relator returns
/// to its start at some step j via a letter other than w_1^-1. Throws
/// std::logic_error if no such step exists.
inline ReturnAnalysis verify_return_index_claim(const Word& w,
                                                const GeneratorTuple& t,
                                                Point x) {
  if (w.empty()) throw InvalidInput("word must be nontrivial");
  if (!is_cyclically_reduced(w)) {
    throw InvalidInput("word " + w.to_string() + " is not cyclically reduced");
  }
  if (!word_is_identity(w, t)) {
    throw InvalidInput("word " + w.to_string() + " is not a relator of the tuple");
  }

  ReturnAnalysis a{w, t, x, trajectory(w, t, x), {}, 0, false};
  auto& tr = a.trajectory;
  const Letter closing = w.applied(1).inverse();
  for (std::size_t j = 1; j <= tr.steps(); ++j) {
    if (tr.points[j] == x && tr.letters[j - 1] != closing) {
      a.qualifying_indices.push_back(j);
    }
  }
  if (a.qualifying_indices.empty()) {
    throw std::logic_error("return-index claim violated for " + w.to_string() +
                           " from point " + std::to_string(x));
  }
  a.first_qualifying = a.qualifying_indices.front();

  PartialGenerators state(t.n(), t.d());
  tr.revealed.clear();
  for (std::size_t j = 1; j <= tr.steps(); ++j) {
    const Letter l = tr.letters[j - 1];
    const bool known = state.lookup(l, tr.points[j - 1]).has_value();
    if (j == a.first_qualifying) a.determined_at_first = known;
    tr.revealed.push_back(!known);
    state.reveal_step(l, tr.points[j - 1], tr.points[j]);
  }
  return a;
}

inline constexpr std::string_view kCounterexampleWord = "abAbaB";

struct Counterexample {
  Word word;
  GeneratorTuple tuple;
  Trajectory trajectory;  // from point 1
};

/// A tuple realizing 1 -B-> 2 -a-> 2 -b-> 1 -A-> 3 -b-> 3 -a-> 1 for
/// w = abAbaB. The trajectory forces a(2)=2, a(3)=1, b(2)=1, b(3)=3; points
/// >= 4 are fixed and the rest of {1,2,3} is filled in increasing order.
inline Counterexample construct_counterexample(std::size_t n) {
  if (n < 3) throw InvalidParameters("counterexample needs n >= 3");
  const std::vector<std::vector<std::pair<Point, Point>>> forced = {
      {{2, 2}, {3, 1}},  // a
      {{2, 1}, {3, 3}},  // b
  };
  std::vector<Permutation> perms;
  for (const auto& pairs : forced) {
    std::vector<Point> images(n, 0);
    std::vector<bool> used(n + 1, false);
    for (Point x = 4; x <= n; ++x) {
      images[x - 1] = x;
      used[x] = true;
    }
    for (auto [x, y] : pairs) {
      images[x - 1] = y;
      used[y] = true;
    }
    Point next = 1;
    for (Point x = 1; x <= 3; ++x) {
      if (images[x - 1] != 0) continue;
      while (used[next]) ++next;
      images[x - 1] = next;
      used[next] = true;
    }
    perms.push_back(Permutation::from_images(std::move(images)));
  }
  Counterexample ce{Word::parse(kCounterexampleWord, 2),
                    GeneratorTuple(std::move(perms)), {}};
  ce.trajectory = trajectory(ce.word, ce.tuple, 1);
  return ce;
}

struct ReplayStep {
  std::size_t j = 0;
  Letter letter;
  Point from = 0;
  Point to = 0;
  bool determined = false;
  std::map<Point, Rational> distribution;  // law of x^j given x^0..x^(j-1)
  std::vector<std::tuple<int, Point, Point>> revealed_after;
};

struct ConditionalViolationReport {
  std::size_t n = 0;
  Word word;
  Point start = 1;
  std::vector<ReplayStep> steps;
  std::size_t first_qualifying = 0;  // the step j the flawed bound is applied to
  Rational claimed_bound;            // 1/(n - j + 1)
  Rational true_probability;         // P(x^j = start | prefix)
  Rational fresh_step_probability;   // P(x^1 = start) on a fresh start: 1/n

  double gap() const { return to_double(true_probability) - to_double(claimed_bound); }
  bool violated() const { return true_probability > claimed_bound; }
};

/// Replays the counterexample trajectory through the revelation process and
/// compares the claimed conditional bound at the first qualifying return
/// with the exact conditional probability.
inline ConditionalViolationReport demonstrate_conditional_violation(std::size_t n) {
  if (n < 7) throw InvalidParameters("need n >= 7 so that 1/(n-5) < 1");
  const auto ce = construct_counterexample(n);
  const auto analysis = verify_return_index_claim(ce.word, ce.tuple, 1);

  ConditionalViolationReport r;
  r.n = n;
  r.word = ce.word;
  r.start = 1;
  r.first_qualifying = analysis.first_qualifying;

  PartialGenerators state(n, ce.word.rank());
  const auto& tr = ce.trajectory;
  for (std::size_t j = 1; j <= tr.steps(); ++j) {
    ReplayStep step;
    step.j = j;
    step.letter = tr.letters[j - 1];
    step.from = tr.points[j - 1];
    step.to = tr.points[j];
    step.determined = state.lookup(step.letter, step.from).has_value();
    step.distribution = exact_conditional_step_distribution(state, step.letter, step.from);
    state.reveal_step(step.letter, step.from, step.to);
    step.revealed_after = state.revealed_pairs();
    r.steps.push_back(std::move(step));
  }

  const auto& at = r.steps[r.first_qualifying - 1].distribution;
  const auto hit = at.find(r.start);
  r.true_probability = hit == at.end() ? Rational(0) : hit->second;
  r.claimed_bound = Rational(1, static_cast<std::int64_t>(n - r.first_qualifying + 1));

  const PartialGenerators fresh(n, ce.word.rank());
  const auto first = exact_conditional_step_distribution(fresh, tr.letters[0], r.start);
  r.fresh_step_probability = first.count(r.start) ? first.at(r.start) : Rational(0);
  return r;
}

}  // namespace cayley_girth
