#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cayley_girth/bounds.hpp"
#include "cayley_girth/exposure.hpp"
#include "oracles.hpp"

using namespace cayley_girth;

namespace {

Word W(const char* s, int d = 2) { return Word::parse(s, d); }

const Letter kA{1, false};
const Letter kAinv{1, true};

// |estimate - p| within 3 binomial standard deviations at p.
void expect_within_3_sigma(const ProbabilityEstimate& e, double p) {
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(e.trials));
  EXPECT_LE(std::abs(e.estimate - p), 3 * sigma + 1e-12)
      << "estimate " << e.estimate << " vs " << p;
}

}  // namespace

TEST(PartialGenerators, RevealAndLookup) {
  PartialGenerators s(4, 2);
  EXPECT_FALSE(s.lookup(kA, 1));
  s.reveal(1, 1, 3);
  EXPECT_EQ(*s.lookup(kA, 1), 3u);
  EXPECT_EQ(*s.lookup(kAinv, 3), 1u);
  EXPECT_FALSE(s.is_available(kA, 3));
  EXPECT_FALSE(s.is_available(kAinv, 1));
  EXPECT_NO_THROW(s.reveal(1, 1, 3));
  EXPECT_THROW(s.reveal(1, 1, 2), InvalidInput);
  EXPECT_THROW(s.reveal(1, 2, 3), InvalidInput);
  EXPECT_THROW(s.reveal(3, 1, 1), InvalidInput);
  EXPECT_THROW(s.reveal(1, 5, 1), InvalidInput);
  s.reveal_step(kAinv, 2, 4);  // a(4) = 2
  EXPECT_EQ(*s.lookup(kA, 4), 2u);
  EXPECT_EQ(s.revealed_count(1), 2u);
  s.reset();
  EXPECT_EQ(s.revealed_count(1), 0u);
  EXPECT_FALSE(s.lookup(kA, 1));
  EXPECT_EQ(s.available_targets(kA).size(), 4u);
}

TEST(PartialGenerators, StaysConsistentUnderRandomRevelation) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    PartialGenerators s(7, 2);
    for (int step = 0; step < 30; ++step) {
      const Letter l{static_cast<int>(uniform_below(rng, 2)) + 1, uniform_below(rng, 2) == 1};
      const auto x = static_cast<Point>(uniform_below(rng, 7) + 1);
      expose_step(s, l, x, rng);
    }
    for (int g = 1; g <= 2; ++g) {
      std::size_t fwd = 0;
      std::size_t bwd = 0;
      for (Point x = 1; x <= 7; ++x) {
        if (auto y = s.lookup({g, false}, x)) {
          ++fwd;
          ASSERT_EQ(*s.lookup({g, true}, *y), x);
        }
        if (s.lookup({g, true}, x)) ++bwd;
      }
      ASSERT_EQ(fwd, bwd);
      ASSERT_EQ(fwd, s.revealed_count(g));
      ASSERT_EQ(s.available_targets({g, false}).size(), 7 - fwd);
    }
  }
}

TEST(ExposeStep, Examples) {
  Rng rng(1);
  PartialGenerators s(3, 1);
  s.reveal(1, 1, 2);
  const auto r = expose_step(s, kA, 1, rng);
  EXPECT_EQ(r.point, 2u);
  EXPECT_FALSE(r.was_revealed);

  const auto dist = exact_conditional_step_distribution(s, kA, 3);
  ASSERT_EQ(dist.size(), 2u);
  EXPECT_EQ(dist.at(1), Rational(1, 2));
  EXPECT_EQ(dist.at(3), Rational(1, 2));

  const auto fresh = exact_conditional_step_distribution(PartialGenerators(3, 1), kA, 1);
  ASSERT_EQ(fresh.size(), 3u);
  for (const auto& [y, p] : fresh) EXPECT_EQ(p, Rational(1, 3));

  const auto determined = exact_conditional_step_distribution(s, kA, 1);
  ASSERT_EQ(determined.size(), 1u);
  EXPECT_EQ(determined.at(2), Rational(1));
}

TEST(ExposeStep, SampleFrequenciesMatchPool) {
  Rng rng(99);
  std::map<Point, int> counts;
  const int trials = 30000;
  for (int i = 0; i < trials; ++i) {
    PartialGenerators s(3, 1);
    s.reveal(1, 1, 2);
    const auto r = expose_step(s, kA, 3, rng);
    EXPECT_TRUE(r.was_revealed);
    ++counts[r.point];
  }
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts.count(2), 0u);
  const double sigma = std::sqrt(0.25 / trials);
  EXPECT_NEAR(counts[1] / double(trials), 0.5, 4 * sigma);
}

TEST(ExposeStep, FreshGeneratorPoolShrinks) {
  PartialGenerators s(6, 1);
  s.reveal(1, 1, 2);
  s.reveal(1, 2, 4);
  const auto dist = exact_conditional_step_distribution(s, kA, 4);
  ASSERT_EQ(dist.size(), 4u);
  for (const auto& [y, p] : dist) EXPECT_EQ(p, Rational(1, 4));
}

TEST(Faithfulness, ExposureLawEqualsEnumeration) {
  // Total variation zero for every reduced word up to length 3 at n <= 3
  // and a sample of length-4 words at n = 4.
  for (std::size_t n = 2; n <= 3; ++n) {
    for (const auto& w : enumerate_reduced(2, 3)) {
      for (Point x = 1; x <= n; ++x) {
        const auto lhs = exposure_trajectory_distribution(w, n, x);
        const auto rhs =
            oracle::enumerated_trajectory_distribution(w.to_string(), static_cast<int>(n), 2, x);
        ASSERT_EQ(lhs, rhs) << w.to_string() << " n=" << n << " x=" << x;
      }
    }
  }
  for (const char* s : {"abAB", "aabb", "abab", "aBAb"}) {
    const auto lhs = exposure_trajectory_distribution(W(s), 4, 1);
    const auto rhs = oracle::enumerated_trajectory_distribution(s, 4, 2, 1);
    ASSERT_EQ(lhs, rhs) << s;
  }
}

TEST(Faithfulness, PerStepCollisionBound) {
  // Along every injective prefix of a fresh trajectory, the probability of
  // hitting an earlier point at step j is at most j/(n-j+1).
  for (std::size_t n = 3; n <= 5; ++n) {
    for (const auto& w : enumerate_reduced(2, 4)) {
      const auto order = w.application_order();
      std::vector<Point> path{1};
      auto walk = [&](auto& self, const PartialGenerators& state) -> void {
        const std::size_t j = path.size();
        if (j > order.size()) return;
        const auto dist = exact_conditional_step_distribution(state, order[j - 1], path.back());
        Rational hit(0);
        for (const auto& [y, p] : dist) {
          if (std::find(path.begin(), path.end(), y) != path.end()) hit += p;
        }
        if (n + 1 > j) {
          ASSERT_LE(hit, Rational(static_cast<std::int64_t>(j),
                                  static_cast<std::int64_t>(n - j + 1)))
              << w.to_string() << " j=" << j;
        }
        for (const auto& [y, p] : dist) {
          if (std::find(path.begin(), path.end(), y) != path.end()) continue;
          PartialGenerators next = state;
          next.reveal_step(order[j - 1], path.back(), y);
          path.push_back(y);
          self(self, next);
          path.pop_back();
        }
      };
      walk(walk, PartialGenerators(n, 2));
    }
  }
}

TEST(SingleTrajectory, SingleLetterReturnsWithProbabilityOneOverN) {
  const auto dist = exposure_trajectory_distribution(W("a", 1), 7, 3);
  ASSERT_EQ(dist.size(), 7u);
  EXPECT_EQ(dist.at({3, 3}), Rational(1, 7));
}

TEST(SingleTrajectory, Deterministic) {
  auto r1 = make_stream(5, 0);
  auto r2 = make_stream(5, 0);
  const auto a = run_single_trajectory(W("abAbaB"), 20, 1, r1);
  const auto b = run_single_trajectory(W("abAbaB"), 20, 1, r2);
  EXPECT_EQ(a.trajectory.points, b.trajectory.points);
  EXPECT_EQ(a.trajectory.revealed, b.trajectory.revealed);
}

TEST(SingleTrajectory, InjectivityFailureRateAtLargeN) {
  // k = 3, n = 10^4: failure rate at most k^2/(n-k) within 3 sigma.
  Rng rng(123);
  const std::size_t n = 10000;
  const Word w = W("abA");
  PartialGenerators state(n, 2);
  const int trials = 100000;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    state.reset();
    const auto r = run_single_trajectory(w, state, 1, rng);
    if (!r.injective) ++failures;
  }
  const double bound = 9.0 / (n - 3);
  const double sigma = std::sqrt(bound * (1 - bound) / trials);
  EXPECT_LE(failures / double(trials), bound + 3 * sigma);
}

TEST(SingleTrajectory, RejectsBadArguments) {
  Rng rng(0);
  EXPECT_THROW(run_single_trajectory(Word(2), 5, 1, rng), InvalidInput);
  EXPECT_THROW(run_single_trajectory(W("ab"), 5, 6, rng), InvalidInput);
}

TEST(Multipoint, CollisionFreeTrialsAreDisjoint) {
  Rng rng(31);
  PartialGenerators state(40, 2);
  int clean = 0;
  for (int t = 0; t < 3000; ++t) {
    state.reset();
    const auto out = run_multipoint_trial(W("ab"), state, 3, rng);
    if (out.first_collision) continue;
    ++clean;
    std::vector<Point> seen;
    for (const auto& tr : out.trajectories) {
      for (std::size_t j = 0; j + 1 < tr.points.size(); ++j) seen.push_back(tr.points[j]);
      if (tr.points.back() != tr.points.front()) seen.push_back(tr.points.back());
    }
    std::sort(seen.begin(), seen.end());
    ASSERT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
  }
  EXPECT_GT(clean, 0);
}

TEST(Multipoint, SingleStartClosureIsOneFifth) {
  // P(ab fixes 1) over S_5 x S_5, computed by the enumeration oracle.
  const auto law = oracle::enumerated_trajectory_distribution("ab", 5, 2, 1);
  Rational closure(0);
  for (const auto& [pts, p] : law) {
    if (pts.back() == 1) closure += p;
  }
  ASSERT_EQ(closure, Rational(1, 5));
  const auto r = run_multipoint_experiment(W("ab"), 5, 1, 100000, 7, 0);
  expect_within_3_sigma(r.closure, 0.2);
}

TEST(Multipoint, ClosureRespectsLemmaBound) {
  const auto r = run_multipoint_experiment(W("ab"), 50, 3, 100000, 11, 0);
  const double bound = lemma_bound(50, 2, 3).value;
  EXPECT_NEAR(bound, std::pow(12.0 / 44.0, 3), 1e-15);
  const double sigma = std::sqrt(bound * (1 - bound) / 100000);
  EXPECT_LE(r.closure.estimate, bound + 3 * sigma);
  for (std::size_t i = 0; i < 3; ++i) {
    if (r.attempts[i] == 0) continue;
    const double b = trajectory_failure_bound(50, 2, i + 1);
    const double s = std::sqrt(std::min(b, 1.0) / static_cast<double>(r.attempts[i]));
    EXPECT_LE(r.failure_rate(i), b + 3 * s);
  }
}

TEST(Multipoint, ThreadCountDoesNotChangeResult) {
  const auto a = run_multipoint_experiment(W("abA"), 30, 2, 20000, 99, 1);
  const auto b = run_multipoint_experiment(W("abA"), 30, 2, 20000, 99, 4);
  EXPECT_EQ(a.closure.successes, b.closure.successes);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.attempts, b.attempts);
}

TEST(Multipoint, RejectsTooManyPoints) {
  Rng rng(0);
  EXPECT_THROW(run_multipoint_experiment(W("ab"), 6, 3, 10, rng), InvalidParameters);
  EXPECT_THROW(run_multipoint_experiment(W("ab"), 6, 0, 10, rng), InvalidParameters);
}

TEST(ExactProbability, Examples) {
  EXPECT_EQ(exact_word_probability(W("a", 1), 3), Rational(1, 6));
  EXPECT_EQ(exact_word_probability(W("abAB"), 3), Rational(1, 2));
  EXPECT_EQ(exact_word_probability(W("aa", 1), 3), Rational(2, 3));
  EXPECT_EQ(exact_word_probability(W("abAbaB"), 3), Rational(1, 3));
  EXPECT_EQ(exact_word_probability(W("ab"), 5), Rational(1, 120));
  EXPECT_THROW(exact_word_probability(W("ab"), 9), ResourceLimit);
  EXPECT_THROW(exact_word_probability(W("ab"), 4, 100), ResourceLimit);
}

TEST(ExactProbability, MatchesOracle) {
  for (const auto& w : enumerate_reduced(2, 4)) {
    ASSERT_EQ(exact_word_probability(w, 3), oracle::word_probability(w.to_string(), 3, 2))
        << w.to_string();
  }
  for (const char* s : {"abc", "aBcA", "cc"}) {
    ASSERT_EQ(exact_word_probability(W(s, 3), 3), oracle::word_probability(s, 3, 3)) << s;
  }
}

TEST(ExactProbability, ConjugationInvariant) {
  for (const auto& w : enumerate_reduced(2, 4)) {
    if (!is_cyclically_reduced(w)) continue;
    const auto p = exact_word_probability(w, 4);
    const auto letters = w.letters();
    for (std::size_t r = 1; r < letters.size(); ++r) {
      std::vector<Letter> rot(letters.begin() + r, letters.end());
      rot.insert(rot.end(), letters.begin(), letters.begin() + r);
      ASSERT_EQ(exact_word_probability(Word::from_reduced(rot, 2), 4), p) << w.to_string();
    }
  }
}

TEST(ExactProbability, LemmaClosureBoundHolds) {
  for (std::uint64_t n = 4; n <= 5; ++n) {
    for (const auto& w : enumerate_reduced(2, 4)) {
      const auto p = exact_word_probability(w, n);
      const std::uint64_t k = w.size();
      for (std::uint64_t m = 1; m * k < n; ++m) {
        const auto b = lemma_bound(n, k, m);
        ASSERT_LE(to_double(p), b.value) << w.to_string() << " n=" << n << " m=" << m;
      }
    }
  }
}

TEST(Estimate, WithinThreeSigmaOfExact) {
  const std::uint64_t trials = 100000;
  expect_within_3_sigma(estimate_word_probability(W("a", 1), 3, trials, 1, 0), 1.0 / 6);
  expect_within_3_sigma(estimate_word_probability(W("abAB"), 3, trials, 2, 0), 0.5);
  expect_within_3_sigma(estimate_word_probability(W("abAbaB"), 3, trials, 3, 0), 1.0 / 3);
}

TEST(Estimate, DeterministicAcrossThreadCounts) {
  const auto a = estimate_word_probability(W("abAB"), 4, 50000, 17, 1);
  const auto b = estimate_word_probability(W("abAB"), 4, 50000, 17, 3);
  EXPECT_EQ(a.successes, b.successes);
}

TEST(Wilson, IntervalInvariants) {
  for (std::uint64_t trials : {1ull, 2ull, 10ull, 1000ull}) {
    for (std::uint64_t s = 0; s <= trials; s += (trials > 10 ? 97 : 1)) {
      const auto e = wilson_estimate(s, trials);
      EXPECT_DOUBLE_EQ(e.estimate, double(s) / double(trials));
      EXPECT_LE(0.0, e.ci_low);
      EXPECT_LE(e.ci_low, e.estimate);
      EXPECT_LE(e.estimate, e.ci_high);
      EXPECT_LE(e.ci_high, 1.0);
    }
  }
  EXPECT_THROW(wilson_estimate(0, 0), InvalidParameters);
  EXPECT_THROW(wilson_estimate(3, 2), InvalidParameters);
}
