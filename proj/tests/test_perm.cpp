#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cayley_girth/perm.hpp"
#include "cayley_girth/random.hpp"
#include "oracles.hpp"

using namespace cayley_girth;

namespace {

Word W(const char* s, int d = 2) { return Word::parse(s, d); }

GeneratorTuple tuple(std::size_t n, std::initializer_list<const char*> cycles) {
  std::vector<Permutation> perms;
  for (const char* c : cycles) perms.push_back(parse_cycles(c, n));
  return GeneratorTuple(perms);
}

}  // namespace

TEST(Permutation, CycleRoundTrip) {
  const auto p = parse_cycles("(1 3)(2 4 5)", 5);
  EXPECT_EQ(p.to_cycle_string(), "(1 3)(2 4 5)");
  EXPECT_EQ(parse_cycles(p.to_cycle_string(), 5), p);
  EXPECT_EQ(parse_cycles("()", 4), Permutation::identity(4));
  EXPECT_EQ(parse_cycles("", 4), Permutation::identity(4));
  EXPECT_EQ(Permutation::identity(3).to_cycle_string(), "()");
  EXPECT_EQ(parse_cycles("(1,2,3)", 3), parse_cycles("(1 2 3)", 3));
}

TEST(Permutation, RejectsBadInput) {
  EXPECT_THROW(parse_cycles("(1 4)", 3), InvalidInput);
  EXPECT_THROW(parse_cycles("(1 2)(2 3)", 3), InvalidInput);
  EXPECT_THROW(parse_cycles("(1 2", 3), InvalidInput);
  EXPECT_THROW(Permutation::from_images({1, 1, 2}), InvalidInput);
  EXPECT_THROW(Permutation::from_images({0, 1}), InvalidInput);
  EXPECT_THROW(Permutation::identity(3).image(4), InvalidInput);
  EXPECT_THROW(compose(Permutation::identity(3), Permutation::identity(4)), InvalidInput);
}

TEST(Permutation, ComposeActsRightFirst) {
  const auto p = parse_cycles("(1 2)", 3);
  const auto q = parse_cycles("(2 3)", 3);
  // p(q(2)) = p(3) = 3
  EXPECT_EQ(compose(p, q).image(2), 3u);
  EXPECT_EQ(compose(p, p.inverse()), Permutation::identity(3));
}

TEST(Evaluate, WordHomomorphismOnS3) {
  const auto group = oracle::symmetric_group(3);
  for (const auto& a : group) {
    for (const auto& b : group) {
      const auto t = oracle::tuple_of({a, b});
      for (const auto& su : oracle::reduced_strings(2, 2)) {
        for (const auto& sv : oracle::reduced_strings(2, 2)) {
          const Word u = W(su.c_str());
          const Word v = W(sv.c_str());
          ASSERT_EQ(evaluate_word(multiply(u, v), t),
                    compose(evaluate_word(u, t), evaluate_word(v, t)));
        }
      }
    }
  }
}

TEST(Evaluate, InverseWordGivesInversePermutation) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_tuple(7, 2, rng);
    for (const char* s : {"a", "abAB", "abbAbaB", "BBa"}) {
      const Word w = W(s);
      EXPECT_EQ(evaluate_word(w.inverse(), t), evaluate_word(w, t).inverse());
    }
  }
}

TEST(Evaluate, MatchesOracle) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto t = random_tuple(6, 3, rng);
    const auto rows = oracle::rows_of(t);
    for (const auto& s : oracle::reduced_strings(3, 3)) {
      const auto got = evaluate_word(W(s.c_str(), 3), t);
      const auto want = oracle::evaluate(s, rows);
      for (Point x = 1; x <= 6; ++x) {
        ASSERT_EQ(got.image(x), static_cast<Point>(want[x - 1] + 1)) << s;
      }
      ASSERT_EQ(word_is_identity(W(s.c_str(), 3), t), oracle::is_identity(want));
    }
  }
}

TEST(Evaluate, Examples) {
  // Commutator of (1 2) and (2 3) is a 3-cycle, not the identity.
  EXPECT_FALSE(word_is_identity(W("abAB"), tuple(3, {"(1 2)", "(2 3)"})));
  EXPECT_TRUE(word_is_identity(W("abAB"), tuple(3, {"(1 2)", "(1 2)"})));
  EXPECT_TRUE(word_is_identity(W("aaa", 1), tuple(3, {"(1 2 3)"})));
  EXPECT_THROW(evaluate_word(W("abc", 3), tuple(3, {"(1 2)", "(2 3)"})), InvalidInput);
  // Words of smaller rank evaluate fine.
  EXPECT_TRUE(word_is_identity(W("aa", 1), tuple(3, {"(1 2)", "(1 2 3)"})));
}

TEST(Trajectory, CounterexampleWalk) {
  const auto t = tuple(3, {"(1 3)", "(1 2)"});
  const auto tr = trajectory(W("abAbaB"), t, 1);
  EXPECT_EQ(tr.points, (std::vector<Point>{1, 2, 2, 1, 3, 3, 1}));
  EXPECT_EQ(tr.steps(), 6u);
  EXPECT_TRUE(tr.returned());
  EXPECT_FALSE(tr.injective());
  EXPECT_EQ(to_char(tr.letters.front()), 'B');
  EXPECT_EQ(to_char(tr.letters.back()), 'a');
}

TEST(Trajectory, EndpointIsEvaluation) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto t = random_tuple(9, 2, rng);
    const Word w = W("abAAbBaBab");
    const auto p = evaluate_word(w, t);
    for (Point x = 1; x <= 9; ++x) {
      const auto tr = trajectory(w, t, x);
      ASSERT_EQ(tr.points.size(), w.size() + 1);
      ASSERT_EQ(tr.points.back(), p.image(x));
    }
  }
  EXPECT_THROW(trajectory(W("ab"), random_tuple(4, 2, rng), 5), InvalidInput);
}

TEST(RandomUniform, ChiSquareOverS3) {
  // 6 outcomes, df = 5, critical value 20.515 at level 0.001.
  Rng rng(2024);
  std::map<std::string, int> counts;
  const int trials = 60000;
  for (int i = 0; i < trials; ++i) ++counts[random_uniform(3, rng).to_cycle_string()];
  ASSERT_EQ(counts.size(), 6u);
  double chi2 = 0;
  const double expected = trials / 6.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 20.515);
}

TEST(RandomUniform, ChiSquareOverS4) {
  // 24 outcomes, df = 23, critical value 49.728 at level 0.001.
  Rng rng(77);
  std::map<std::string, int> counts;
  const int trials = 240000;
  for (int i = 0; i < trials; ++i) ++counts[random_uniform(4, rng).to_cycle_string()];
  ASSERT_EQ(counts.size(), 24u);
  double chi2 = 0;
  const double expected = trials / 24.0;
  for (const auto& [k, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 49.728);
}

TEST(Random, UniformBelowStaysInRange) {
  Rng rng(1);
  for (std::uint64_t bound : {1ull, 2ull, 3ull, 7ull, 1000003ull}) {
    for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_below(rng, bound), bound);
  }
}

TEST(Random, StreamsAreReproducibleAndDistinct) {
  auto a = make_stream(42, 0);
  auto b = make_stream(42, 0);
  auto c = make_stream(42, 1);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}
