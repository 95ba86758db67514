#pragma once

// Closed-form bounds for the girth of random Cayley graphs of S_n.
//
// The word-fixing bound P(w = 1) <= (mk²/(n - mk))^m with the choice
// m = floor(n/(4k²)) gives P <= 2^(1 - n/(4k²)) = 2·exp(-c·n/k²) with
// c = ln 2 / 4, which is the default constant below. The leading factor 2
// is reported separately rather than absorbed into c.
//
// All logarithms are natural.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "cayley_girth/errors.hpp"

namespace cayley_girth {

inline const double kDefaultC = std::log(2.0) / 4.0;

/// A bound on a probability; `vacuous` when it says nothing (>= 1).
struct BoundValue {
  double value = 0.0;
  bool vacuous = false;
};

inline BoundValue make_bound(double value) { return {value, value >= 1.0}; }

/// (mk²/(n - mk))^m, valid for m < n/k.
inline BoundValue lemma_bound(std::uint64_t n, std::uint64_t k, std::uint64_t m) {
  if (n < 1 || k < 1 || m < 1) {
    throw InvalidParameters("lemma_bound needs n, k, m >= 1");
  }
  if (m * k >= n) {
    throw InvalidParameters("lemma_bound needs m*k < n (m=" + std::to_string(m) +
                            ", k=" + std::to_string(k) +
                            ", n=" + std::to_string(n) + ")");
  }
  const double mk = static_cast<double>(m) * static_cast<double>(k);
  const double ratio = mk * static_cast<double>(k) / (static_cast<double>(n) - mk);
  return make_bound(std::pow(ratio, static_cast<double>(m)));
}

struct QuarterMBound {
  std::uint64_t m = 0;       // floor(n / (4k²))
  double value = 0.0;        // 2^(1 - n/(4k²))
  bool vacuous = false;
  BoundValue lemma_at_m;     // lemma_bound(n, k, m), never larger than value
};

inline QuarterMBound lemma_bound_quarter_m(std::uint64_t n, std::uint64_t k) {
  if (k < 1) throw InvalidParameters("k must be >= 1");
  const std::uint64_t four_k2 = 4 * k * k;
  if (n < four_k2) {
    throw InvalidParameters("need n >= 4k^2 (n=" + std::to_string(n) +
                            ", k=" + std::to_string(k) + ")");
  }
  QuarterMBound out;
  out.m = n / four_k2;
  const double exponent =
      1.0 - static_cast<double>(n) / static_cast<double>(four_k2);
  out.value = std::exp2(exponent);
  out.vacuous = out.value >= 1.0;
  out.lemma_at_m = lemma_bound(n, k, out.m);
  return out;
}

/// 2d (2d-1)^(k-1) exp(-c n / k²): the number of reduced words of length k
/// times the per-word bound. Evaluated in log space.
inline BoundValue union_bound(double n, int d, std::uint64_t k, double c) {
  if (n <= 0 || d < 1 || k < 1 || !(c > 0)) {
    throw InvalidParameters("union_bound needs positive n, d, k, c");
  }
  const double kk = static_cast<double>(k);
  const double log_value = std::log(2.0 * d) +
                           (kk - 1.0) * std::log(2.0 * d - 1.0) -
                           c * n / (kk * kk);
  return make_bound(std::exp(log_value));
}

/// floor((c n / (2 log(2d-1)))^(1/3)).
inline std::uint64_t girth_threshold(double n, int d, double c) {
  if (d < 2) throw InvalidParameters("girth_threshold needs d >= 2 (log(2d-1) > 0)");
  if (!(c > 0)) throw InvalidParameters("girth_threshold needs c > 0");
  if (n < 0) throw InvalidParameters("girth_threshold needs n >= 0");
  if (n == 0) return 0;
  const double inner = c * n / (2.0 * std::log(2.0 * d - 1.0));
  auto k = static_cast<std::uint64_t>(std::floor(std::cbrt(inner)));
  // Guard the floor against cbrt rounding at perfect cubes.
  while (static_cast<double>((k + 1) * (k + 1) * (k + 1)) <= inner) ++k;
  while (k > 0 && static_cast<double>(k * k * k) > inner) --k;
  return k;
}

namespace detail {

using BigInt = boost::multiprecision::cpp_int;

inline BigInt factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Minimum vertex count of a (2d)-regular graph of girth g.
inline BigInt moore_count(std::uint64_t g, int d) {
  const BigInt q = 2 * d - 1;
  const std::uint64_t t = g / 2;
  BigInt geometric = 0;  // sum_{i<t} q^i
  BigInt power = 1;
  for (std::uint64_t i = 0; i < t; ++i) {
    geometric += power;
    power *= q;
  }
  if (g % 2 == 1) return 1 + 2 * d * geometric;
  return 2 * geometric;
}

inline double log_moore_count(std::uint64_t g, int d) {
  const double q = 2.0 * d - 1.0;
  const double t = static_cast<double>(g / 2);
  const double s = t * std::log(q);
  const double q_neg_t = std::exp(-s);
  if (g % 2 == 1) {
    return s + std::log(q_neg_t + 2.0 * d * (1.0 - q_neg_t) / (q - 1.0));
  }
  return std::log(2.0) + s + std::log((1.0 - q_neg_t) / (q - 1.0));
}

}  // namespace detail

/// Largest g whose Moore vertex count for a (2d)-regular graph does not
/// exceed n!. Counts are compared exactly; for large n the comparison runs
/// in log space and falls back to exact integers near ties.
inline std::uint64_t moore_girth_upper(std::uint64_t n, int d) {
  if (n < 1 || d < 1) throw InvalidParameters("moore_girth_upper needs n, d >= 1");
  if (d == 1) {
    // A 2-regular graph of girth g needs g vertices.
    const auto f = detail::factorial(n);
    if (f > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("moore_girth_upper: n! exceeds 64 bits for d = 1");
    }
    return static_cast<std::uint64_t>(f);
  }

  constexpr std::uint64_t kExactLimit = 60;
  if (n <= kExactLimit) {
    const auto limit = detail::factorial(n);
    std::uint64_t g = 1;
    while (detail::moore_count(g + 1, d) <= limit) ++g;
    return g;
  }

  const double log_limit = std::lgamma(static_cast<double>(n) + 1.0);
  std::optional<detail::BigInt> exact_limit;
  auto fits = [&](std::uint64_t g) {
    const double diff = detail::log_moore_count(g, d) - log_limit;
    if (std::abs(diff) > 1e-6) return diff < 0;
    if (!exact_limit) exact_limit = detail::factorial(n);
    return detail::moore_count(g, d) <= *exact_limit;
  };
  // Counts grow like q^(g/2); start just below the log-space estimate.
  const double estimate = 2.0 * log_limit / std::log(2.0 * d - 1.0);
  std::uint64_t g = estimate > 8 ? static_cast<std::uint64_t>(estimate) - 8 : 1;
  while (g > 1 && !fits(g)) --g;
  while (fits(g + 1)) ++g;
  return g;
}

/// Every bound for one parameter point.
struct BoundReport {
  std::uint64_t n = 0;
  int d = 2;
  double c = 0.0;
  std::uint64_t threshold_k = 0;
  std::uint64_t k = 0;  // word length the lemma and union bounds use
  std::optional<BoundValue> lemma;
  std::uint64_t lemma_m_used = 0;
  std::optional<QuarterMBound> quarter_m;
  std::optional<BoundValue> union_value;
  // union_value with the per-word bound 2·exp(-c n/k²) the lemma gives.
  std::optional<BoundValue> union_factor_2;
  // Constant c' with union_value = exp(-c' n^(1/3) log(2d-1)^(1/3)); not
  // the input c. Empty when the union bound is vacuous.
  std::optional<double> c_prime;
  std::optional<std::uint64_t> moore_upper;
};

/// k defaults to max(1, girth_threshold), m to max(1, floor(n/(4k²))).
/// Bounds whose preconditions fail for these parameters are left empty.
inline BoundReport make_bound_report(std::uint64_t n, int d, double c,
                                     std::optional<std::uint64_t> k = std::nullopt,
                                     std::optional<std::uint64_t> m = std::nullopt) {
  if (n < 1) throw InvalidParameters("n must be >= 1");
  BoundReport r;
  r.n = n;
  r.d = d;
  r.c = c;
  r.threshold_k = girth_threshold(static_cast<double>(n), d, c);
  r.k = k.value_or(std::max<std::uint64_t>(1, r.threshold_k));
  if (r.k < 1) throw InvalidParameters("k must be >= 1");
  r.lemma_m_used = m.value_or(std::max<std::uint64_t>(1, n / (4 * r.k * r.k)));
  if (r.lemma_m_used >= 1 && r.lemma_m_used * r.k < n) {
    r.lemma = lemma_bound(n, r.k, r.lemma_m_used);
  }
  if (n >= 4 * r.k * r.k) r.quarter_m = lemma_bound_quarter_m(n, r.k);
  r.union_value = union_bound(static_cast<double>(n), d, r.k, c);
  r.union_factor_2 = make_bound(2.0 * r.union_value->value);
  if (r.union_value->value < 1.0 && r.union_value->value > 0.0) {
    r.c_prime = -std::log(r.union_value->value) /
                (std::cbrt(static_cast<double>(n)) * std::cbrt(std::log(2.0 * d - 1.0)));
  }
  r.moore_upper = moore_girth_upper(n, d);
  return r;
}

}  // namespace cayley_girth
