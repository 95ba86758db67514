#pragma once

#include <cstdint>
#include <string>

#include <boost/rational.hpp>

namespace cayley_girth {

/// Exact probabilities. Every denominator in this library is bounded by the
/// brute-force tuple cap or a short product of 1/(n - j) factors, so 64 bits
/// suffice.
using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

}  // namespace cayley_girth
