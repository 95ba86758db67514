#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cayley_girth {

// Bad user-supplied value: malformed word, point out of range, size mismatch.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numeric parameters that violate an operation's precondition (e.g. mk >= n).
class InvalidParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The generator set S has fewer than 2d distinct elements.
class DegenerateGenerators : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A configured resource cap (enumeration size, brute-force tuple count,
// search memory) would be exceeded.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationTooLarge : public ResourceLimit {
 public:
  using ResourceLimit::ResourceLimit;
};

// Girth search ran out of its entry budget. Everything up to
// `lower_bound()` has been checked: the girth is strictly greater.
class SearchAborted : public ResourceLimit {
 public:
  SearchAborted(const std::string& what, std::uint32_t lower_bound)
      : ResourceLimit(what), lower_bound_(lower_bound) {}

  std::uint32_t lower_bound() const noexcept { return lower_bound_; }

 private:
  std::uint32_t lower_bound_;
};

}  // namespace cayley_girth
