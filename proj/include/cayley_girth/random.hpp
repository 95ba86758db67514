#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace cayley_girth {

/// Engine used by every experiment. Any 64-bit URBG works with the helpers
/// below; this alias fixes the one the CLI and experiment drivers use so
/// seeded output is reproducible.
using Rng = std::mt19937_64;

/// Unbiased integer in [0, bound) by rejection. `bound` must be positive.
///
/// std::uniform_int_distribution is unbiased too, but its algorithm is
/// implementation-defined; this one gives the same stream everywhere.
template <typename Engine>
std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  static_assert(Engine::min() == 0 &&
                    Engine::max() == std::numeric_limits<std::uint64_t>::max(),
                "uniform_below needs a full-range 64-bit engine");
  // 2^64 mod bound: values below this threshold would bias the residue.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the `index`-th independent stream under a master seed. Streams
/// are indexed by work item, never by thread, so results do not depend on
/// scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(derive_seed(master, index));
}

}  // namespace cayley_girth
