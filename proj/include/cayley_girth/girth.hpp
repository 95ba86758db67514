#pragma once

// Girth of Cay(S_n, S) for S = {π_1^±1, ..., π_d^±1}.
//
// When the 2d elements of S are distinct, the girth equals the length of
// the shortest nontrivial reduced word w with w(π) = 1. girth_exact finds
// it by growing, level by level, a table from permutation to the shortlex
// least reduced word evaluating to it. Two distinct reduced words u, v with
// the same value give the relator u v^-1. Once every word of length <= L is
// in the table, every relator of length <= 2L has produced a collision.
//
// Past the memory budget the table stops growing and longer words are only
// looked up, never stored. Any cyclically reduced relator has a rotation,
// possibly of its inverse, that starts with the lowercase letter of its
// smallest generator and uses no smaller generator; writing that rotation
// as u v^-1 with |v| <= L, only such prefixes u need to be probed. With the
// table at depth L, probing to depth j covers every relator of length
// <= L + j.
//
// girth_naive_graph builds the whole Cayley graph and runs BFS; it is the
// independent check for small n.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <new>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#if defined(__linux__)
#include <sys/mman.h>
#endif

#include "cayley_girth/bounds.hpp"
#include "cayley_girth/errors.hpp"
#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/parallel.hpp"
#include "cayley_girth/perm.hpp"
#include "cayley_girth/random.hpp"

namespace cayley_girth {

struct GeneratorCheck {
  bool distinct = true;
  std::string diagnostic;  // empty when distinct
};

/// True iff π_1, π_1^-1, ..., π_d, π_d^-1 are 2d distinct permutations.
inline GeneratorCheck check_generators_distinct(const GeneratorTuple& t) {
  std::vector<Letter> alphabet;
  for (int g = 1; g <= t.d(); ++g) {
    alphabet.push_back({g, false});
    alphabet.push_back({g, true});
  }
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    for (std::size_t j = i + 1; j < alphabet.size(); ++j) {
      if (t[alphabet[i]] == t[alphabet[j]]) {
        std::string why;
        if (alphabet[i].generator == alphabet[j].generator) {
          why = std::string("generator ") + to_char(alphabet[i]) +
                " is the identity or an involution";
        } else {
          why = std::string("generator elements ") + to_char(alphabet[i]) +
                " and " + to_char(alphabet[j]) + " coincide";
        }
        return {false, why};
      }
    }
  }
  return {};
}

enum class GirthStatus {
  found,          // girth is exact
  exceeds_max_k,  // no relator of length <= max_k
  aborted,        // a budget ran out; only lower_bound is known
};

inline std::string_view to_string(GirthStatus s) {
  switch (s) {
    case GirthStatus::found: return "found";
    case GirthStatus::exceeds_max_k: return "exceeds_max_k";
    case GirthStatus::aborted: return "aborted";
  }
  return "unknown";
}

struct GirthResult {
  GirthStatus status = GirthStatus::found;
  std::optional<std::uint32_t> girth;
  std::optional<Word> witness;  // canonical representative, |witness| = girth
  std::uint32_t lower_bound = 0;  // verified: girth > lower_bound
  bool degenerate = false;
  std::uint64_t entries = 0;  // table size when the search stopped
  std::uint64_t probes = 0;   // words looked up without being stored
};

inline constexpr std::uint32_t kDefaultMaxK = 64;
inline constexpr std::uint64_t kDefaultSearchBytes = std::uint64_t{2} << 30;

struct GirthSearchOptions {
  // Table entries allowed. 0 means "derive from kDefaultSearchBytes and n".
  std::uint64_t max_entries = 0;
  // Letter applications allowed once the table is full. 0 means
  // kProbeFactor times the table budget.
  std::uint64_t max_probes = 0;
};

inline constexpr std::uint64_t kProbeFactor = 8;

inline std::size_t girth_cell_bytes(std::size_t n) {
  return n <= 256 ? 1 : n <= 65536 ? 2 : 4;
}

inline std::uint64_t default_max_entries(std::size_t n) {
  // Image row, an 8-byte node record and two 8-byte hash slots.
  const std::uint64_t per_entry = n * girth_cell_bytes(n) + 24;
  return kDefaultSearchBytes / per_entry;
}

namespace detail {

// Large search arrays are accessed at random; on Linux they are backed by
// transparent huge pages where available, which cuts TLB misses.
template <typename T>
struct HugePageAllocator {
  using value_type = T;
  static constexpr std::size_t kHuge = std::size_t{2} << 20;

  HugePageAllocator() = default;
  template <typename U>
  HugePageAllocator(const HugePageAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    const std::size_t bytes = count * sizeof(T);
    if (bytes < kHuge) return static_cast<T*>(::operator new(bytes));
    const std::size_t rounded = (bytes + kHuge - 1) / kHuge * kHuge;
    void* p = std::aligned_alloc(kHuge, rounded);
    if (p == nullptr) throw std::bad_alloc();
#if defined(__linux__) && defined(MADV_HUGEPAGE)
    ::madvise(p, rounded, MADV_HUGEPAGE);
#endif
    return static_cast<T*>(p);
  }

  void deallocate(T* p, std::size_t count) noexcept {
    if (count * sizeof(T) < kHuge) {
      ::operator delete(p);
    } else {
      std::free(p);
    }
  }

  template <typename U>
  bool operator==(const HugePageAllocator<U>&) const noexcept { return true; }
};

template <typename T>
using SearchVector = std::vector<T, HugePageAllocator<T>>;

template <typename Cell>
class RelatorSearch {
 public:
  RelatorSearch(const GeneratorTuple& t, std::uint64_t max_entries,
                std::uint64_t max_probes)
      : t_(t), n_(t.n()), max_entries_(max_entries), max_probes_(max_probes) {
    for (int g = 1; g <= t.d(); ++g) {
      for (bool inv : {false, true}) {
        const Letter l{g, inv};
        alphabet_.push_back(l);
        std::vector<Cell> table(n_);
        for (std::size_t x = 0; x < n_; ++x) {
          table[x] = static_cast<Cell>(t[l](static_cast<Point>(x + 1)) - 1);
        }
        letter_tables_.push_back(std::move(table));
      }
    }
    // Level 1 is always stored so that probing has somewhere to start.
    max_entries_ = std::max<std::uint64_t>(max_entries_, 1 + alphabet_.size());
  }

  GirthResult run(std::uint32_t max_k) {
    reserve(1);
    rows_.resize(n_);
    for (std::size_t x = 0; x < n_; ++x) rows_[x] = static_cast<Cell>(x);
    nodes_.push_back({kNoParent, 0, 0, 0});
    insert_slot(0, hash_row(row(0)));

    const std::size_t branching = alphabet_.size() - 1;
    std::size_t level_begin = 0;
    std::size_t level_end = 1;
    std::uint32_t depth = 0;  // deepest stored level
    std::uint32_t covered = 0;
    for (;;) {
      if (auto done = check(covered, max_k)) return *done;
      const std::uint64_t width = level_end - level_begin;
      const std::uint64_t next_width = depth == 0 ? alphabet_.size() : width * branching;
      if (nodes_.size() + next_width > max_entries_) break;

      reserve(nodes_.size() + next_width);
      for (std::size_t u = level_begin; u < level_end; ++u) {
        for (std::uint8_t s = 0; s < alphabet_.size(); ++s) {
          if (nodes_[u].parent != kNoParent && s == inverse_slot(nodes_[u].letter)) {
            continue;
          }
          extend(u, s);
        }
      }
      level_begin = level_end;
      level_end = nodes_.size();
      ++depth;
      covered = 2 * depth;
      if (auto done = check(covered, max_k)) return *done;
      if (level_begin == level_end) return exceeded(covered);

      // Odd lengths one level early, without storing anything.
      probe(level_begin, level_end, depth + 1, covered);
      covered = 2 * depth + 1;
    }

    // Table full: probe deeper and deeper.
    for (std::uint32_t j = depth + 2;; ++j) {
      if (auto done = check(covered, max_k)) return *done;
      probe(level_begin, level_end, j, covered);
      covered = depth + j;
    }
  }

 private:
  static constexpr std::uint32_t kNoParent = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    std::uint32_t parent;
    std::uint8_t letter;  // slot in alphabet_ of the last letter
    std::uint8_t first;   // slot of the first letter
    std::uint8_t low;     // smallest generator used, 1-based
  };

  std::optional<GirthResult> check(std::uint32_t covered, std::uint32_t max_k) const {
    if (best_ && best_->size() <= covered) {
      const auto girth = static_cast<std::uint32_t>(best_->size());
      if (girth <= max_k) return finish(girth);
      return exceeded(girth - 1);
    }
    if (covered >= max_k) return exceeded(covered);
    return std::nullopt;
  }

  const Cell* row(std::size_t id) const { return rows_.data() + id * n_; }

  std::uint64_t hash_row(const Cell* r) const {
    const auto* bytes = reinterpret_cast<const unsigned char*>(r);
    const std::size_t len = n_ * sizeof(Cell);
    std::uint64_t h = len;
    std::size_t i = 0;
    for (; i + 8 <= len; i += 8) {
      std::uint64_t w;
      std::memcpy(&w, bytes + i, 8);
      h = mix64(h ^ w);
    }
    std::uint64_t w = 0;
    std::memcpy(&w, bytes + i, len - i);
    return mix64(h ^ w);
  }

  // Slots hold (hash high bits << 32) | (id + 1); zero is empty.
  void insert_slot(std::uint32_t id, std::uint64_t h) {
    std::size_t i = h & mask_;
    while (slots_[i] != 0) i = (i + 1) & mask_;
    slots_[i] = (h & 0xffffffff00000000ULL) | (std::uint64_t{id} + 1);
  }

  std::optional<std::uint32_t> find(const Cell* r, std::uint64_t h) const {
    const std::uint64_t tag = h & 0xffffffff00000000ULL;
    for (std::size_t i = h & mask_; slots_[i] != 0; i = (i + 1) & mask_) {
      if ((slots_[i] & 0xffffffff00000000ULL) != tag) continue;
      const auto id = static_cast<std::uint32_t>((slots_[i] & 0xffffffffULL) - 1);
      if (std::memcmp(row(id), r, n_ * sizeof(Cell)) == 0) return id;
    }
    return std::nullopt;
  }

  // Room for `entries` nodes without reallocation; the hash table is kept
  // at most half full.
  void reserve(std::uint64_t entries) {
    rows_.reserve(entries * n_);
    nodes_.reserve(entries);
    std::size_t want = 16;
    while (want < 2 * entries) want <<= 1;
    if (want <= slots_.size()) return;
    slots_.assign(want, 0);
    mask_ = want - 1;
    for (std::uint32_t id = 0; id < nodes_.size(); ++id) insert_slot(id, hash_row(row(id)));
  }

  static std::uint8_t inverse_slot(std::uint8_t slot) { return slot ^ 1; }

  // Appends letter `s` to word `u`. With left action, (u s)(x) = u(s(x)).
  void extend(std::size_t u, std::uint8_t s) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    rows_.resize(rows_.size() + n_);
    const Cell* parent_row = row(u);
    Cell* r = rows_.data() + static_cast<std::size_t>(id) * n_;
    const auto& table = letter_tables_[s];
    for (std::size_t x = 0; x < n_; ++x) r[x] = parent_row[table[x]];

    const std::uint64_t h = hash_row(r);
    if (auto other = find(r, h)) {
      rows_.resize(rows_.size() - n_);
      auto word = word_of(u);
      word.push_back(alphabet_[s]);
      record_collision(std::move(word), *other);
      return;
    }
    const Node& p = nodes_[u];
    const auto gen = static_cast<std::uint8_t>(alphabet_[s].generator);
    if (p.parent == kNoParent) {
      nodes_.push_back({static_cast<std::uint32_t>(u), s, s, gen});
    } else {
      nodes_.push_back({static_cast<std::uint32_t>(u), s, p.first, std::min(p.low, gen)});
    }
    insert_slot(id, h);
  }

  // Looks up every word of length `target` that extends a stored word of
  // the deepest level and starts with the lowercase letter of its smallest
  // generator. `covered` is only used to report a lower bound on abort.
  void probe(std::size_t level_begin, std::size_t level_end, std::uint32_t target,
             std::uint32_t covered) {
    std::uint32_t depth = 0;
    for (std::size_t v = level_begin; nodes_[v].parent != kNoParent; v = nodes_[v].parent) ++depth;
    const std::uint32_t extra = target - depth;
    std::vector<std::vector<Cell>> stack(extra + 1, std::vector<Cell>(n_));
    std::vector<std::uint8_t> letters(extra + 1);

    for (std::size_t u = level_begin; u < level_end; ++u) {
      const Node& node = nodes_[u];
      const Letter first = alphabet_[node.first];
      if (first.inverted || node.low != first.generator) continue;
      const int low = first.generator;
      // Alphabet slots 2(low-1) onward hold the generators >= low.
      const auto first_slot = static_cast<std::uint8_t>(2 * (low - 1));

      std::copy(row(u), row(u) + n_, stack[0].begin());
      letters[0] = nodes_[u].letter;
      // Iterative DFS; next[i] is the next alphabet slot to try at depth i.
      std::vector<std::uint8_t> next(extra + 1, first_slot);
      std::size_t level = 1;
      next[1] = first_slot;
      while (level >= 1) {
        if (next[level] >= alphabet_.size()) {
          --level;
          continue;
        }
        const std::uint8_t s = next[level]++;
        if (s == inverse_slot(letters[level - 1])) continue;
        if (++probes_ > max_probes_) {
          throw SearchAborted("girth search exceeded " + std::to_string(max_probes_) +
                                  " probes; girth > " + std::to_string(covered),
                              covered);
        }
        const auto& table = letter_tables_[s];
        const Cell* parent_row = stack[level - 1].data();
        Cell* r = stack[level].data();
        for (std::size_t x = 0; x < n_; ++x) r[x] = parent_row[table[x]];
        letters[level] = s;
        if (level < extra) {
          ++level;
          next[level] = first_slot;
          continue;
        }
        if (auto other = find(r, hash_row(r))) {
          auto word = word_of(u);
          for (std::size_t i = 1; i <= extra; ++i) word.push_back(alphabet_[letters[i]]);
          record_collision(std::move(word), *other);
        }
      }
    }
  }

  std::vector<Letter> word_of(std::size_t id) const {
    std::vector<Letter> out;
    for (std::size_t v = id; nodes_[v].parent != kNoParent; v = nodes_[v].parent) {
      out.push_back(alphabet_[nodes_[v].letter]);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  // `raw` and the stored word `other` evaluate to the same permutation.
  void record_collision(std::vector<Letter> raw, std::uint32_t other) {
    const auto v = word_of(other);
    for (auto it = v.rbegin(); it != v.rend(); ++it) raw.push_back(it->inverse());
    const Word relator = reduce(raw, t_.d());
    if (relator.empty()) {
      throw std::logic_error("girth search: collision of equal words");
    }
    // A conjugate of a relator is a relator, and no longer.
    const Word candidate = canonical_representative(cyclically_reduce(relator).core);
    if (!best_ || shortlex_less(candidate, *best_)) best_ = candidate;
  }

  GirthResult exceeded(std::uint32_t lower_bound) const {
    GirthResult r;
    r.status = GirthStatus::exceeds_max_k;
    r.lower_bound = lower_bound;
    r.entries = nodes_.size();
    r.probes = probes_;
    return r;
  }

  GirthResult finish(std::uint32_t girth) const {
    if (!word_is_identity(*best_, t_)) {
      throw std::logic_error("girth search: witness " + best_->to_string() +
                             " does not evaluate to the identity");
    }
    GirthResult r;
    r.status = GirthStatus::found;
    r.girth = girth;
    r.witness = best_;
    r.lower_bound = girth - 1;
    r.entries = nodes_.size();
    r.probes = probes_;
    return r;
  }

  const GeneratorTuple& t_;
  std::size_t n_;
  std::uint64_t max_entries_;
  std::uint64_t max_probes_;
  std::vector<Letter> alphabet_;             // a, A, b, B, ...
  std::vector<std::vector<Cell>> letter_tables_;
  SearchVector<Cell> rows_;                  // node i occupies [i n, (i+1) n)
  SearchVector<Node> nodes_;
  SearchVector<std::uint64_t> slots_;
  std::size_t mask_ = 0;
  std::optional<Word> best_;
  std::uint64_t probes_ = 0;
};

}  // namespace detail

/// Shortest nontrivial relator of t, searched up to length max_k.
/// Throws DegenerateGenerators if S has fewer than 2d elements and
/// SearchAborted (carrying the verified lower bound) when the probe budget
/// runs out.
inline GirthResult girth_exact(const GeneratorTuple& t, std::uint32_t max_k,
                               GirthSearchOptions options = {}) {
  if (max_k < 1) throw InvalidParameters("max_k must be >= 1");
  if (t.n() < 1) throw InvalidInput("empty generator tuple");
  const auto check = check_generators_distinct(t);
  if (!check.distinct) throw DegenerateGenerators(check.diagnostic);
  const std::uint64_t max_entries =
      options.max_entries != 0 ? options.max_entries : default_max_entries(t.n());
  if (max_entries > std::numeric_limits<std::uint32_t>::max() - 1) {
    throw InvalidParameters("max_entries exceeds the 32-bit node index");
  }
  const std::uint64_t max_probes =
      options.max_probes != 0 ? options.max_probes : kProbeFactor * max_entries;

  if (t.n() <= 256) {
    return detail::RelatorSearch<std::uint8_t>(t, max_entries, max_probes).run(max_k);
  }
  if (t.n() <= 65536) {
    return detail::RelatorSearch<std::uint16_t>(t, max_entries, max_probes).run(max_k);
  }
  return detail::RelatorSearch<std::uint32_t>(t, max_entries, max_probes).run(max_k);
}

inline constexpr std::size_t kNaiveGraphMaxN = 6;

/// Graph girth of the full Cayley graph (vertices S_n, g joined to g s) by
/// BFS. With `single_root` only the identity is used as a root, which is
/// exact because Cayley graphs are vertex-transitive; otherwise every
/// vertex is a root. Returns nullopt for an acyclic graph.
inline std::optional<std::uint32_t> girth_naive_graph(const GeneratorTuple& t,
                                                      bool single_root = false) {
  const std::size_t n = t.n();
  if (n > kNaiveGraphMaxN) {
    throw ResourceLimit("girth_naive_graph supports n <= " +
                        std::to_string(kNaiveGraphMaxN));
  }
  const auto check = check_generators_distinct(t);
  if (!check.distinct) throw DegenerateGenerators(check.diagnostic);

  std::vector<Permutation> vertices;
  std::map<std::vector<Point>, std::uint32_t> id;
  {
    std::vector<Point> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = static_cast<Point>(i + 1);
    do {
      id.emplace(row, static_cast<std::uint32_t>(vertices.size()));
      vertices.push_back(Permutation::from_images(row));
    } while (std::next_permutation(row.begin(), row.end()));
  }

  std::vector<Letter> alphabet;
  for (int g = 1; g <= t.d(); ++g) {
    alphabet.push_back({g, false});
    alphabet.push_back({g, true});
  }
  const std::size_t count = vertices.size();
  std::vector<std::vector<std::uint32_t>> adj(count);
  for (std::size_t v = 0; v < count; ++v) {
    for (Letter l : alphabet) {
      const auto gs = compose(vertices[v], t[l]);
      const auto images = gs.images();
      adj[v].push_back(id.at({images.begin(), images.end()}));
    }
  }

  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::optional<std::uint32_t> best;
  std::vector<std::uint32_t> dist(count);
  std::vector<std::uint32_t> parent(count);
  std::vector<std::uint32_t> queue;
  const std::size_t roots = single_root ? 1 : count;
  for (std::size_t root = 0; root < roots; ++root) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    queue.assign(1, static_cast<std::uint32_t>(root));
    dist[root] = 0;
    parent[root] = kUnseen;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (auto v : adj[u]) {
        if (dist[v] == kUnseen) {
          dist[v] = dist[u] + 1;
          parent[v] = u;
          queue.push_back(v);
        } else if (v != parent[u]) {
          const std::uint32_t cycle = dist[u] + dist[v] + 1;
          if (!best || cycle < *best) best = cycle;
        }
      }
    }
  }
  return best;
}

struct GirthSample {
  std::uint64_t index = 0;
  GeneratorTuple tuple;
  GirthResult result;
  std::uint64_t degenerate_skips = 0;  // tuples redrawn before this one
};

struct GirthExperiment {
  std::size_t n = 0;
  int d = 2;
  std::uint64_t samples = 0;
  std::uint32_t max_k = 0;
  std::uint64_t seed = 0;
  double c = 0.0;
  std::vector<GirthSample> results;

  std::uint64_t degenerate_skips = 0;
  std::map<std::uint32_t, std::uint64_t> histogram;  // exact girths only
  std::uint64_t exceeded = 0;
  std::uint64_t aborted = 0;
  std::uint64_t threshold_k = 0;
  std::uint64_t at_most_threshold = 0;
  // Searches that stopped with lower_bound < threshold_k, so it is not
  // known which side of the threshold they fall on.
  std::uint64_t undetermined = 0;
  std::optional<BoundValue> union_at_threshold;
  std::uint64_t moore_upper = 0;

  double fraction_at_most_threshold() const {
    return samples == 0 ? 0.0
                        : static_cast<double>(at_most_threshold) /
                              static_cast<double>(samples);
  }
};

/// Girths of `samples` independent uniform tuples. Sample i draws from
/// make_stream(seed, i), redrawing until the generators are distinct; the
/// outcome is independent of `threads`.
inline GirthExperiment girth_distribution_experiment(
    std::size_t n, int d, std::uint64_t samples, std::uint32_t max_k,
    std::uint64_t seed, unsigned threads = 0, double c = kDefaultC,
    GirthSearchOptions options = {}) {
  if (n < 1 || samples < 1 || max_k < 1) {
    throw InvalidParameters("girth experiment needs n, samples, max_k >= 1");
  }
  check_rank(d);
  if (n < 3) {
    // S_1 and S_2 have no 2d distinct elements for any d >= 1.
    throw InvalidParameters("girth experiment needs n >= 3");
  }

  GirthExperiment ex;
  ex.n = n;
  ex.d = d;
  ex.samples = samples;
  ex.max_k = max_k;
  ex.seed = seed;
  ex.c = c;
  ex.results.resize(samples);

  parallel_for_index(samples, threads, [&](std::size_t i) {
    auto rng = make_stream(seed, i);
    GirthSample& s = ex.results[i];
    s.index = i;
    for (;;) {
      s.tuple = random_tuple(n, d, rng);
      if (check_generators_distinct(s.tuple).distinct) break;
      ++s.degenerate_skips;
    }
    try {
      s.result = girth_exact(s.tuple, max_k, options);
    } catch (const SearchAborted& e) {
      s.result = GirthResult{};
      s.result.status = GirthStatus::aborted;
      s.result.lower_bound = e.lower_bound();
    }
  });

  ex.threshold_k = d >= 2 ? girth_threshold(static_cast<double>(n), d, c) : 0;
  if (ex.threshold_k >= 1) {
    ex.union_at_threshold = union_bound(static_cast<double>(n), d, ex.threshold_k, c);
  }
  ex.moore_upper = moore_girth_upper(n, d);
  for (const auto& s : ex.results) {
    ex.degenerate_skips += s.degenerate_skips;
    switch (s.result.status) {
      case GirthStatus::found:
        ++ex.histogram[*s.result.girth];
        if (*s.result.girth <= ex.threshold_k) ++ex.at_most_threshold;
        break;
      case GirthStatus::exceeds_max_k:
        ++ex.exceeded;
        if (s.result.lower_bound < ex.threshold_k) ++ex.undetermined;
        break;
      case GirthStatus::aborted:
        ++ex.aborted;
        if (s.result.lower_bound < ex.threshold_k) ++ex.undetermined;
        break;
    }
  }
  return ex;
}

}  // namespace cayley_girth
