#pragma once

// JSON encodings. Words are a/A strings, permutations are 1-based image
// arrays, exact rationals are "p/q" strings.

#include <nlohmann/json.hpp>

#include "cayley_girth/bounds.hpp"
#include "cayley_girth/bugdemo.hpp"
#include "cayley_girth/exposure.hpp"
#include "cayley_girth/freegroup.hpp"
#include "cayley_girth/girth.hpp"
#include "cayley_girth/perm.hpp"
#include "cayley_girth/rational.hpp"

namespace cayley_girth {

using Json = nlohmann::ordered_json;

inline void to_json(Json& j, const Word& w) { j = w.to_string(); }

inline void to_json(Json& j, const Letter& l) { j = std::string(1, to_char(l)); }

inline void to_json(Json& j, const Permutation& p) {
  j = Json::array();
  for (Point y : p.images()) j.push_back(y);
}

inline Permutation permutation_from_json(const Json& j) {
  return Permutation::from_images(j.get<std::vector<Point>>());
}

inline void to_json(Json& j, const GeneratorTuple& t) {
  j = Json::array();
  for (const auto& p : t.generators()) j.push_back(p);
}

inline GeneratorTuple tuple_from_json(const Json& j) {
  std::vector<Permutation> perms;
  for (const auto& p : j) perms.push_back(permutation_from_json(p));
  return GeneratorTuple(std::move(perms));
}

inline Json rational_json(const Rational& r) { return to_string(r); }

inline void to_json(Json& j, const Trajectory& t) {
  j = Json{{"points", t.points}, {"letters", t.letters}};
  if (!t.revealed.empty()) {
    std::vector<bool> flags(t.revealed.begin(), t.revealed.end());
    j["revealed"] = flags;
  }
}

inline void to_json(Json& j, const ProbabilityEstimate& e) {
  j = Json{{"successes", e.successes},
           {"trials", e.trials},
           {"estimate", e.estimate},
           {"ci", {e.ci_low, e.ci_high}}};
}

inline void to_json(Json& j, const BoundValue& b) {
  j = Json{{"value", b.value}, {"vacuous", b.vacuous}};
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline void to_json(Json& j, const QuarterMBound& b) {
  j = Json{{"m", b.m},
           {"value", b.value},
           {"vacuous", b.vacuous},
           {"lemma_at_m", b.lemma_at_m}};
}

inline void to_json(Json& j, const BoundReport& r) {
  j = Json{{"n", r.n},
           {"d", r.d},
           {"c", r.c},
           {"k", r.k},
           {"threshold_k", r.threshold_k},
           {"lemma_m_used", r.lemma_m_used},
           {"lemma", optional_json(r.lemma)},
           {"quarter_m", optional_json(r.quarter_m)},
           {"union", optional_json(r.union_value)},
           {"union_factor_2", optional_json(r.union_factor_2)},
           {"c_prime", optional_json(r.c_prime)},
           {"moore_upper", optional_json(r.moore_upper)}};
}

inline void to_json(Json& j, const GirthResult& r) {
  j = Json{{"status", std::string(to_string(r.status))},
           {"girth", optional_json(r.girth)},
           {"witness", optional_json(r.witness)},
           {"lower_bound", r.lower_bound},
           {"degenerate", r.degenerate},
           {"entries", r.entries},
           {"probes", r.probes}};
}

inline void to_json(Json& j, const MultipointResult& r) {
  Json per = Json::array();
  for (std::size_t i = 0; i < r.m; ++i) {
    per.push_back(Json{{"trajectory", i + 1},
                       {"attempts", r.attempts[i]},
                       {"failures", r.failures[i]},
                       {"failure_rate", r.failure_rate(i)},
                       {"bound", trajectory_failure_bound(r.n, r.k, i + 1)}});
  }
  j = Json{{"closure", r.closure}, {"per_trajectory", per}};
}

inline void to_json(Json& j, const ReturnAnalysis& a) {
  j = Json{{"word", a.word},
           {"tuple", a.tuple},
           {"start", a.start},
           {"trajectory", a.trajectory},
           {"qualifying_indices", a.qualifying_indices},
           {"first_qualifying", a.first_qualifying},
           {"determined_at_first", a.determined_at_first}};
}

inline Json distribution_json(const std::map<Point, Rational>& dist) {
  Json out = Json::object();
  for (const auto& [y, p] : dist) out[std::to_string(y)] = to_string(p);
  return out;
}

inline void to_json(Json& j, const ConditionalViolationReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json revealed = Json::array();
    for (const auto& [g, x, y] : s.revealed_after) {
      revealed.push_back(Json{{"generator", std::string(1, to_char(Letter{g, false}))},
                              {"point", x},
                              {"image", y}});
    }
    steps.push_back(Json{{"j", s.j},
                         {"letter", s.letter},
                         {"from", s.from},
                         {"to", s.to},
                         {"determined", s.determined},
                         {"distribution", distribution_json(s.distribution)},
                         {"revealed", revealed}});
  }
  j = Json{{"n", r.n},
           {"word", r.word},
           {"start", r.start},
           {"steps", steps},
           {"first_qualifying", r.first_qualifying},
           {"claimed_bound", rational_json(r.claimed_bound)},
           {"claimed_bound_value", to_double(r.claimed_bound)},
           {"true_probability", rational_json(r.true_probability)},
           {"gap", r.gap()},
           {"violated", r.violated()},
           {"fresh_step_probability", rational_json(r.fresh_step_probability)}};
}

}  // namespace cayley_girth
