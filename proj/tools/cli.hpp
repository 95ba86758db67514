#pragma once

// Command-line front end: parses an ExperimentConfig and dispatches it.
//
// Exit codes: 0 success, 2 invalid parameters, 3 resource cap, 1 anything
// else. Every JSON record carries the config that produced it.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cayley_girth/cayley_girth.hpp"
#include "cayley_girth/json.hpp"

namespace cayley_girth::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidParameters = 2,
  kResourceCap = 3,
};

struct ExperimentConfig {
  std::string subcommand;
  std::vector<std::uint64_t> n;  // several values only for `bounds`
  std::vector<int> d{2};
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> m;
  std::uint64_t samples = 1;
  std::uint64_t trials = 100000;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> word;
  std::uint32_t max_k = kDefaultMaxK;
  std::uint64_t max_entries = 0;
  std::uint64_t max_probes = 0;
  std::uint64_t cap = 0;
  double c = kDefaultC;
  bool exact = false;
  bool canonical = false;
  bool naive = false;
  std::vector<std::string> generators;  // cycle notation, girth only
  std::string format = "auto";
  std::string out;
  unsigned threads = 0;
};

inline Json config_json(const ExperimentConfig& cfg) {
  Json j{{"subcommand", cfg.subcommand}};
  const auto& s = cfg.subcommand;
  if (s == "bounds") {
    j["n"] = cfg.n;
    j["d"] = cfg.d;
    j["c"] = cfg.c;
    j["k"] = optional_json(cfg.k);
    j["m"] = optional_json(cfg.m);
    return j;
  }
  if (s == "enumerate") {
    j["d"] = cfg.d.front();
    j["k"] = optional_json(cfg.k);
    j["canonical"] = cfg.canonical;
    return j;
  }
  j["n"] = cfg.n.empty() ? Json(nullptr) : Json(cfg.n.front());
  if (s == "bugdemo") return j;
  j["d"] = cfg.d.front();
  if (s == "girth") {
    j["samples"] = cfg.samples;
    j["max_k"] = cfg.max_k;
    j["c"] = cfg.c;
    if (!cfg.generators.empty()) j["generators"] = cfg.generators;
  }
  if (s == "prob" || s == "lemma") {
    j["word"] = optional_json(cfg.word);
    if (s == "prob") j["exact"] = cfg.exact;
    if (s == "lemma") j["m"] = optional_json(cfg.m);
    if (!cfg.exact) j["trials"] = cfg.trials;
  }
  j["seed"] = optional_json(cfg.seed);
  return j;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameters(what);
}

inline std::uint64_t single_n(const ExperimentConfig& cfg) {
  require(cfg.n.size() == 1, cfg.subcommand + ": --n takes exactly one value");
  require(cfg.n.front() >= 1, "--n must be >= 1");
  return cfg.n.front();
}

inline std::string resolve_format(const ExperimentConfig& cfg,
                                  const std::string& fallback) {
  const std::string f = cfg.format == "auto" ? fallback : cfg.format;
  require(f == "json" || f == "csv" || f == "text",
          "--format must be json, csv or text");
  return f;
}

inline std::string tuple_cycles(const GeneratorTuple& t) {
  std::string s;
  for (const auto& p : t.generators()) {
    if (!s.empty()) s += ';';
    s += p.to_cycle_string();
  }
  return s;
}

inline Word parse_word(const ExperimentConfig& cfg) {
  require(cfg.word.has_value(), cfg.subcommand + ": --word is required");
  const int d = cfg.d.front();
  const Word w = Word::parse(*cfg.word, 0);
  require(w.rank() <= d, "word uses generators beyond --d " + std::to_string(d));
  return Word::parse(*cfg.word, d);
}

inline int run_girth(const ExperimentConfig& cfg, std::ostream& out) {
  const auto n = single_n(cfg);
  const int d = cfg.d.front();
  check_rank(d);
  require(cfg.max_k >= 1, "--max-k must be >= 1");
  const auto format = resolve_format(cfg, "json");
  const Json config = config_json(cfg);
  GirthSearchOptions options;
  options.max_entries = cfg.max_entries;
  options.max_probes = cfg.max_probes;

  if (!cfg.generators.empty()) {
    require(static_cast<int>(cfg.generators.size()) == d,
            "--gen must be given exactly d times");
    std::vector<Permutation> perms;
    for (const auto& g : cfg.generators) perms.push_back(parse_cycles(g, n));
    const GeneratorTuple t(std::move(perms));
    const auto result = girth_exact(t, cfg.max_k, options);
    std::optional<std::uint32_t> naive;
    if (cfg.naive) naive = girth_naive_graph(t);
    if (format == "json") {
      Json rec{{"config", config}, {"generators", t}, {"result", result}};
      if (cfg.naive) rec["naive_girth"] = optional_json(naive);
      out << rec.dump() << '\n';
    } else {
      out << "status,girth,lower_bound,witness,generators\n"
          << to_string(result.status) << ','
          << (result.girth ? std::to_string(*result.girth) : "") << ','
          << result.lower_bound << ','
          << (result.witness ? result.witness->to_string() : "") << ','
          << tuple_cycles(t) << '\n';
    }
    return kOk;
  }

  require(cfg.seed.has_value(), "girth: --seed is required for sampled experiments");
  require(cfg.samples >= 1, "--samples must be >= 1");
  const auto ex = girth_distribution_experiment(n, d, cfg.samples, cfg.max_k,
                                                *cfg.seed, cfg.threads, cfg.c, options);
  if (format == "json") {
    for (const auto& s : ex.results) {
      Json rec{{"config", config},
               {"sample", s.index},
               {"generators", s.tuple},
               {"degenerate_skips", s.degenerate_skips},
               {"result", s.result}};
      out << rec.dump() << '\n';
    }
    Json hist = Json::object();
    for (auto [g, count] : ex.histogram) hist[std::to_string(g)] = count;
    Json summary{{"histogram", hist},
                 {"exceeded", ex.exceeded},
                 {"aborted", ex.aborted},
                 {"degenerate_skips", ex.degenerate_skips},
                 {"threshold_k", ex.threshold_k},
                 {"at_most_threshold", ex.at_most_threshold},
                 {"fraction_at_most_threshold", ex.fraction_at_most_threshold()},
                 {"undetermined", ex.undetermined},
                 {"union_bound_at_threshold", optional_json(ex.union_at_threshold)},
                 {"moore_upper", ex.moore_upper}};
    out << Json{{"config", config}, {"summary", summary}}.dump() << '\n';
  } else {
    out << "sample,status,girth,lower_bound,witness,degenerate_skips,generators\n";
    for (const auto& s : ex.results) {
      out << s.index << ',' << to_string(s.result.status) << ','
          << (s.result.girth ? std::to_string(*s.result.girth) : "") << ','
          << s.result.lower_bound << ','
          << (s.result.witness ? s.result.witness->to_string() : "") << ','
          << s.degenerate_skips << ',' << tuple_cycles(s.tuple) << '\n';
    }
  }
  return kOk;
}

inline Json lemma_bound_values(std::uint64_t n, std::uint64_t k) {
  Json values = Json::array();
  for (std::uint64_t m = 1; m * k < n; ++m) {
    values.push_back(Json{{"m", m}, {"bound", lemma_bound(n, k, m)}});
  }
  Json out{{"lemma", values}};
  if (n >= 4 * k * k) out["quarter_m"] = lemma_bound_quarter_m(n, k);
  return out;
}

inline int run_prob(const ExperimentConfig& cfg, std::ostream& out) {
  const auto n = single_n(cfg);
  const Word w = parse_word(cfg);
  const Json config = config_json(cfg);

  if (cfg.exact) {
    const auto format = resolve_format(cfg, "text");
    const std::uint64_t cap = cfg.cap != 0 ? cfg.cap : kDefaultTupleCap;
    const auto p = exact_word_probability(w, n, cap, cfg.threads);
    if (format == "text") {
      out << to_string(p) << '\n';
    } else if (format == "json") {
      out << Json{{"config", config},
                  {"word", w},
                  {"n", n},
                  {"d", cfg.d.front()},
                  {"exact", rational_json(p)},
                  {"exact_value", to_double(p)}}
                 .dump()
          << '\n';
    } else {
      out << "word,n,d,exact,exact_value\n"
          << w.to_string() << ',' << n << ',' << cfg.d.front() << ','
          << to_string(p) << ',' << fmt_double(to_double(p)) << '\n';
    }
    return kOk;
  }

  require(cfg.seed.has_value(), "prob: --seed is required unless --exact");
  require(cfg.trials >= 1, "--trials must be >= 1");
  const auto format = resolve_format(cfg, "json");
  const auto est = estimate_word_probability(w, n, cfg.trials, *cfg.seed, cfg.threads);
  const Json bounds = w.empty() ? Json(nullptr) : lemma_bound_values(n, w.size());
  if (format == "csv") {
    out << "word,n,d,trials,successes,estimate,ci_low,ci_high\n"
        << w.to_string() << ',' << n << ',' << cfg.d.front() << ',' << est.trials
        << ',' << est.successes << ',' << fmt_double(est.estimate) << ','
        << fmt_double(est.ci_low) << ',' << fmt_double(est.ci_high) << '\n';
    return kOk;
  }
  out << Json{{"config", config},
              {"word", w},
              {"n", n},
              {"d", cfg.d.front()},
              {"m", nullptr},
              {"trials", est.trials},
              {"successes", est.successes},
              {"estimate", est.estimate},
              {"ci", {est.ci_low, est.ci_high}},
              {"bound_values", bounds}}
             .dump()
      << '\n';
  return kOk;
}

inline int run_lemma(const ExperimentConfig& cfg, std::ostream& out) {
  const auto n = single_n(cfg);
  const Word w = parse_word(cfg);
  require(cfg.m.has_value(), "lemma: --m is required");
  require(cfg.seed.has_value(), "lemma: --seed is required");
  require(cfg.trials >= 1, "--trials must be >= 1");
  const auto format = resolve_format(cfg, "json");
  const auto r = run_multipoint_experiment(w, n, *cfg.m, cfg.trials, *cfg.seed, cfg.threads);
  const auto bound = lemma_bound(n, w.size(), *cfg.m);
  if (format == "csv") {
    out << "word,n,m,trials,successes,estimate,ci_low,ci_high,lemma_bound\n"
        << w.to_string() << ',' << n << ',' << r.m << ',' << r.closure.trials << ','
        << r.closure.successes << ',' << fmt_double(r.closure.estimate) << ','
        << fmt_double(r.closure.ci_low) << ',' << fmt_double(r.closure.ci_high)
        << ',' << fmt_double(bound.value) << '\n';
    return kOk;
  }
  const Json per = r;
  out << Json{{"config", config_json(cfg)},
              {"word", w},
              {"n", n},
              {"d", cfg.d.front()},
              {"m", r.m},
              {"trials", r.closure.trials},
              {"successes", r.closure.successes},
              {"estimate", r.closure.estimate},
              {"ci", {r.closure.ci_low, r.closure.ci_high}},
              {"bound_values",
               {{"lemma", bound}, {"per_trajectory", per["per_trajectory"]}}}}
             .dump()
      << '\n';
  return kOk;
}

inline std::string opt_cell(const std::optional<BoundValue>& b) {
  if (!b) return "-";
  return fmt_double(b->value) + (b->vacuous ? "*" : "");
}

inline int run_bounds(const ExperimentConfig& cfg, std::ostream& out) {
  require(!cfg.n.empty(), "bounds: --n is required");
  const auto format = resolve_format(cfg, "text");
  std::vector<BoundReport> reports;
  for (int d : cfg.d) {
    for (auto n : cfg.n) reports.push_back(make_bound_report(n, d, cfg.c, cfg.k, cfg.m));
  }
  const Json config = config_json(cfg);
  if (format == "json") {
    for (const auto& r : reports) {
      out << Json{{"config", config}, {"report", r}}.dump() << '\n';
    }
  } else if (format == "csv") {
    out << "n,d,c,k,threshold_k,m,lemma,lemma_vacuous,quarter_m,quarter_value,union,"
           "union_vacuous,union_factor_2,c_prime,moore_upper\n";
    for (const auto& r : reports) {
      out << r.n << ',' << r.d << ',' << fmt_double(r.c) << ',' << r.k << ','
          << r.threshold_k << ',' << r.lemma_m_used << ','
          << (r.lemma ? fmt_double(r.lemma->value) : "") << ','
          << (r.lemma ? (r.lemma->vacuous ? "1" : "0") : "") << ','
          << (r.quarter_m ? std::to_string(r.quarter_m->m) : "") << ','
          << (r.quarter_m ? fmt_double(r.quarter_m->value) : "") << ','
          << fmt_double(r.union_value->value) << ','
          << (r.union_value->vacuous ? "1" : "0") << ','
          << fmt_double(r.union_factor_2->value) << ','
          << (r.c_prime ? fmt_double(*r.c_prime) : "") << ','
          << (r.moore_upper ? std::to_string(*r.moore_upper) : "") << '\n';
    }
  } else {
    char line[256];
    std::snprintf(line, sizeof line, "%10s %3s %5s %11s %4s %12s %12s %12s %12s %11s\n",
                  "n", "d", "k", "threshold_k", "m", "lemma", "quarter_m", "union",
                  "c_prime", "moore_upper");
    out << line;
    for (const auto& r : reports) {
      const std::string quarter =
          r.quarter_m ? fmt_double(r.quarter_m->value) + (r.quarter_m->vacuous ? "*" : "")
                    : "-";
      const std::string cp = r.c_prime ? fmt_double(*r.c_prime) : "-";
      std::snprintf(line, sizeof line,
                    "%10llu %3d %5llu %11llu %4llu %12s %12s %12s %12s %11s\n",
                    static_cast<unsigned long long>(r.n), r.d,
                    static_cast<unsigned long long>(r.k),
                    static_cast<unsigned long long>(r.threshold_k),
                    static_cast<unsigned long long>(r.lemma_m_used),
                    opt_cell(r.lemma).c_str(), quarter.c_str(),
                    opt_cell(r.union_value).c_str(), cp.c_str(),
                    r.moore_upper ? std::to_string(*r.moore_upper).c_str() : "-");
      out << line;
    }
    out << "(* = vacuous, value >= 1; c = " << fmt_double(cfg.c) << ")\n";
  }
  return kOk;
}

inline std::string letter_action(Letter l) {
  return std::string(1, to_char(l));
}

inline int run_bugdemo(const ExperimentConfig& cfg, std::ostream& out) {
  const std::uint64_t n = cfg.n.empty() ? 7 : single_n(cfg);
  const auto format = resolve_format(cfg, "text");
  const auto report = demonstrate_conditional_violation(n);
  if (format == "json") {
    out << Json{{"config", config_json(cfg)}, {"report", report}}.dump() << '\n';
    return kOk;
  }
  require(format == "text", "bugdemo supports text and json output");
  const auto ce = construct_counterexample(n);
  out << "word w = " << report.word.to_string()
      << " (rightmost letter acts first), n = " << n << "\n";
  out << "tuple: a = " << ce.tuple.generator(1).to_cycle_string()
      << ", b = " << ce.tuple.generator(2).to_cycle_string() << "\n";
  out << "trajectory of " << report.start << ":";
  for (std::size_t i = 0; i < ce.trajectory.points.size(); ++i) {
    if (i > 0) out << " -" << letter_action(ce.trajectory.letters[i - 1]) << "->";
    out << ' ' << ce.trajectory.points[i];
  }
  out << "\n\n";
  for (const auto& s : report.steps) {
    out << "step " << s.j << ": " << letter_action(s.letter) << " at " << s.from
        << " -> " << s.to << (s.determined ? "  [determined]" : "  [fresh draw]")
        << "\n  law of next point:";
    if (s.distribution.size() > 8) {
      out << " uniform over " << s.distribution.size() << " points, each "
          << to_string(s.distribution.begin()->second);
    } else {
      for (const auto& [y, p] : s.distribution) out << ' ' << y << ':' << to_string(p);
    }
    out << "\n  revealed:";
    for (const auto& [g, x, y] : s.revealed_after) {
      out << ' ' << to_char(Letter{g, false}) << '(' << x << ")=" << y;
    }
    out << '\n';
  }
  out << "\nfirst return to " << report.start << " by a letter other than w_1^-1 = "
      << letter_action(report.word.applied(1).inverse()) << ": step "
      << report.first_qualifying << '\n';
  out << "fresh first step: P(return) = " << to_string(report.fresh_step_probability)
      << " (bound holds here)\n";
  out << "claimed bound 1/(n-j+1) = " << to_string(report.claimed_bound) << " = "
      << fmt_double(to_double(report.claimed_bound)) << '\n';
  out << "true conditional probability = " << to_string(report.true_probability) << '\n';
  out << (report.violated() ? "VIOLATED" : "not violated")
      << ": gap = " << fmt_double(report.gap()) << '\n';
  return kOk;
}

inline int run_enumerate(const ExperimentConfig& cfg, std::ostream& out) {
  require(cfg.k.has_value(), "enumerate: --k is required");
  const int d = cfg.d.front();
  const auto format = resolve_format(cfg, "text");
  const std::uint64_t cap = cfg.cap != 0 ? cfg.cap : kDefaultEnumerationCap;
  std::vector<Word> words;
  for_each_reduced(d, static_cast<int>(*cfg.k), [&](Word w) {
    if (cfg.canonical) {
      if (!is_cyclically_reduced(w) || !(canonical_representative(w) == w)) return;
    }
    words.push_back(std::move(w));
  }, cap);
  if (format == "json") {
    out << Json{{"config", config_json(cfg)},
                {"count", words.size()},
                {"words", words}}
               .dump()
        << '\n';
  } else {
    if (format == "csv") out << "word,length\n";
    for (const auto& w : words) {
      out << w.to_string();
      if (format == "csv") out << ',' << w.size();
      out << '\n';
    }
  }
  return kOk;
}

}  // namespace detail

/// Dispatches a validated config. Throws the library's exceptions; see
/// `main_entry` for how they map to exit codes.
inline int run(const ExperimentConfig& cfg, std::ostream& out) {
  for (int d : cfg.d) check_rank(d);
  if (cfg.subcommand == "girth") return detail::run_girth(cfg, out);
  if (cfg.subcommand == "prob") return detail::run_prob(cfg, out);
  if (cfg.subcommand == "lemma") return detail::run_lemma(cfg, out);
  if (cfg.subcommand == "bounds") return detail::run_bounds(cfg, out);
  if (cfg.subcommand == "bugdemo") return detail::run_bugdemo(cfg, out);
  if (cfg.subcommand == "enumerate") return detail::run_enumerate(cfg, out);
  throw InvalidParameters("unknown subcommand '" + cfg.subcommand + "'");
}

/// Parses argv, runs, and maps errors to exit codes with a one-line
/// diagnostic on `err`.
inline int main_entry(int argc, const char* const* argv, std::ostream& out,
                      std::ostream& err) {
  CLI::App app{"Girth of random Cayley graphs of symmetric groups"};
  app.require_subcommand(1);
  ExperimentConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json, csv or text")
        ->check(CLI::IsMember({"auto", "json", "csv", "text"}));
    sub->add_option("--out", cfg.out, "write output to this file");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  };

  auto* girth = app.add_subcommand("girth", "girths of random or given generator tuples");
  girth->add_option("--n", cfg.n, "degree")->required()->expected(1);
  girth->add_option("--d", cfg.d, "number of generators")->expected(1);
  girth->add_option("--samples", cfg.samples, "number of random tuples");
  girth->add_option("--max-k", cfg.max_k, "longest relator searched for");
  girth->add_option("--max-entries", cfg.max_entries, "search table budget (0 = ~2 GiB)");
  girth->add_option("--max-probes", cfg.max_probes,
                    "letter applications after the table fills (0 = 8x table)");
  girth->add_option("--seed", cfg.seed, "master seed");
  girth->add_option("--c", cfg.c, "constant in the threshold k");
  girth->add_option("--gen", cfg.generators, "generator in cycle notation (repeat d times)");
  girth->add_flag("--naive", cfg.naive, "also run the whole-graph BFS (n <= 6)");
  add_common(girth);

  auto* prob = app.add_subcommand("prob", "P(w = 1) for uniform random generators");
  prob->add_option("--word", cfg.word, "word in a/A notation")->required();
  prob->add_option("--n", cfg.n, "degree")->required()->expected(1);
  prob->add_option("--d", cfg.d, "rank (default: 2)")->expected(1);
  prob->add_flag("--exact", cfg.exact, "brute force over all tuples");
  prob->add_option("--trials", cfg.trials, "Monte Carlo trials");
  prob->add_option("--seed", cfg.seed, "master seed");
  prob->add_option("--cap", cfg.cap, "largest tuple count for --exact");
  add_common(prob);

  auto* lemma = app.add_subcommand("lemma", "m-trajectory revelation experiment");
  lemma->add_option("--word", cfg.word, "word in a/A notation")->required();
  lemma->add_option("--n", cfg.n, "degree")->required()->expected(1);
  lemma->add_option("--d", cfg.d, "rank (default: 2)")->expected(1);
  lemma->add_option("--m", cfg.m, "number of trajectories")->required();
  lemma->add_option("--trials", cfg.trials, "Monte Carlo trials");
  lemma->add_option("--seed", cfg.seed, "master seed");
  add_common(lemma);

  auto* bounds = app.add_subcommand("bounds", "table of closed-form bounds");
  bounds->add_option("--n", cfg.n, "degrees (comma separated)")->required()->delimiter(',');
  bounds->add_option("--d", cfg.d, "ranks (comma separated)")->delimiter(',');
  bounds->add_option("--k", cfg.k, "word length (default: threshold)");
  bounds->add_option("--m", cfg.m, "trajectory count (default: n/(4k^2))");
  bounds->add_option("--c", cfg.c, "constant c");
  add_common(bounds);

  auto* bug = app.add_subcommand("bugdemo", "replay the first-return counterexample");
  bug->add_option("--n", cfg.n, "degree (>= 7)")->expected(1);
  add_common(bug);

  auto* enumerate = app.add_subcommand("enumerate", "list reduced words");
  enumerate->add_option("--d", cfg.d, "rank")->expected(1);
  enumerate->add_option("--k", cfg.k, "maximum length")->required();
  enumerate->add_option("--cap", cfg.cap, "largest enumeration allowed");
  enumerate->add_flag("--canonical", cfg.canonical,
                      "only canonical cyclically reduced representatives");
  add_common(enumerate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidParameters;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    if (cfg.out.empty()) return run(cfg, out);
    std::ostringstream buffer;
    const int code = run(cfg, buffer);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open " + cfg.out);
    file << buffer.str();
    return code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidParameters;
  } catch (const ResourceLimit& e) {
    err << "error: resource cap: " << e.what() << '\n';
    return kResourceCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace cayley_girth::cli
