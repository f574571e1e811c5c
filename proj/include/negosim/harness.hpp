#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fmt/format.h"
#include "negosim/fair_case.hpp"
#include "negosim/oracle.hpp"
#include "negosim/protocol.hpp"
#include "negosim/scenario.hpp"
#include "negosim/scenario_io.hpp"
#include "negosim/strategies.hpp"

namespace negosim {

// ---------------------------------------------------------------------------
// Strategy specs: "name[:key=value,...]", e.g. "es:M=5,n_cross=4" or "nes:P=64".

enum class StrategyKind { Es, Nes, Full, FairBuyer, FairSeller };

struct StrategySpec {
  StrategyKind kind = StrategyKind::Es;
  StrategyConfig strategy;
  GaConfig ga;
  bool budget_parity = true;  // NES only: grow |P| to the ES sample budget
  std::string text;

  StrategySpec() { ga.population_size = 128; }
};

inline const char* strategy_kind_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Es: return "es";
    case StrategyKind::Nes: return "nes";
    case StrategyKind::Full: return "full";
    case StrategyKind::FairBuyer: return "fair-buyer";
    case StrategyKind::FairSeller: return "fair-seller";
  }
  return "?";
}

namespace detail {

// Accepts plain decimals and simple fractions such as 1/3.
inline double parse_number(std::string_view s, std::string_view key) {
  auto one = [&](std::string_view t) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
      throw ConfigError(fmt::format("strategy parameter {}: '{}' is not a number", key, s));
    return v;
  };
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const double den = one(s.substr(slash + 1));
    if (den == 0.0) throw ConfigError(fmt::format("strategy parameter {}: division by zero", key));
    return one(s.substr(0, slash)) / den;
  }
  return one(s);
}

inline int parse_int(std::string_view s, std::string_view key) {
  const double v = parse_number(s, key);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError(fmt::format("strategy parameter {}: '{}' is not an integer", key, s));
  return static_cast<int>(v);
}

}  // namespace detail

inline StrategySpec parse_strategy(std::string_view text) {
  StrategySpec spec;
  spec.text = std::string(text);
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  if (name == "es") spec.kind = StrategyKind::Es;
  else if (name == "nes") spec.kind = StrategyKind::Nes;
  else if (name == "full") spec.kind = StrategyKind::Full;
  else if (name == "fair-buyer") spec.kind = StrategyKind::FairBuyer;
  else if (name == "fair-seller") spec.kind = StrategyKind::FairSeller;
  else throw ConfigError(fmt::format("unknown strategy '{}' (expected es, nes, full, fair-buyer or fair-seller)", name));

  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError(fmt::format("strategy parameter '{}' lacks '='", item));
    const std::string_view key = item.substr(0, eq), value = item.substr(eq + 1);
    StrategyConfig& s = spec.strategy;
    if (key == "T") s.deadline = detail::parse_int(value, key);
    else if (key == "RU") s.reservation_utility = detail::parse_number(value, key);
    else if (key == "delta") s.delta = detail::parse_number(value, key);
    else if (key == "M") s.similar_count = detail::parse_int(value, key);
    else if (key == "n_cross") s.n_cross = detail::parse_int(value, key);
    else if (key == "n_mut") s.n_mut = detail::parse_int(value, key);
    else if (key == "p_attr") s.p_attr = detail::parse_number(value, key);
    else if (key == "p_pevo") s.p_pevo = detail::parse_number(value, key);
    else if (key == "P") spec.ga.population_size = detail::parse_int(value, key);
    else if (key == "n_max") spec.ga.max_generations = detail::parse_int(value, key);
    else if (key == "p_dc") spec.ga.p_dc = detail::parse_number(value, key);
    else if (key == "p_cr") spec.ga.p_cr = detail::parse_number(value, key);
    else if (key == "parity") spec.budget_parity = detail::parse_int(value, key) != 0;
    else throw ConfigError(fmt::format("unknown strategy parameter '{}'", key));
  }
  spec.strategy.validate();
  spec.ga.validate();
  return spec;
}

struct BuiltAgent {
  std::unique_ptr<Agent> agent;
  int population_size = 0;  // self-sampled offers, 0 for the full-curve model
};

// population_override replaces |P| (used for NES budget parity).
inline BuiltAgent build_agent(const StrategySpec& spec, const WeightedConstraintUtility& u, int k, std::uint64_t seed,
                              std::optional<int> population_override = std::nullopt,
                              std::shared_ptr<const UtilityIndex> index = nullptr) {
  StrategyConfig s = spec.strategy;
  s.k = k;
  s.seed = derive_seed(seed, {2});
  GaConfig ga = spec.ga;
  ga.seed = derive_seed(seed, {1});
  if (population_override) ga.population_size = *population_override;
  switch (spec.kind) {
    case StrategyKind::Es: return {make_es_agent(u, ga, s), ga.population_size};
    case StrategyKind::Nes: return {make_nes_agent(u, ga, s), ga.population_size};
    case StrategyKind::Full: return {make_full_curve_agent(u, s, std::move(index)), 0};
    case StrategyKind::FairBuyer:
      if (!(u == fair_case::buyer())) throw ConfigError("fair-buyer only plays the fair-case buyer utility");
      if (k != fair_case::strategy().k) throw ConfigError("fair-buyer requires k = 2");
      return {fair_case::make_buyer_agent(seed), 16};
    case StrategyKind::FairSeller:
      if (!(u == fair_case::seller())) throw ConfigError("fair-seller only plays the fair-case seller utility");
      return {fair_case::make_seller_agent(), 0};
  }
  throw ConfigError("unhandled strategy kind");
}

// NES population matching the ES sample budget over mean_rounds rounds.
inline int parity_population(const StrategySpec& spec, int k, double mean_rounds) {
  const StrategyConfig& s = spec.strategy;
  const double per_round =
      static_cast<double>(samples_evo_closed_form(1, k, s.similar_count, s.n_cross, s.n_mut));
  long p = spec.ga.population_size + std::lround(mean_rounds * per_round);
  if (p % 2 != 0) ++p;
  return static_cast<int>(std::max(2L, p));
}

// ---------------------------------------------------------------------------
// Statistics

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};

// Normal-approximation 95% interval: 1.96 * sd / sqrt(n), sd with n - 1.
inline MeanCi aggregate(std::span<const double> xs) {
  if (xs.empty()) throw Error("aggregate of an empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double n = static_cast<double>(xs.size());
  const double mean = sum / n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

inline bool intervals_overlap(MeanCi a, MeanCi b) {
  return a.mean - a.half_width <= b.mean + b.half_width && b.mean - b.half_width <= a.mean + a.half_width;
}

struct PairedTest {
  std::size_t n = 0;
  double mean_difference = 0.0;
  double statistic = 0.0;
  double p_value = 1.0;  // H1: mean(x - y) < 0
};

// One-sided paired test on x - y with a normal reference distribution.
inline PairedTest paired_less(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("paired test needs samples of equal size");
  PairedTest t;
  t.n = x.size();
  if (t.n < 2) return t;
  std::vector<double> d(t.n);
  for (std::size_t i = 0; i < t.n; ++i) d[i] = x[i] - y[i];
  double sum = 0.0;
  for (double v : d) sum += v;
  const double n = static_cast<double>(t.n);
  t.mean_difference = sum / n;
  double ss = 0.0;
  for (double v : d) ss += (v - t.mean_difference) * (v - t.mean_difference);
  const double se = std::sqrt(ss / (n - 1.0) / n);
  if (se == 0.0) {
    t.statistic = t.mean_difference < 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    t.p_value = t.mean_difference < 0 ? 0.0 : 1.0;
    return t;
  }
  t.statistic = t.mean_difference / se;
  t.p_value = 0.5 * std::erfc(-t.statistic / std::sqrt(2.0));
  return t;
}

// ---------------------------------------------------------------------------
// Experiment plans

struct Matchup {
  std::string label;
  StrategySpec a;
  StrategySpec b;
};

struct ExperimentPlan {
  std::string name = "experiment";
  std::vector<int> issue_counts{4};
  std::vector<int> k_values{3};
  int scenarios_per_setting = 20;
  int repetitions = 10;
  std::vector<Matchup> matchups;
  std::uint64_t master_seed = 0;
  int calibration_runs = 10;
  int max_rounds = 100;
  unsigned threads = 1;
  int lower = 0;
  int upper = 9;

  void validate() const {
    if (issue_counts.empty() || k_values.empty()) throw ConfigError("plan needs at least one issue count and k");
    for (int n : issue_counts)
      if (n < 1) throw ConfigError("issue counts must be >= 1");
    for (int k : k_values)
      if (k < 1) throw ConfigError("k values must be >= 1");
    if (scenarios_per_setting < 1) throw ConfigError("scenarios_per_setting must be >= 1");
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (calibration_runs < 1) throw ConfigError("calibration_runs must be >= 1");
    if (matchups.empty()) throw ConfigError("plan has no matchups");
    std::map<std::string, int> seen;
    for (const auto& m : matchups) {
      if (m.label.empty() || m.label.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
                                 std::string::npos)
        throw ConfigError("matchup label '" + m.label + "' must be non-empty and use [A-Za-z0-9_.-]");
      if (seen[m.label]++) throw ConfigError("duplicate matchup label '" + m.label + "'");
      for (const auto* s : {&m.a, &m.b})
        if (s->kind == StrategyKind::FairBuyer || s->kind == StrategyKind::FairSeller)
          throw ConfigError("matchup '" + m.label + "': fair-case replay agents cannot run in experiments");
    }
    IssueDomain{1, lower, upper}.validate();
  }
};

inline ExperimentPlan plan_from_string(const std::string& text, const std::string& origin = "<plan>") {
  using io::json;
  const json doc = io::parse_text(text, origin);
  const std::string root = origin + ":";
  ExperimentPlan p;
  auto opt = [&](const char* key, auto& target) {
    if (doc.is_object() && doc.contains(key)) target = io::field<std::decay_t<decltype(target)>>(doc, key, root);
  };
  if (!doc.is_object()) throw ParseError(root + " expected a JSON object");
  static const std::vector<std::string> known = {"name",  "issue_counts",     "k_values", "scenarios_per_setting",
                                                 "repetitions", "matchups", "master_seed", "calibration_runs",
                                                 "max_rounds",  "threads",  "lower",       "upper"};
  for (const auto& [key, value] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ParseError(root + "/" + key + ": unknown field");
  opt("name", p.name);
  opt("issue_counts", p.issue_counts);
  opt("k_values", p.k_values);
  opt("scenarios_per_setting", p.scenarios_per_setting);
  opt("repetitions", p.repetitions);
  opt("master_seed", p.master_seed);
  opt("calibration_runs", p.calibration_runs);
  opt("max_rounds", p.max_rounds);
  opt("threads", p.threads);
  opt("lower", p.lower);
  opt("upper", p.upper);
  const json& ms = io::array_field(doc, "matchups", root);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const std::string path = root + "/matchups/" + std::to_string(i);
    Matchup m;
    m.label = io::field<std::string>(ms[i], "label", path);
    try {
      m.a = parse_strategy(io::field<std::string>(ms[i], "a", path));
      m.b = parse_strategy(io::field<std::string>(ms[i], "b", path));
    } catch (const ConfigError& e) {
      throw ParseError(path + ": " + e.what());
    }
    p.matchups.push_back(std::move(m));
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ParseError(root + " " + e.what());
  }
  return p;
}

inline ExperimentPlan load_plan(const std::filesystem::path& path) {
  return plan_from_string(io::read_file(path), path.string());
}

// ---------------------------------------------------------------------------
// Results

struct RunRow {
  std::string matchup;
  int issues = 0;
  int k = 0;
  int scenario = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  std::string outcome;  // agreement, failure or deadline
  OutcomeMetrics metrics;
  int population_a = 0;
  int population_b = 0;
  double self_sampling_ms = 0.0;
  double decision_ms = 0.0;
};

struct AggregateRow {
  std::string matchup;
  int issues = 0;
  int k = 0;
  std::size_t runs = 0;
  std::size_t agreements = 0;
  double failure_rate = 0.0;
  MeanCi dist_nash{std::nan(""), std::nan("")};
  MeanCi dist_pareto{std::nan(""), std::nan("")};
  MeanCi rounds{std::nan(""), std::nan("")};
  double samples_mean = 0.0;  // per agent
};

struct CalibrationRow {
  std::string matchup;
  std::string side;
  int issues = 0;
  int k = 0;
  double mean_rounds = 0.0;
  int population = 0;
};

struct ExperimentResult {
  std::vector<RunRow> runs;
  std::vector<AggregateRow> aggregates;
  std::vector<CalibrationRow> calibration;
};

// Distances and rounds average over agreements only; samples over all runs.
inline AggregateRow aggregate_runs(std::span<const RunRow> rows) {
  if (rows.empty()) throw Error("no runs to aggregate");
  AggregateRow a;
  a.matchup = rows.front().matchup;
  a.issues = rows.front().issues;
  a.k = rows.front().k;
  a.runs = rows.size();
  std::vector<double> dn, dp, rd;
  double samples = 0.0;
  for (const auto& r : rows) {
    samples += 0.5 * static_cast<double>(r.metrics.samples_a + r.metrics.samples_b);
    if (!r.metrics.agreed) continue;
    dn.push_back(r.metrics.dist_nash);
    dp.push_back(r.metrics.dist_pareto);
    rd.push_back(r.metrics.rounds);
  }
  a.agreements = dn.size();
  a.failure_rate = 1.0 - static_cast<double>(a.agreements) / static_cast<double>(a.runs);
  if (!dn.empty()) {
    a.dist_nash = aggregate(dn);
    a.dist_pareto = aggregate(dp);
    a.rounds = aggregate(rd);
  }
  a.samples_mean = samples / static_cast<double>(a.runs);
  return a;
}

// ---------------------------------------------------------------------------
// Runner

namespace detail {

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure after all workers stop.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::uint64_t kScenarioStream = 0x5ce7a410;
inline constexpr std::uint64_t kRunStream = 0x72756e;
inline constexpr std::uint64_t kCalibrationStream = 0xca11b;

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

template <class E>
[[noreturn]] void rethrow_with_context(const E& e, const std::string& context) {
  throw E(context + ": " + e.what());
}

}  // namespace detail

inline std::uint64_t scenario_seed(std::uint64_t master, int issues, int index) {
  return derive_seed(master, {detail::kScenarioStream, static_cast<std::uint64_t>(issues),
                              static_cast<std::uint64_t>(index)});
}

// Shared by every matchup of the same setting, scenario and repetition so
// that matchups can be compared pairwise.
inline std::uint64_t run_seed(std::uint64_t master, int issues, int k, int index, int repetition) {
  return derive_seed(master, {detail::kRunStream, static_cast<std::uint64_t>(issues), static_cast<std::uint64_t>(k),
                              static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(repetition)});
}

struct SessionResult {
  Transcript transcript;
  int population_a = 0;
  int population_b = 0;
  double self_sampling_ms = 0.0;
  double decision_ms = 0.0;
};

inline SessionResult run_matchup_session(const StrategySpec& a, const StrategySpec& b, const Scenario& sc, int k,
                                         std::uint64_t seed, int max_rounds, std::optional<int> population_a = {},
                                         std::optional<int> population_b = {},
                                         std::shared_ptr<const UtilityIndex> index_a = nullptr,
                                         std::shared_ptr<const UtilityIndex> index_b = nullptr) {
  SessionResult r;
  const auto t0 = std::chrono::steady_clock::now();
  BuiltAgent agent_a = build_agent(a, sc.agents[0], k, derive_seed(seed, {0}), population_a, std::move(index_a));
  BuiltAgent agent_b = build_agent(b, sc.agents[1], k, derive_seed(seed, {1}), population_b, std::move(index_b));
  r.self_sampling_ms = detail::elapsed_ms(t0);
  r.population_a = agent_a.population_size;
  r.population_b = agent_b.population_size;
  const auto t1 = std::chrono::steady_clock::now();
  r.transcript = run_session(*agent_a.agent, *agent_b.agent, SessionConfig{k, max_rounds, seed});
  r.decision_ms = detail::elapsed_ms(t1);
  return r;
}

inline std::string outcome_name(const Outcome& o) {
  if (std::holds_alternative<Agreement>(o)) return "agreement";
  if (std::holds_alternative<Failure>(o)) return "failure";
  return "deadline";
}

// Runs every (matchup, issue count, k, scenario, repetition) cell of the plan.
// Results are ordered by matchup, issue count, k, scenario and repetition and
// do not depend on plan.threads.
inline ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream* log = nullptr) {
  plan.validate();
  ExperimentResult result;
  const auto S = static_cast<std::size_t>(plan.scenarios_per_setting);
  const auto R = static_cast<std::size_t>(plan.repetitions);
  const std::size_t K = plan.k_values.size(), Mn = plan.matchups.size();
  bool needs_index = false;
  for (const auto& m : plan.matchups)
    needs_index = needs_index || m.a.kind == StrategyKind::Full || m.b.kind == StrategyKind::Full;

  // rows[matchup][n][k][scenario * R + rep]
  std::vector<std::vector<std::vector<std::vector<RunRow>>>> rows(
      Mn, std::vector<std::vector<std::vector<RunRow>>>(plan.issue_counts.size(),
                                                        std::vector<std::vector<RunRow>>(K, std::vector<RunRow>(S * R))));

  for (std::size_t ni = 0; ni < plan.issue_counts.size(); ++ni) {
    const int N = plan.issue_counts[ni];
    const std::string setting = fmt::format("setting N={}", N);
    std::vector<Scenario> scenarios(S);
    try {
      detail::parallel_for(S, plan.threads, [&](std::size_t i) {
        ScenarioSpec spec;
        spec.domain = {N, plan.lower, plan.upper};
        spec.seed = scenario_seed(plan.master_seed, N, static_cast<int>(i));
        scenarios[i] = generate_scenario(spec);
      });
    } catch (const CapabilityError& e) {
      detail::rethrow_with_context(e, setting);
    }
    if (log) *log << plan.name << ": N=" << N << " generated " << S << " scenarios\n";

    // NES budget parity from a pre-pass of the equivalent ES matchup.
    std::map<std::pair<std::size_t, std::size_t>, int> parity;  // (matchup*2+side, k index) -> |P|
    for (std::size_t mi = 0; mi < Mn; ++mi) {
      const Matchup& m = plan.matchups[mi];
      const StrategySpec* sides[2] = {&m.a, &m.b};
      for (std::size_t side = 0; side < 2; ++side) {
        const StrategySpec& spec = *sides[side];
        if (spec.kind != StrategyKind::Nes || !spec.budget_parity) continue;
        StrategySpec es = spec;
        es.kind = StrategyKind::Es;
        for (std::size_t ki = 0; ki < K; ++ki) {
          const int k = plan.k_values[ki];
          const auto C = static_cast<std::size_t>(plan.calibration_runs);
          std::vector<int> rounds(C);
          detail::parallel_for(C, plan.threads, [&](std::size_t c) {
            const std::uint64_t seed = derive_seed(plan.master_seed, {detail::kCalibrationStream, static_cast<std::uint64_t>(N),
                                                                      static_cast<std::uint64_t>(k), c});
            const Scenario& sc = scenarios[c % S];
            StrategySpec sa = side == 0 ? es : m.a, sb = side == 1 ? es : m.b;
            // The opponent plays as ES too so calibration needs no NES budget of its own.
            if (sa.kind == StrategyKind::Nes) sa.kind = StrategyKind::Es;
            if (sb.kind == StrategyKind::Nes) sb.kind = StrategyKind::Es;
            rounds[c] = run_matchup_session(sa, sb, sc, k, seed, plan.max_rounds).transcript.rounds();
          });
          double mean = 0.0;
          for (int r : rounds) mean += r;
          mean /= static_cast<double>(C);
          const int pop = parity_population(spec, k, mean);
          parity[{mi * 2 + side, ki}] = pop;
          result.calibration.push_back({m.label, side == 0 ? "a" : "b", N, k, mean, pop});
        }
      }
    }

    for (std::size_t si = 0; si < S; ++si) {
      const Scenario& sc = scenarios[si];
      ParetoFront front;
      std::shared_ptr<const UtilityIndex> index_a, index_b;
      try {
        front = enumerate_front(sc.agents[0], sc.agents[1], plan.threads);
        if (needs_index) {
          index_a = std::make_shared<const UtilityIndex>(sc.agents[0]);
          index_b = std::make_shared<const UtilityIndex>(sc.agents[1]);
        }
      } catch (const CapabilityError& e) {
        detail::rethrow_with_context(e, fmt::format("{} scenario {}", setting, si));
      }
      const std::size_t jobs = Mn * K * R;
      detail::parallel_for(jobs, plan.threads, [&](std::size_t j) {
        const std::size_t mi = j / (K * R), ki = (j / R) % K, rep = j % R;
        const Matchup& m = plan.matchups[mi];
        const int k = plan.k_values[ki];
        auto pop = [&](std::size_t side) -> std::optional<int> {
          auto it = parity.find({mi * 2 + side, ki});
          if (it == parity.end()) return std::nullopt;
          return it->second;
        };
        RunRow row;
        row.matchup = m.label;
        row.issues = N;
        row.k = k;
        row.scenario = static_cast<int>(si);
        row.repetition = static_cast<int>(rep);
        row.seed = run_seed(plan.master_seed, N, k, row.scenario, row.repetition);
        SessionResult sr = run_matchup_session(m.a, m.b, sc, k, row.seed, plan.max_rounds, pop(0), pop(1),
                                               m.a.kind == StrategyKind::Full ? index_a : nullptr,
                                               m.b.kind == StrategyKind::Full ? index_b : nullptr);
        row.outcome = outcome_name(sr.transcript.outcome);
        row.metrics = outcome_metrics(sr.transcript, sc.agents[0], sc.agents[1], front);
        row.population_a = sr.population_a;
        row.population_b = sr.population_b;
        row.self_sampling_ms = sr.self_sampling_ms;
        row.decision_ms = sr.decision_ms;
        rows[mi][ni][ki][si * R + rep] = std::move(row);
      });
    }
    if (log) *log << plan.name << ": N=" << N << " finished " << Mn * K * S * R << " runs\n";
  }

  for (std::size_t mi = 0; mi < Mn; ++mi)
    for (std::size_t ni = 0; ni < plan.issue_counts.size(); ++ni)
      for (std::size_t ki = 0; ki < K; ++ki) {
        const auto& cell = rows[mi][ni][ki];
        result.aggregates.push_back(aggregate_runs(cell));
        result.runs.insert(result.runs.end(), cell.begin(), cell.end());
      }
  return result;
}

// Rows of one (matchup, issues, k) cell in result order.
inline std::vector<RunRow> select_runs(const ExperimentResult& r, const std::string& matchup, int issues, int k) {
  std::vector<RunRow> out;
  for (const auto& row : r.runs)
    if (row.matchup == matchup && row.issues == issues && row.k == k) out.push_back(row);
  return out;
}

inline const AggregateRow& find_aggregate(const ExperimentResult& r, const std::string& matchup, int issues, int k) {
  for (const auto& a : r.aggregates)
    if (a.matchup == matchup && a.issues == issues && a.k == k) return a;
  throw Error(fmt::format("no aggregate for matchup {} N={} k={}", matchup, issues, k));
}

// dist_nash pairs of two matchups over cells where both agreed.
inline PairedTest paired_dist_nash(const ExperimentResult& r, const std::string& x, const std::string& y, int issues,
                                   int k) {
  const auto rx = select_runs(r, x, issues, k), ry = select_runs(r, y, issues, k);
  if (rx.size() != ry.size()) throw Error("paired matchups have different run counts");
  std::vector<double> dx, dy;
  for (std::size_t i = 0; i < rx.size(); ++i)
    if (rx[i].metrics.agreed && ry[i].metrics.agreed) {
      dx.push_back(rx[i].metrics.dist_nash);
      dy.push_back(ry[i].metrics.dist_nash);
    }
  return paired_less(dx, dy);
}

// ---------------------------------------------------------------------------
// Tabular output

namespace csv {

inline const char* kRunsHeader =
    "scenario,repetition,seed,outcome,agreed,u_a,u_b,dist_pareto,dist_nash,rounds,samples_a,samples_b,"
    "population_a,population_b";
inline const char* kAggregateHeader =
    "matchup,issues,k,runs,agreements,failure_rate,dist_nash_mean,dist_nash_ci95,dist_pareto_mean,"
    "dist_pareto_ci95,rounds_mean,rounds_ci95,samples_mean";
inline const char* kTimingHeader = "matchup,issues,k,scenario,repetition,self_sampling_ms,decision_ms,total_ms";
inline const char* kCalibrationHeader = "matchup,side,issues,k,mean_rounds,population";

inline std::string runs_file_name(const std::string& matchup, int issues, int k) {
  return fmt::format("runs_{}_N{}_k{}.csv", matchup, issues, k);
}

inline std::string run_line(const RunRow& r) {
  const auto& m = r.metrics;
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.scenario, r.repetition, r.seed, r.outcome,
                     m.agreed ? 1 : 0, m.u_a, m.u_b, m.dist_pareto, m.dist_nash, m.rounds, m.samples_a, m.samples_b,
                     r.population_a, r.population_b);
}

inline std::string aggregate_line(const AggregateRow& a) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", a.matchup, a.issues, a.k, a.runs, a.agreements,
                     a.failure_rate, a.dist_nash.mean, a.dist_nash.half_width, a.dist_pareto.mean,
                     a.dist_pareto.half_width, a.rounds.mean, a.rounds.half_width, a.samples_mean);
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double to_double(const std::string& s, const std::string& where) {
  if (s == "nan") return std::nan("");
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(where + ": '" + s + "' is not a number");
  return v;
}

}  // namespace csv

// Deterministic files (runs_*.csv, aggregate.csv, calibration.csv) plus the
// informational timing.csv.
inline void write_results(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::string> runs;
  std::vector<std::string> order;
  std::string timing = std::string(csv::kTimingHeader) + "\n";
  for (const auto& row : r.runs) {
    const std::string name = csv::runs_file_name(row.matchup, row.issues, row.k);
    auto [it, fresh] = runs.try_emplace(name, std::string(csv::kRunsHeader) + "\n");
    if (fresh) order.push_back(name);
    it->second += csv::run_line(row) + "\n";
    timing += fmt::format("{},{},{},{},{},{:.3f},{:.3f},{:.3f}\n", row.matchup, row.issues, row.k, row.scenario,
                          row.repetition, row.self_sampling_ms, row.decision_ms,
                          row.self_sampling_ms + row.decision_ms);
  }
  for (const auto& name : order) io::write_file(dir / name, runs[name]);
  std::string agg = std::string(csv::kAggregateHeader) + "\n";
  for (const auto& a : r.aggregates) agg += csv::aggregate_line(a) + "\n";
  io::write_file(dir / "aggregate.csv", agg);
  std::string cal = std::string(csv::kCalibrationHeader) + "\n";
  for (const auto& c : r.calibration)
    cal += fmt::format("{},{},{},{},{},{}\n", c.matchup, c.side, c.issues, c.k, c.mean_rounds, c.population);
  io::write_file(dir / "calibration.csv", cal);
  io::write_file(dir / "timing.csv", timing);
}

struct ReportRow {
  AggregateRow aggregate;
  bool reconciled = false;
};

namespace detail {

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::istringstream in(io::read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != header) throw ParseError(path.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(csv::split(line));
  return rows;
}

inline bool same_value(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

}  // namespace detail

// Recomputes every aggregate row from its per-run file and reports whether
// the stored values reconcile.
inline std::vector<ReportRow> build_report(const std::filesystem::path& dir) {
  std::vector<ReportRow> out;
  const auto agg_path = dir / "aggregate.csv";
  for (const auto& f : detail::read_csv(agg_path, csv::kAggregateHeader)) {
    if (f.size() != 13) throw ParseError(agg_path.string() + ": expected 13 columns");
    auto num = [&](std::size_t i) { return csv::to_double(f[i], agg_path.string()); };
    AggregateRow stored;
    stored.matchup = f[0];
    stored.issues = static_cast<int>(num(1));
    stored.k = static_cast<int>(num(2));
    stored.runs = static_cast<std::size_t>(num(3));
    stored.agreements = static_cast<std::size_t>(num(4));
    stored.failure_rate = num(5);
    stored.dist_nash = {num(6), num(7)};
    stored.dist_pareto = {num(8), num(9)};
    stored.rounds = {num(10), num(11)};
    stored.samples_mean = num(12);

    const auto run_path = dir / csv::runs_file_name(stored.matchup, stored.issues, stored.k);
    std::vector<RunRow> rows;
    for (const auto& r : detail::read_csv(run_path, csv::kRunsHeader)) {
      if (r.size() != 14) throw ParseError(run_path.string() + ": expected 14 columns");
      auto rn = [&](std::size_t i) { return csv::to_double(r[i], run_path.string()); };
      RunRow row;
      row.matchup = stored.matchup;
      row.issues = stored.issues;
      row.k = stored.k;
      row.metrics.agreed = r[4] == "1";
      row.metrics.dist_pareto = rn(7);
      row.metrics.dist_nash = rn(8);
      row.metrics.rounds = static_cast<int>(rn(9));
      row.metrics.samples_a = static_cast<std::int64_t>(rn(10));
      row.metrics.samples_b = static_cast<std::int64_t>(rn(11));
      rows.push_back(std::move(row));
    }
    const AggregateRow again = aggregate_runs(rows);
    const bool ok = again.runs == stored.runs && again.agreements == stored.agreements &&
                    detail::same_value(again.failure_rate, stored.failure_rate) &&
                    detail::same_value(again.dist_nash.mean, stored.dist_nash.mean) &&
                    detail::same_value(again.dist_nash.half_width, stored.dist_nash.half_width) &&
                    detail::same_value(again.dist_pareto.mean, stored.dist_pareto.mean) &&
                    detail::same_value(again.dist_pareto.half_width, stored.dist_pareto.half_width) &&
                    detail::same_value(again.rounds.mean, stored.rounds.mean) &&
                    detail::same_value(again.rounds.half_width, stored.rounds.half_width) &&
                    detail::same_value(again.samples_mean, stored.samples_mean);
    out.push_back({stored, ok});
  }
  return out;
}

// Plot-ready columns: mean with lower and upper 95% bounds per metric.
inline std::string format_report(const std::vector<ReportRow>& rows) {
  std::string s =
      "matchup,issues,k,runs,failure_rate,dist_nash,dist_nash_lo,dist_nash_hi,dist_pareto,dist_pareto_lo,"
      "dist_pareto_hi,rounds,rounds_lo,rounds_hi,samples,reconciled\n";
  for (const auto& r : rows) {
    const auto& a = r.aggregate;
    auto bounds = [](MeanCi m) { return fmt::format("{},{},{}", m.mean, m.mean - m.half_width, m.mean + m.half_width); };
    s += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", a.matchup, a.issues, a.k, a.runs, a.failure_rate,
                     bounds(a.dist_nash), bounds(a.dist_pareto), bounds(a.rounds), a.samples_mean,
                     r.reconciled ? "yes" : "no");
  }
  return s;
}

}  // namespace negosim
