#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "negosim/random.hpp"
#include "negosim/scenario.hpp"

namespace negosim {

struct ScoredOffer {
  Offer offer;
  double fitness = 0.0;
  friend bool operator==(const ScoredOffer&, const ScoredOffer&) = default;
};

// A set of offers with cached fitness. Order is significant: it is the
// insertion order used for stable tie handling.
struct Population {
  std::vector<ScoredOffer> members;
  int generation = 0;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  friend bool operator==(const Population&, const Population&) = default;
};

inline Population score_offers(const WeightedConstraintUtility& u, std::span<const Offer> offers) {
  Population p;
  p.members.reserve(offers.size());
  for (const auto& o : offers) p.members.push_back({o, u.evaluate(o)});
  return p;
}

struct GaConfig {
  int population_size = 16;
  int max_generations = 100;
  double p_dc = 0.8;  // deterministic vs probabilistic crowding
  double p_cr = 0.8;  // crossover vs mutation
  int crossover_points = 2;
  std::optional<double> mutation_rate;  // per issue; 1/N when unset
  std::uint64_t seed = 0;

  void validate() const {
    if (population_size < 2 || population_size % 2 != 0)
      throw ConfigError("population_size must be a positive even number, got " + std::to_string(population_size));
    if (max_generations < 0) throw ConfigError("max_generations must be >= 0");
    auto prob = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
    };
    prob(p_dc, "p_dc");
    prob(p_cr, "p_cr");
    if (mutation_rate) prob(*mutation_rate, "mutation_rate");
    if (crossover_points < 1) throw ConfigError("crossover_points must be >= 1");
  }

  double mutation_rate_for(int issues) const { return mutation_rate.value_or(1.0 / issues); }
};

// Elitist rule: the fitter offer wins, exact ties are a fair coin.
inline const ScoredOffer& deterministic_crowding(const ScoredOffer& s1, const ScoredOffer& s2, Rng& rng) {
  if (s1.fitness > s2.fitness) return s1;
  if (s2.fitness > s1.fitness) return s2;
  return bernoulli(rng, 0.5) ? s1 : s2;
}

// s1 wins with probability f1 / (f1 + f2); 0/0 falls back to a fair coin.
inline const ScoredOffer& probabilistic_crowding(const ScoredOffer& s1, const ScoredOffer& s2, Rng& rng) {
  const double total = s1.fitness + s2.fitness;
  const double p1 = total > 0.0 ? s1.fitness / total : 0.5;
  return uniform01(rng) < p1 ? s1 : s2;
}

// Segment swap at explicit cut positions; a cut at i separates genes i and
// i + 1. Cuts must be ascending.
inline std::pair<Offer, Offer> multipoint_crossover_at(const Offer& p1, const Offer& p2, std::span<const int> cuts) {
  Offer c1 = p1, c2 = p2;
  bool swapped = false;
  std::size_t next_cut = 0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (swapped) std::swap(c1[i], c2[i]);
    while (next_cut < cuts.size() && static_cast<std::size_t>(cuts[next_cut]) == i) {
      swapped = !swapped;
      ++next_cut;
    }
  }
  return {std::move(c1), std::move(c2)};
}

inline std::pair<Offer, Offer> multipoint_crossover(const Offer& p1, const Offer& p2, int points, Rng& rng) {
  const int gaps = static_cast<int>(p1.size()) - 1;
  if (gaps <= 0) return {p1, p2};
  std::vector<int> all(static_cast<std::size_t>(gaps));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> cuts;
  std::sample(all.begin(), all.end(), std::back_inserter(cuts), std::min(points, gaps), rng);
  return multipoint_crossover_at(p1, p2, cuts);
}

// Each issue is independently reset to a uniform in-domain value with
// probability rate.
inline Offer ga_mutate(const Offer& p, double rate, const IssueDomain& d, Rng& rng) {
  Offer c = p;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (bernoulli(rng, rate)) c[i] = uniform_int(rng, d.lower, d.upper);
  return c;
}

inline double euclidean_distance(const Offer& a, const Offer& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

struct Pairing {
  bool crossed = false;  // true: (p1,c2),(p2,c1); false: (p1,c1),(p2,c2)
  double total_distance = 0.0;
};

inline Pairing pair_by_distance(const Offer& p1, const Offer& p2, const Offer& c1, const Offer& c2) {
  const double identity = euclidean_distance(p1, c1) + euclidean_distance(p2, c2);
  const double crossed = euclidean_distance(p1, c2) + euclidean_distance(p2, c1);
  if (crossed < identity) return {true, crossed};
  return {false, identity};
}

// Called with the initial population (generation 0) and after every
// generation.
using GenerationObserver = std::function<void(const Population&)>;

// Crowding-based niching GA over one's own utility. Returns the final
// population, same size as configured.
inline Population self_sample(const WeightedConstraintUtility& u, const GaConfig& cfg, Rng& rng,
                              const GenerationObserver& observer = {}) {
  cfg.validate();
  const IssueDomain& d = u.domain();
  const double rate = cfg.mutation_rate_for(d.issue_count);
  auto score = [&](Offer o) {
    const double f = u.raw_unchecked(o) / u.max_raw();
    return ScoredOffer{std::move(o), f};
  };

  Population pop;
  pop.members.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    std::vector<int> v(static_cast<std::size_t>(d.issue_count));
    for (auto& x : v) x = uniform_int(rng, d.lower, d.upper);
    pop.members.push_back(score(Offer(std::move(v))));
  }
  if (observer) observer(pop);

  std::vector<ScoredOffer> next;
  next.reserve(pop.members.size());
  for (int gen = 1; gen <= cfg.max_generations; ++gen) {
    std::shuffle(pop.members.begin(), pop.members.end(), rng);
    next.clear();
    for (std::size_t i = 0; i + 1 < pop.members.size(); i += 2) {
      const ScoredOffer& p1 = pop.members[i];
      const ScoredOffer& p2 = pop.members[i + 1];
      Offer o1, o2;
      if (uniform01(rng) <= cfg.p_cr) {
        std::tie(o1, o2) = multipoint_crossover(p1.offer, p2.offer, cfg.crossover_points, rng);
      } else {
        o1 = ga_mutate(p1.offer, rate, d, rng);
        o2 = ga_mutate(p2.offer, rate, d, rng);
      }
      const Pairing pairing = pair_by_distance(p1.offer, p2.offer, o1, o2);
      ScoredOffer c1 = score(std::move(o1));
      ScoredOffer c2 = score(std::move(o2));
      const ScoredOffer& mate1 = pairing.crossed ? c2 : c1;
      const ScoredOffer& mate2 = pairing.crossed ? c1 : c2;
      if (uniform01(rng) <= cfg.p_dc) {
        next.push_back(deterministic_crowding(p1, mate1, rng));
        next.push_back(deterministic_crowding(p2, mate2, rng));
      } else {
        next.push_back(probabilistic_crowding(p1, mate1, rng));
        next.push_back(probabilistic_crowding(p2, mate2, rng));
      }
    }
    pop.members.swap(next);
    pop.generation = gen;
    if (observer) observer(pop);
  }
  return pop;
}

inline Population self_sample(const WeightedConstraintUtility& u, const GaConfig& cfg) {
  Rng rng(cfg.seed);
  return self_sample(u, cfg, rng);
}

}  // namespace negosim
