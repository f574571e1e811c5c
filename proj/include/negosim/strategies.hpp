#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fmt/format.h"
#include "negosim/niching.hpp"
#include "negosim/protocol.hpp"
#include "negosim/random.hpp"
#include "negosim/scenario.hpp"

namespace negosim {

// Slack applied to band and threshold comparisons so that values such as
// 1 - 0.1 - 0.05 compare equal to 0.85.
inline constexpr double kUtilityTolerance = 1e-9;

struct StrategyConfig {
  int deadline = 10;  // T, in own turns
  double reservation_utility = 0.0;
  double delta = 0.05;
  int k = 3;
  int similar_count = 5;  // M
  int n_cross = 4;
  int n_mut = 4;
  double p_attr = 0.3;
  double p_pevo = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (deadline < 1) throw ConfigError("deadline must be >= 1");
    auto unit = [](double p, const char* name) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0,1]");
    };
    unit(reservation_utility, "reservation_utility");
    unit(p_attr, "p_attr");
    unit(p_pevo, "p_pevo");
    if (!(delta >= 0.0 && delta < 1.0)) throw ConfigError("delta must lie in [0,1)");
    if (k < 1) throw ConfigError("k must be >= 1");
    if (similar_count < 1) throw ConfigError("M must be >= 1");
    if (n_cross < 0 || n_mut < 0) throw ConfigError("n_cross and n_mut must be >= 0");
  }
};

struct UtilityBand {
  double lo = 0.0;
  double hi = 1.0;
  bool contains(double u) const { return u >= lo - kUtilityTolerance && u <= hi + kUtilityTolerance; }
};

// Linear concession: centre 1 - (1 - RU) t / T, widened by delta and clipped
// to [RU, 1]. Empty past the deadline.
inline std::optional<UtilityBand> demanded_band(int t, const StrategyConfig& cfg) {
  if (t < 0) throw ConfigError("turn index must be >= 0");
  if (t > cfg.deadline) return std::nullopt;
  const double ru = cfg.reservation_utility;
  const double centre = 1.0 - (1.0 - ru) * (static_cast<double>(t) / cfg.deadline);
  return UtilityBand{std::max(ru, centre - cfg.delta), std::min(1.0, centre + cfg.delta)};
}

// Utility an incoming offer must reach on own turn t: the lower edge of the
// band the agent is about to propose from.
inline double acceptance_threshold(int t, const StrategyConfig& cfg) {
  auto band = demanded_band(t, cfg);
  if (!band) throw ConfigError("acceptance threshold requested past the deadline");
  return band->lo;
}

// Highest-utility received offer, ties to the lexicographically smallest.
inline std::optional<ScoredOffer> best_received(std::span<const Offer> received, const WeightedConstraintUtility& u) {
  std::optional<ScoredOffer> best;
  for (const auto& o : received) {
    const double v = u.evaluate(o);
    if (!best || v > best->fitness || (v == best->fitness && o < best->offer)) best = ScoredOffer{o, v};
  }
  return best;
}

inline std::optional<Offer> accept_or_reject(std::span<const Offer> received, int t, const StrategyConfig& cfg,
                                             const WeightedConstraintUtility& u) {
  auto best = best_received(received, u);
  if (!best) return std::nullopt;
  if (best->fitness >= acceptance_threshold(t, cfg) - kUtilityTolerance) return best->offer;
  return std::nullopt;
}

// Euclidean distance with every coordinate scaled by the issue span.
inline double normalized_distance(const Offer& x, const Offer& y, const IssueDomain& d) {
  const double w = d.span();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = (x[i] - y[i]) / w;
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline std::vector<ScoredOffer> iso_curve(const Population& pool, UtilityBand band) {
  std::vector<ScoredOffer> out;
  for (const auto& m : pool.members)
    if (band.contains(m.fitness)) out.push_back(m);
  return out;
}

namespace detail {

struct Ranked {
  double key;
  const ScoredOffer* item;
};

inline void sort_ranked(std::vector<Ranked>& r) {
  std::sort(r.begin(), r.end(), [](const Ranked& a, const Ranked& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.item->offer < b.item->offer;
  });
}

}  // namespace detail

// The min(M, |curve|) curve members closest to the received offer.
inline std::vector<ScoredOffer> select_m_similar(std::span<const ScoredOffer> curve, const Offer& received, int m,
                                                 const IssueDomain& d) {
  std::vector<detail::Ranked> ranked;
  ranked.reserve(curve.size());
  for (const auto& c : curve) ranked.push_back({normalized_distance(c.offer, received, d), &c});
  detail::sort_ranked(ranked);
  std::vector<ScoredOffer> out;
  for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < m; ++i) out.push_back(*ranked[i].item);
  return out;
}

// One child: between 1 and N-1 randomly chosen positions come from the
// opponent's offer, the rest from one's own.
inline Offer nego_crossover(const Offer& opponent, const Offer& own, Rng& rng) {
  const int n = static_cast<int>(opponent.size());
  if (n < 2) throw DomainError("negotiation crossover needs at least two issues");
  const int from_opponent = uniform_int(rng, 1, n - 1);
  std::vector<int> positions(static_cast<std::size_t>(n));
  std::iota(positions.begin(), positions.end(), 0);
  std::shuffle(positions.begin(), positions.end(), rng);
  Offer child = own;
  for (int i = 0; i < from_opponent; ++i) {
    const auto p = static_cast<std::size_t>(positions[static_cast<std::size_t>(i)]);
    child[p] = opponent[p];
  }
  return child;
}

inline Offer nego_mutate(const Offer& x, double p_attr, const IssueDomain& d, Rng& rng) {
  Offer c = x;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (bernoulli(rng, p_attr)) c[i] = uniform_int(rng, d.lower, d.upper);
  return c;
}

// Source of genetic-operator results used during evolutionary sampling.
class VariationSource {
 public:
  virtual ~VariationSource() = default;
  virtual Offer crossover(const Offer& opponent, const Offer& own) = 0;
  virtual Offer mutate(const Offer& x) = 0;
};

class RandomVariation final : public VariationSource {
 public:
  RandomVariation(IssueDomain d, double p_attr, std::uint64_t seed) : domain_(d), p_attr_(p_attr), rng_(seed) {}
  Offer crossover(const Offer& opponent, const Offer& own) override { return nego_crossover(opponent, own, rng_); }
  Offer mutate(const Offer& x) override { return nego_mutate(x, p_attr_, domain_, rng_); }

 private:
  IssueDomain domain_;
  double p_attr_;
  Rng rng_;
};

// Replays a recorded sequence of operator applications. Each step names the
// parents it expects so a diverging call sequence fails loudly.
class ScriptedVariation final : public VariationSource {
 public:
  struct Step {
    bool is_crossover;
    Offer first;   // opponent offer (crossover) or mutated offer
    Offer second;  // own offer for crossover, unused for mutation
    Offer child;
  };

  explicit ScriptedVariation(std::vector<Step> steps) : steps_(std::move(steps)) {}

  Offer crossover(const Offer& opponent, const Offer& own) override { return next(true, opponent, own); }
  Offer mutate(const Offer& x) override { return next(false, x, {}); }
  std::size_t remaining() const { return steps_.size() - cursor_; }

 private:
  Offer next(bool crossover, const Offer& first, const Offer& second) {
    const char* op = crossover ? "crossover" : "mutation";
    if (cursor_ >= steps_.size()) throw Error(std::string("replay exhausted at ") + op + " of (" + to_string(first) + ")");
    const Step& s = steps_[cursor_];
    if (s.is_crossover != crossover || s.first != first || (crossover && s.second != second))
      throw Error(fmt::format("replay diverged at step {}: expected {} of ({}){}, got {} of ({}){}", cursor_,
                              s.is_crossover ? "crossover" : "mutation", to_string(s.first),
                              s.is_crossover ? " x (" + to_string(s.second) + ")" : "", op, to_string(first),
                              crossover ? " x (" + to_string(second) + ")" : ""));
    ++cursor_;
    return s.child;
  }

  std::vector<Step> steps_;
  std::size_t cursor_ = 0;
};

// Population that stores every issue vector at most once.
class OfferPool {
 public:
  bool insert(ScoredOffer s) {
    if (!index_.insert(s.offer).second) return false;
    population_.members.push_back(std::move(s));
    return true;
  }
  bool contains(const Offer& o) const { return index_.count(o) != 0; }
  const Population& population() const { return population_; }
  std::size_t size() const { return population_.size(); }

 private:
  Population population_;
  std::unordered_set<Offer, OfferHash> index_;
};

struct AgentState {
  Population self_samples;  // P
  OfferPool evolved;        // P_evo
  int turn = 0;
  std::int64_t samples_explored = 0;
};

struct EvolutionReport {
  std::int64_t applications = 0;
  int inserted = 0;
};

// Genetic operators over each received offer and its M most similar own
// offers; every product enters P_evo unless already present.
inline EvolutionReport evolutionary_sample(std::span<const Offer> received, AgentState& state, UtilityBand band,
                                           const StrategyConfig& cfg, const WeightedConstraintUtility& u,
                                           VariationSource& variation) {
  EvolutionReport report;
  const std::vector<ScoredOffer> curve = iso_curve(state.self_samples, band);
  auto add = [&](Offer o) {
    const double f = u.evaluate(o);
    if (state.evolved.insert({std::move(o), f})) ++report.inserted;
  };
  for (const Offer& x : received) {
    for (const ScoredOffer& c : select_m_similar(curve, x, cfg.similar_count, u.domain())) {
      for (int i = 0; i < cfg.n_cross; ++i) {
        const Offer child = variation.crossover(x, c.offer);
        ++report.applications;
        add(child);
        for (int j = 0; j < cfg.n_mut; ++j) {
          add(variation.mutate(child));
          ++report.applications;
        }
      }
    }
    for (int j = 0; j < cfg.n_mut; ++j) {
      add(variation.mutate(x));
      ++report.applications;
    }
  }
  state.samples_explored += report.applications;
  return report;
}

struct OfferSelection {
  std::vector<Offer> offers;
  int from_evolved = 0;
  int from_self = 0;
  bool fallback = false;
};

namespace detail {

// Curve members ordered by distance to the nearest received offer, or
// shuffled when nothing has been received yet.
inline std::vector<Ranked> rank_curve(const std::vector<ScoredOffer>& curve, std::span<const Offer> received,
                                      const IssueDomain& d, Rng& rng) {
  std::vector<Ranked> ranked;
  ranked.reserve(curve.size());
  if (received.empty()) {
    for (const auto& c : curve) ranked.push_back({0.0, &c});
    std::shuffle(ranked.begin(), ranked.end(), rng);
    return ranked;
  }
  for (const auto& c : curve) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : received) best = std::min(best, normalized_distance(c.offer, x, d));
    ranked.push_back({best, &c});
  }
  sort_ranked(ranked);
  return ranked;
}

// Offer whose utility is nearest above the band's lower edge, or the best
// available one when nothing reaches it.
inline Offer fallback_offer(const AgentState& state, UtilityBand band) {
  const ScoredOffer* above = nullptr;
  const ScoredOffer* best = nullptr;
  auto visit = [&](const Population& p) {
    for (const auto& m : p.members) {
      if (!best || m.fitness > best->fitness || (m.fitness == best->fitness && m.offer < best->offer)) best = &m;
      if (m.fitness >= band.lo - kUtilityTolerance &&
          (!above || m.fitness < above->fitness || (m.fitness == above->fitness && m.offer < above->offer)))
        above = &m;
    }
  };
  visit(state.self_samples);
  visit(state.evolved.population());
  if (!best) throw Error("agent has no offers to propose");
  return (above ? above : best)->offer;
}

}  // namespace detail

inline int evolved_quota(const StrategyConfig& cfg) {
  return static_cast<int>(std::floor(cfg.p_pevo * cfg.k + 0.5));
}

// Up to k distinct offers: round(p_pevo k) from the evolved curve IC_E and
// the rest from the self-sampled curve IC_P, each ranked by distance to the
// closest received offer. A short curve's deficit is filled from the other.
inline OfferSelection choose_offers_to_send(const AgentState& state, std::span<const Offer> received,
                                            UtilityBand band, const StrategyConfig& cfg, const IssueDomain& d,
                                            Rng& rng) {
  const std::vector<ScoredOffer> ic_e = iso_curve(state.evolved.population(), band);
  const std::vector<ScoredOffer> ic_p = iso_curve(state.self_samples, band);
  const auto ranked_e = detail::rank_curve(ic_e, received, d, rng);
  const auto ranked_p = detail::rank_curve(ic_p, received, d, rng);

  OfferSelection sel;
  std::unordered_set<Offer, OfferHash> sent;
  std::size_t cursor_e = 0, cursor_p = 0;
  auto take = [&](const std::vector<detail::Ranked>& ranked, std::size_t& cursor, int quota, int& counter) {
    while (quota > 0 && cursor < ranked.size()) {
      const Offer& o = ranked[cursor++].item->offer;
      if (!sent.insert(o).second) continue;
      sel.offers.push_back(o);
      ++counter;
      --quota;
    }
  };
  const int k1 = evolved_quota(cfg);
  take(ranked_e, cursor_e, k1, sel.from_evolved);
  take(ranked_p, cursor_p, cfg.k - static_cast<int>(sel.offers.size()), sel.from_self);
  take(ranked_e, cursor_e, cfg.k - static_cast<int>(sel.offers.size()), sel.from_evolved);

  if (sel.offers.empty()) {
    sel.offers.push_back(detail::fallback_offer(state, band));
    sel.fallback = true;
  }
  return sel;
}

inline std::string format_band(UtilityBand b) { return fmt::format("[{:.4f},{:.4f}]", b.lo, b.hi); }

// Evolutionary sampling strategy. With evolve = false and p_pevo = 0 it
// becomes the sample-only-before-negotiating baseline.
class EvolutionarySamplingAgent final : public Agent {
 public:
  EvolutionarySamplingAgent(WeightedConstraintUtility u, Population self_samples, StrategyConfig cfg,
                            bool evolve = true, std::unique_ptr<VariationSource> variation = nullptr)
      : u_(std::move(u)), cfg_(cfg), evolve_(evolve), rng_(derive_seed(cfg.seed, {0x5e1ec7})) {
    cfg_.validate();
    if (self_samples.empty()) throw ConfigError("self-sampled population must not be empty");
    variation_ = variation ? std::move(variation)
                           : std::make_unique<RandomVariation>(u_.domain(), cfg_.p_attr, derive_seed(cfg.seed, {0x6e0}));
    state_.samples_explored = static_cast<std::int64_t>(self_samples.size());
    state_.self_samples = std::move(self_samples);
  }

  Message act(int own_turn, std::span<const Offer> received) override {
    state_.turn = own_turn;
    if (own_turn > cfg_.deadline) {
      note_ = fmt::format("t={} deadline", own_turn);
      return Exit{};
    }
    if (auto accepted = accept_or_reject(received, own_turn, cfg_, u_)) {
      note_ = fmt::format("t={} accept u={:.4f} threshold={:.4f}", own_turn, u_.evaluate(*accepted),
                          acceptance_threshold(own_turn, cfg_));
      return Accept{*accepted};
    }
    const UtilityBand band = *demanded_band(own_turn, cfg_);
    EvolutionReport evo;
    if (evolve_ && !received.empty()) evo = evolutionary_sample(received, state_, band, cfg_, u_, *variation_);
    OfferSelection sel = choose_offers_to_send(state_, received, band, cfg_, u_.domain(), rng_);
    note_ = fmt::format("t={} band={} icp={} ice={} ops={} pevo={} sent={}e+{}p{} samples={}", own_turn,
                        format_band(band), iso_curve(state_.self_samples, band).size(),
                        iso_curve(state_.evolved.population(), band).size(), evo.applications, state_.evolved.size(),
                        sel.from_evolved, sel.from_self, sel.fallback ? " fallback" : "", state_.samples_explored);
    return Propose{std::move(sel.offers)};
  }

  const IssueDomain& domain() const override { return u_.domain(); }
  double utility(const Offer& x) const override { return u_.evaluate(x); }
  std::int64_t samples_explored() const override { return state_.samples_explored; }
  std::string last_turn_note() const override { return note_; }

  const AgentState& state() const { return state_; }
  const StrategyConfig& config() const { return cfg_; }

 private:
  WeightedConstraintUtility u_;
  StrategyConfig cfg_;
  bool evolve_;
  Rng rng_;
  std::unique_ptr<VariationSource> variation_;
  AgentState state_;
  std::string note_;
};

// Every domain offer with its utility, sorted by (utility, lexicographic
// index). Shared read-only between agents of the same utility.
class UtilityIndex {
 public:
  struct Entry {
    double utility;
    std::uint64_t index;
  };

  explicit UtilityIndex(const WeightedConstraintUtility& u) : domain_(u.domain()) {
    if (!domain_.enumerable())
      throw CapabilityError(fmt::format("full-curve strategy cannot enumerate {:.0f} offers", domain_.cardinality()));
    const auto n = static_cast<std::uint64_t>(domain_.cardinality());
    entries_.reserve(n);
    SatisfactionMasks masks(domain_, u.constraints());
    masks.for_each(0, n, [&](std::uint64_t i, const Offer&, double raw) { entries_.push_back({raw / u.max_raw(), i}); });
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return a.utility != b.utility ? a.utility < b.utility : a.index < b.index;
    });
  }

  const IssueDomain& domain() const { return domain_; }
  std::span<const Entry> entries() const { return entries_; }
  Offer offer(const Entry& e) const { return domain_.decode(e.index); }

  std::span<const Entry> in_band(UtilityBand band) const {
    auto first = std::lower_bound(entries_.begin(), entries_.end(), band.lo - kUtilityTolerance,
                                  [](const Entry& e, double v) { return e.utility < v; });
    auto last = std::upper_bound(first, entries_.end(), band.hi + kUtilityTolerance,
                                 [](double v, const Entry& e) { return v < e.utility; });
    return {first, last};
  }

  // All entries sharing the lowest utility at or above lo, or the highest
  // utility level when nothing reaches lo.
  std::span<const Entry> level_at_or_above(double lo) const {
    auto first = std::lower_bound(entries_.begin(), entries_.end(), lo - kUtilityTolerance,
                                  [](const Entry& e, double v) { return e.utility < v; });
    if (first == entries_.end()) first = std::prev(entries_.end());
    const double level = first->utility;
    auto begin = std::lower_bound(entries_.begin(), entries_.end(), level,
                                  [](const Entry& e, double v) { return e.utility < v; });
    auto end = std::upper_bound(begin, entries_.end(), level, [](double v, const Entry& e) { return v < e.utility; });
    return {begin, end};
  }

 private:
  IssueDomain domain_;
  std::vector<Entry> entries_;
};

// Baseline with access to the whole utility function: the curve member
// nearest the best received offer is the seed, followed by its k - 1
// nearest in-band neighbours.
class FullCurveAgent final : public Agent {
 public:
  FullCurveAgent(WeightedConstraintUtility u, StrategyConfig cfg, std::shared_ptr<const UtilityIndex> index = nullptr)
      : u_(std::move(u)), cfg_(cfg), rng_(derive_seed(cfg.seed, {0xf0111})) {
    cfg_.validate();
    index_ = index ? std::move(index) : std::make_shared<const UtilityIndex>(u_);
  }

  Message act(int own_turn, std::span<const Offer> received) override {
    if (own_turn > cfg_.deadline) {
      note_ = fmt::format("t={} deadline", own_turn);
      return Exit{};
    }
    if (auto accepted = accept_or_reject(received, own_turn, cfg_, u_)) {
      note_ = fmt::format("t={} accept u={:.4f}", own_turn, u_.evaluate(*accepted));
      return Accept{*accepted};
    }
    const UtilityBand band = *demanded_band(own_turn, cfg_);
    const IssueDomain& d = u_.domain();
    std::optional<Offer> reference;
    if (auto best = best_received(received, u_)) reference = best->offer;

    auto curve = index_->in_band(band);
    const bool fallback = curve.empty();
    if (fallback) curve = index_->level_at_or_above(band.lo);

    auto nearest = [&](std::span<const UtilityIndex::Entry> pool, const Offer& to, std::size_t count,
                       std::optional<std::uint64_t> skip) {
      std::vector<std::pair<double, std::uint64_t>> scored;
      scored.reserve(pool.size());
      for (const auto& e : pool)
        if (!skip || e.index != *skip) scored.emplace_back(normalized_distance(index_->offer(e), to, d), e.index);
      count = std::min(count, scored.size());
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count), scored.end());
      scored.resize(count);
      return scored;
    };

    std::uint64_t seed_index;
    if (reference) {
      seed_index = nearest(curve, *reference, 1, std::nullopt).front().second;
    } else if (fallback) {
      seed_index = std::min_element(curve.begin(), curve.end(), [](const auto& a, const auto& b) {
                     return a.index < b.index;
                   })->index;
    } else {
      seed_index = curve[static_cast<std::size_t>(uniform_int(rng_, 0, static_cast<int>(curve.size()) - 1))].index;
    }
    std::vector<Offer> offers{d.decode(seed_index)};
    if (!fallback)
      for (const auto& [dist, idx] : nearest(curve, offers.front(), static_cast<std::size_t>(cfg_.k - 1), seed_index))
        offers.push_back(d.decode(idx));
    note_ = fmt::format("t={} band={} curve={} sent={}{}", own_turn, format_band(band), fallback ? 0 : curve.size(),
                        offers.size(), fallback ? " fallback" : "");
    return Propose{std::move(offers)};
  }

  const IssueDomain& domain() const override { return u_.domain(); }
  double utility(const Offer& x) const override { return u_.evaluate(x); }
  std::int64_t samples_explored() const override { return static_cast<std::int64_t>(u_.domain().cardinality()); }
  std::string last_turn_note() const override { return note_; }

 private:
  WeightedConstraintUtility u_;
  StrategyConfig cfg_;
  Rng rng_;
  std::shared_ptr<const UtilityIndex> index_;
  std::string note_;
};

// Proposes from a fixed script while applying the regular acceptance rule;
// Exits once the script runs out.
class ScriptedAgent final : public Agent {
 public:
  ScriptedAgent(WeightedConstraintUtility u, StrategyConfig cfg, std::vector<std::vector<Offer>> proposals,
                bool apply_acceptance = true)
      : u_(std::move(u)), cfg_(cfg), proposals_(std::move(proposals)), apply_acceptance_(apply_acceptance) {}

  Message act(int own_turn, std::span<const Offer> received) override {
    if (apply_acceptance_ && own_turn <= cfg_.deadline)
      if (auto accepted = accept_or_reject(received, own_turn, cfg_, u_)) return Accept{*accepted};
    if (own_turn >= static_cast<int>(proposals_.size())) return Exit{};
    return Propose{proposals_[static_cast<std::size_t>(own_turn)]};
  }

  const IssueDomain& domain() const override { return u_.domain(); }
  double utility(const Offer& x) const override { return u_.evaluate(x); }

 private:
  WeightedConstraintUtility u_;
  StrategyConfig cfg_;
  std::vector<std::vector<Offer>> proposals_;
  bool apply_acceptance_;
};

inline std::unique_ptr<Agent> make_es_agent(const WeightedConstraintUtility& u, const GaConfig& ga,
                                            const StrategyConfig& s) {
  Rng rng(ga.seed);
  return std::make_unique<EvolutionarySamplingAgent>(u, self_sample(u, ga, rng), s);
}

inline std::unique_ptr<Agent> make_nes_agent(const WeightedConstraintUtility& u, const GaConfig& ga,
                                             StrategyConfig s) {
  s.p_pevo = 0.0;
  Rng rng(ga.seed);
  return std::make_unique<EvolutionarySamplingAgent>(u, self_sample(u, ga, rng), s, /*evolve=*/false);
}

inline std::unique_ptr<Agent> make_full_curve_agent(const WeightedConstraintUtility& u, const StrategyConfig& s,
                                                    std::shared_ptr<const UtilityIndex> index = nullptr) {
  return std::make_unique<FullCurveAgent>(u, s, std::move(index));
}

}  // namespace negosim
