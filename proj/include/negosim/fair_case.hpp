#pragma once

// Furniture-fair negotiation: a buyer and a seller negotiate price (P),
// chair model (CM) and table model (TM), each in [0, 9]. Besides both
// utilities this file carries the buyer's self-sampled population and a
// replay of the operator results and seller proposals of the reference
// trace, so the whole session can be re-run deterministically.

#include <vector>

#include "negosim/niching.hpp"
#include "negosim/scenario.hpp"
#include "negosim/strategies.hpp"

namespace negosim::fair_case {

inline constexpr int kPrice = 0;
inline constexpr int kChair = 1;
inline constexpr int kTable = 2;

inline IssueDomain domain() { return {3, 0, 9}; }

namespace detail {
inline Constraint unary(int issue, int lo, int hi, double v) { return {{{issue, lo, hi}}, v}; }
inline Constraint binary(int i, int ilo, int ihi, int j, int jlo, int jhi, double v) {
  return {{{i, ilo, ihi}, {j, jlo, jhi}}, v};
}
}  // namespace detail

inline WeightedConstraintUtility buyer() {
  using detail::binary;
  using detail::unary;
  return WeightedConstraintUtility(domain(), {
                                                 unary(kPrice, 0, 1, 100),
                                                 unary(kPrice, 2, 4, 50),
                                                 unary(kPrice, 5, 7, 25),
                                                 binary(kChair, 0, 3, kTable, 0, 3, 30),
                                                 binary(kChair, 0, 3, kTable, 6, 9, 10),
                                                 binary(kChair, 0, 3, kTable, 5, 6, 50),
                                                 binary(kChair, 4, 6, kTable, 0, 3, 30),
                                                 binary(kChair, 4, 5, kTable, 4, 5, 20),
                                                 binary(kChair, 4, 5, kTable, 8, 9, 10),
                                                 binary(kChair, 7, 9, kTable, 2, 4, 50),
                                                 binary(kChair, 7, 9, kTable, 6, 8, 20),
                                             });
}

inline WeightedConstraintUtility seller() {
  using detail::unary;
  return WeightedConstraintUtility(domain(), {
                                                 unary(kPrice, 8, 9, 80),
                                                 unary(kPrice, 6, 7, 60),
                                                 unary(kPrice, 4, 5, 45),
                                                 unary(kPrice, 1, 3, 20),
                                                 unary(kChair, 1, 2, 15),
                                                 unary(kChair, 0, 1, 10),
                                                 unary(kChair, 2, 5, 10),
                                                 unary(kChair, 5, 9, 5),
                                                 unary(kChair, 8, 9, 20),
                                                 unary(kTable, 0, 1, 60),
                                                 unary(kTable, 1, 4, 30),
                                                 unary(kTable, 4, 6, 5),
                                                 unary(kTable, 6, 9, 20),
                                                 unary(kTable, 8, 9, 10),
                                             });
}

inline Scenario scenario() {
  Scenario s;
  s.domain = domain();
  s.seed = 0;
  s.agents = {buyer(), seller()};
  return s;
}

// Negotiation parameters of the reference trace.
inline StrategyConfig strategy() {
  StrategyConfig c;
  c.deadline = 10;
  c.reservation_utility = 0.0;
  c.delta = 0.05;
  c.k = 2;
  c.similar_count = 2;
  c.n_cross = 2;
  c.n_mut = 2;
  c.p_pevo = 1.0;
  return c;
}

inline GaConfig self_sampling() {
  GaConfig g;
  g.population_size = 16;
  g.max_generations = 100;
  g.p_dc = 0.8;
  g.p_cr = 0.8;
  return g;
}

// The buyer's 16 self-sampled offers.
inline Population buyer_population() {
  const std::vector<Offer> offers = {
      {1, 1, 6}, {0, 1, 6}, {1, 7, 3}, {1, 7, 4}, {1, 9, 2}, {1, 2, 5}, {1, 8, 3}, {1, 8, 4},
      {0, 7, 3}, {1, 9, 3}, {0, 1, 5}, {1, 5, 0}, {1, 3, 0}, {1, 5, 3}, {0, 2, 4}, {1, 9, 1},
  };
  return score_offers(buyer(), offers);
}

// Seller proposals, one entry per seller turn.
inline std::vector<std::vector<Offer>> seller_proposals() {
  return {
      {{8, 1, 1}, {9, 1, 1}},
      {{6, 1, 1}, {9, 4, 1}},
      {{4, 1, 1}},
      {{1, 1, 1}, {1, 2, 1}},
  };
}

// Operator results of the buyer's evolutionary sampling in call order.
// Applications whose product was already stored reproduce an existing vector.
inline std::vector<ScriptedVariation::Step> buyer_variation_replay() {
  using Step = ScriptedVariation::Step;
  auto x = [](Offer opp, Offer own, Offer child) { return Step{true, std::move(opp), std::move(own), std::move(child)}; };
  auto m = [](Offer parent, Offer child) { return Step{false, std::move(parent), {}, std::move(child)}; };
  const Offer w2{8, 1, 1}, z2{9, 1, 1};
  const Offer w3{6, 1, 1}, z3{9, 4, 1};
  const Offer w4{4, 1, 1};
  return {
      // Turn 1: received (8,1,1), (9,1,1); similar offers (1,2,5), (0,1,5).
      x(w2, {1, 2, 5}, {8, 2, 5}),
      m({8, 2, 5}, {6, 2, 1}),
      m({8, 2, 5}, {6, 2, 1}),
      x(w2, {1, 2, 5}, {1, 1, 1}),
      m({1, 1, 1}, {1, 1, 7}),
      m({1, 1, 1}, {8, 1, 1}),
      x(w2, {0, 1, 5}, {0, 1, 1}),
      m({0, 1, 1}, {1, 1, 1}),
      m({0, 1, 1}, {0, 1, 1}),
      x(w2, {0, 1, 5}, {0, 1, 1}),
      m({0, 1, 1}, {8, 1, 1}),
      m({0, 1, 1}, {1, 1, 1}),
      m(w2, {2, 1, 4}),
      m(w2, {5, 7, 1}),
      x(z2, {1, 2, 5}, {9, 1, 5}),
      m({9, 1, 5}, {6, 1, 5}),
      m({9, 1, 5}, {1, 8, 5}),
      x(z2, {1, 2, 5}, {9, 2, 5}),
      m({9, 2, 5}, {1, 2, 3}),
      m({9, 2, 5}, {7, 6, 5}),
      x(z2, {0, 1, 5}, {9, 1, 5}),
      m({9, 1, 5}, {6, 1, 5}),
      m({9, 1, 5}, {1, 8, 5}),
      x(z2, {0, 1, 5}, {0, 1, 1}),
      m({0, 1, 1}, {1, 1, 1}),
      m({0, 1, 1}, {0, 1, 1}),
      m(z2, {4, 0, 1}),
      m(z2, {9, 2, 6}),
      // Turn 2: received (6,1,1), (9,4,1); similar offers (1,3,0), (1,5,0).
      x(w3, {1, 3, 0}, {1, 3, 1}),
      m({1, 3, 1}, {8, 8, 1}),
      m({1, 3, 1}, {1, 6, 7}),
      x(w3, {1, 3, 0}, {6, 1, 0}),
      m({6, 1, 0}, {6, 1, 0}),
      m({6, 1, 0}, {6, 2, 1}),
      x(w3, {1, 5, 0}, {1, 1, 0}),
      m({1, 1, 0}, {0, 1, 6}),
      m({1, 1, 0}, {1, 8, 5}),
      x(w3, {1, 5, 0}, {1, 1, 0}),
      m({1, 1, 0}, {1, 1, 0}),
      m({1, 1, 0}, {0, 1, 6}),
      m(w3, {6, 2, 1}),
      m(w3, {6, 1, 8}),
      x(z3, {1, 3, 0}, {9, 4, 0}),
      m({9, 4, 0}, {9, 5, 0}),
      m({9, 4, 0}, {1, 4, 1}),
      x(z3, {1, 3, 0}, {9, 4, 0}),
      m({9, 4, 0}, {9, 5, 0}),
      m({9, 4, 0}, {1, 4, 1}),
      x(z3, {1, 5, 0}, {1, 5, 1}),
      m({1, 5, 1}, {1, 7, 0}),
      m({1, 5, 1}, {4, 7, 1}),
      x(z3, {1, 5, 0}, {1, 5, 1}),
      m({1, 5, 1}, {1, 7, 0}),
      m({1, 5, 1}, {4, 7, 1}),
      m(z3, {8, 4, 1}),
      m(z3, {9, 6, 1}),
      // Turn 3: received (4,1,1); the demanded band holds no own offers.
      m(w4, {4, 1, 0}),
      m(w4, {4, 2, 1}),
  };
}

// The case-study buyer: the fixed population above with replayed operators.
inline std::unique_ptr<EvolutionarySamplingAgent> make_buyer_agent(std::uint64_t seed = 0) {
  StrategyConfig cfg = strategy();
  cfg.seed = seed;
  return std::make_unique<EvolutionarySamplingAgent>(buyer(), buyer_population(), cfg, true,
                                                     std::make_unique<ScriptedVariation>(buyer_variation_replay()));
}

inline std::unique_ptr<ScriptedAgent> make_seller_agent() {
  return std::make_unique<ScriptedAgent>(seller(), strategy(), seller_proposals());
}

}  // namespace negosim::fair_case
