#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "negosim/fair_case.hpp"
#include "negosim/niching.hpp"

using namespace negosim;

namespace {

// |observed - n p| within four binomial standard deviations.
void expect_binomial(int hits, int trials, double p) {
  const double sd = std::sqrt(trials * p * (1 - p));
  EXPECT_NEAR(hits, trials * p, 4 * sd) << hits << " of " << trials;
}

}  // namespace

TEST(DeterministicCrowding, FitterWins) {
  Rng rng(1);
  const ScoredOffer s1{{1}, 0.9}, s2{{2}, 0.5};
  EXPECT_EQ(&deterministic_crowding(s1, s2, rng), &s1);
  EXPECT_EQ(&deterministic_crowding(s2, s1, rng), &s1);
  const ScoredOffer z{{0}, 0.0}, small{{3}, 0.01};
  EXPECT_EQ(&deterministic_crowding(z, small, rng), &small);
}

TEST(DeterministicCrowding, TieIsAFairCoin) {
  Rng rng(2);
  const ScoredOffer s1{{1}, 0.7}, s2{{2}, 0.7};
  int first = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) first += &deterministic_crowding(s1, s2, rng) == &s1;
  expect_binomial(first, trials, 0.5);
}

TEST(ProbabilisticCrowding, ProportionalToFitness) {
  Rng rng(3);
  const ScoredOffer s1{{1}, 3.0}, s2{{2}, 1.0};
  const int trials = 20000;
  int first = 0;
  for (int i = 0; i < trials; ++i) first += &probabilistic_crowding(s1, s2, rng) == &s1;
  // Chi-square with one degree of freedom; 10.83 is the 0.999 quantile.
  const double e1 = 0.75 * trials, e2 = 0.25 * trials;
  const double chi2 = (first - e1) * (first - e1) / e1 + (trials - first - e2) * (trials - first - e2) / e2;
  EXPECT_LT(chi2, 10.83);
}

TEST(ProbabilisticCrowding, SymmetricAndDegenerateCases) {
  Rng rng(4);
  const int trials = 10000;
  for (double f : {0.4, 0.0}) {
    const ScoredOffer s1{{1}, f}, s2{{2}, f};
    int first = 0;
    for (int i = 0; i < trials; ++i) first += &probabilistic_crowding(s1, s2, rng) == &s1;
    expect_binomial(first, trials, 0.5);
  }
}

TEST(Crossover, IdenticalParents) {
  Rng rng(5);
  const Offer p{3, 1, 4, 1, 5};
  const auto [c1, c2] = multipoint_crossover(p, p, 2, rng);
  EXPECT_EQ(c1, p);
  EXPECT_EQ(c2, p);
}

TEST(Crossover, ExplicitCutSwapsTheTail) {
  const std::vector<int> cuts{0};
  const auto [c1, c2] = multipoint_crossover_at({8, 1, 1}, {1, 2, 5}, cuts);
  EXPECT_EQ(c1, (Offer{8, 2, 5}));
  EXPECT_EQ(c2, (Offer{1, 1, 1}));
  const std::vector<int> two{0, 1};
  const auto [d1, d2] = multipoint_crossover_at({8, 1, 1}, {1, 2, 5}, two);
  EXPECT_EQ(d1, (Offer{8, 2, 1}));
  EXPECT_EQ(d2, (Offer{1, 1, 5}));
}

TEST(Crossover, GenesComeFromTheParentsAtTheSamePosition) {
  Rng rng(6);
  const IssueDomain d{6, 0, 9};
  for (int trial = 0; trial < 500; ++trial) {
    Offer p1 = d.decode(static_cast<std::uint64_t>(uniform_int(rng, 0, 999999)));
    Offer p2 = d.decode(static_cast<std::uint64_t>(uniform_int(rng, 0, 999999)));
    const auto [c1, c2] = multipoint_crossover(p1, p2, 2, rng);
    for (std::size_t i = 0; i < p1.size(); ++i) {
      EXPECT_TRUE(c1[i] == p1[i] || c1[i] == p2[i]);
      // Children are complementary: each gene position is a permutation of the parents'.
      EXPECT_TRUE((c1[i] == p1[i] && c2[i] == p2[i]) || (c1[i] == p2[i] && c2[i] == p1[i]));
    }
  }
}

TEST(Crossover, SingleIssueReturnsParents) {
  Rng rng(7);
  const auto [c1, c2] = multipoint_crossover({4}, {7}, 2, rng);
  EXPECT_EQ(c1, (Offer{4}));
  EXPECT_EQ(c2, (Offer{7}));
}

TEST(Mutation, RateZeroIsIdentity) {
  Rng rng(8);
  const IssueDomain d{4, 0, 9};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(ga_mutate({1, 2, 3, 4}, 0.0, d, rng), (Offer{1, 2, 3, 4}));
}

TEST(Mutation, RateOneResetsUniformly) {
  Rng rng(9);
  const IssueDomain d{3, 0, 9};
  std::vector<int> counts(10, 0);
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const Offer c = ga_mutate({5, 5, 5}, 1.0, d, rng);
    for (int v : c) ++counts[static_cast<std::size_t>(v)];
  }
  const double expected = 3.0 * trials / 10.0;
  double chi2 = 0.0;
  for (int n : counts) chi2 += (n - expected) * (n - expected) / expected;
  EXPECT_LT(chi2, 27.88);  // 9 degrees of freedom, 0.999 quantile
}

TEST(Mutation, ReachesTwoIssueRedraw) {
  Rng rng(10);
  const IssueDomain d{3, 0, 9};
  bool found = false;
  for (int i = 0; i < 100000 && !found; ++i) found = ga_mutate({9, 2, 5}, 1.0 / 3.0, d, rng) == Offer{1, 2, 3};
  EXPECT_TRUE(found);
}

TEST(Pairing, IdentityWhenChildrenEqualParents) {
  const auto p = pair_by_distance({1, 2}, {3, 4}, {1, 2}, {3, 4});
  EXPECT_FALSE(p.crossed);
  EXPECT_EQ(p.total_distance, 0.0);
}

TEST(Pairing, CrossedWhenCloser) {
  const auto p = pair_by_distance({0, 0}, {9, 9}, {9, 8}, {1, 0});
  EXPECT_TRUE(p.crossed);
  EXPECT_DOUBLE_EQ(p.total_distance, 2.0);  // |(0,0)-(1,0)| + |(9,9)-(9,8)|
}

TEST(Pairing, SymmetricTieKeepsIdentity) {
  const auto p = pair_by_distance({0, 0}, {2, 0}, {1, 0}, {1, 0});
  EXPECT_FALSE(p.crossed);
}

TEST(GaConfig, Validation) {
  GaConfig g;
  g.population_size = 15;
  EXPECT_THROW(g.validate(), ConfigError);
  g.population_size = 0;
  EXPECT_THROW(g.validate(), ConfigError);
  g = GaConfig{};
  g.p_dc = 1.5;
  EXPECT_THROW(g.validate(), ConfigError);
  g = GaConfig{};
  g.mutation_rate = -0.1;
  EXPECT_THROW(g.validate(), ConfigError);
  EXPECT_DOUBLE_EQ(GaConfig{}.mutation_rate_for(4), 0.25);
}

TEST(SelfSample, ObserverSeesEveryGeneration) {
  const auto u = fair_case::buyer();
  GaConfig g = fair_case::self_sampling();
  g.max_generations = 25;
  Rng rng(11);
  std::vector<int> generations;
  const Population p = self_sample(u, g, rng, [&](const Population& pop) {
    generations.push_back(pop.generation);
    EXPECT_EQ(pop.size(), 16u);
  });
  ASSERT_EQ(generations.size(), 26u);
  for (int i = 0; i <= 25; ++i) EXPECT_EQ(generations[static_cast<std::size_t>(i)], i);
  EXPECT_EQ(p.generation, 25);
  for (const auto& m : p.members) EXPECT_DOUBLE_EQ(m.fitness, u.evaluate(m.offer));
}

TEST(SelfSample, SameSeedSamePopulation) {
  const auto u = fair_case::buyer();
  GaConfig g = fair_case::self_sampling();
  g.seed = 77;
  EXPECT_EQ(self_sample(u, g), self_sample(u, g));
  GaConfig h = g;
  h.seed = 78;
  EXPECT_FALSE(self_sample(u, g) == self_sample(u, h));
}

TEST(SelfSample, ElitistSettingNeverLosesTheBest) {
  ScenarioSpec spec;
  spec.domain = {5, 0, 9};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    spec.seed = seed;
    const auto u = generate_scenario(spec).agents[0];
    GaConfig g;
    g.population_size = 32;
    g.p_dc = 1.0;
    g.p_cr = 0.0;
    g.seed = seed;
    double best = -1.0;
    Rng rng(seed);
    self_sample(u, g, rng, [&](const Population& pop) {
      double m = 0.0;
      for (const auto& s : pop.members) m = std::max(m, s.fitness);
      EXPECT_GE(m, best) << "generation " << pop.generation;
      best = m;
    });
  }
}

TEST(SelfSample, FairCaseBuyerFindsSeveralGoodOffers) {
  const auto u = fair_case::buyer();
  int diverse = 0;
  const int runs = 50;
  for (int seed = 0; seed < runs; ++seed) {
    GaConfig g = fair_case::self_sampling();
    g.seed = static_cast<std::uint64_t>(seed);
    const Population p = self_sample(u, g);
    std::set<Offer> distinct, good;
    for (const auto& m : p.members) {
      distinct.insert(m.offer);
      if (m.fitness >= 0.62) good.insert(m.offer);
    }
    diverse += distinct.size() >= 4 && good.size() >= 2;
  }
  EXPECT_GE(diverse, 45) << "runs with >= 4 distinct offers and >= 2 good ones";
}
