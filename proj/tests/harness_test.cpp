#include <gtest/gtest.h>

#include <filesystem>

#include "negosim/harness.hpp"

using namespace negosim;
namespace fs = std::filesystem;

namespace {

ExperimentPlan tiny_plan() {
  ExperimentPlan p;
  p.name = "tiny";
  p.issue_counts = {3};
  p.k_values = {2};
  p.scenarios_per_setting = 3;
  p.repetitions = 2;
  p.calibration_runs = 2;
  p.master_seed = 5;
  p.matchups = {{"es", parse_strategy("es:P=16,n_max=10"), parse_strategy("es:P=16,n_max=10")},
                {"nes", parse_strategy("nes:P=16,n_max=10"), parse_strategy("nes:P=16,n_max=10")},
                {"full", parse_strategy("full"), parse_strategy("full")}};
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("negosim_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(StrategySpecs, Parsing) {
  const StrategySpec es = parse_strategy("es:M=5,n_cross=4,n_mut=3,p_attr=0.25,p_pevo=1/3,P=64,n_max=50,T=12");
  EXPECT_EQ(es.kind, StrategyKind::Es);
  EXPECT_EQ(es.strategy.similar_count, 5);
  EXPECT_EQ(es.strategy.n_cross, 4);
  EXPECT_EQ(es.strategy.n_mut, 3);
  EXPECT_DOUBLE_EQ(es.strategy.p_attr, 0.25);
  EXPECT_DOUBLE_EQ(es.strategy.p_pevo, 1.0 / 3.0);
  EXPECT_EQ(es.ga.population_size, 64);
  EXPECT_EQ(es.ga.max_generations, 50);
  EXPECT_EQ(es.strategy.deadline, 12);
  EXPECT_EQ(parse_strategy("nes").kind, StrategyKind::Nes);
  EXPECT_EQ(parse_strategy("full:delta=0.1").strategy.delta, 0.1);
  EXPECT_EQ(parse_strategy("es").ga.population_size, 128);
  EXPECT_FALSE(parse_strategy("nes:parity=0").budget_parity);
  EXPECT_EQ(parse_strategy("fair-buyer").kind, StrategyKind::FairBuyer);
}

TEST(StrategySpecs, Errors) {
  EXPECT_THROW(parse_strategy("greedy"), ConfigError);
  EXPECT_THROW(parse_strategy("es:M"), ConfigError);
  EXPECT_THROW(parse_strategy("es:bogus=1"), ConfigError);
  EXPECT_THROW(parse_strategy("es:M=x"), ConfigError);
  EXPECT_THROW(parse_strategy("es:M=2.5"), ConfigError);
  EXPECT_THROW(parse_strategy("es:p_pevo=1/0"), ConfigError);
  EXPECT_THROW(parse_strategy("es:p_pevo=2"), ConfigError);
  EXPECT_THROW(parse_strategy("es:P=15"), ConfigError);
}

TEST(StrategySpecs, FairAgentsOnlyPlayTheFairCase) {
  ScenarioSpec spec;
  spec.domain = {3, 0, 9};
  const Scenario sc = generate_scenario(spec);
  EXPECT_THROW(build_agent(parse_strategy("fair-buyer"), sc.agents[0], 2, 0), ConfigError);
  EXPECT_THROW(build_agent(parse_strategy("fair-buyer"), fair_case::buyer(), 3, 0), ConfigError);
  EXPECT_NO_THROW(build_agent(parse_strategy("fair-seller"), fair_case::seller(), 2, 0));
}

TEST(Aggregate, Examples) {
  const std::vector<double> ones{1, 1, 1, 1};
  const auto a = aggregate(ones);
  EXPECT_DOUBLE_EQ(a.mean, 1.0);
  EXPECT_DOUBLE_EQ(a.half_width, 0.0);
  // sd = sqrt(2) with the n - 1 denominator, so 1.96 sqrt(2) / sqrt(2).
  const std::vector<double> two{0, 2};
  const auto b = aggregate(two);
  EXPECT_DOUBLE_EQ(b.mean, 1.0);
  EXPECT_NEAR(b.half_width, 1.96, 1e-12);
  const std::vector<double> one{0.37};
  EXPECT_DOUBLE_EQ(aggregate(one).mean, 0.37);
  EXPECT_DOUBLE_EQ(aggregate(one).half_width, 0.0);
  EXPECT_THROW(aggregate(std::vector<double>{}), Error);
  EXPECT_TRUE(intervals_overlap({1.0, 0.5}, {1.4, 0.0}));
  EXPECT_FALSE(intervals_overlap({1.0, 0.1}, {1.4, 0.2}));
}

TEST(PairedTest, DetectsAConsistentImprovement) {
  const std::vector<double> x{0.1, 0.2, 0.15, 0.12, 0.18, 0.11};
  const std::vector<double> y{0.3, 0.35, 0.33, 0.29, 0.4, 0.31};
  const auto t = paired_less(x, y);
  EXPECT_EQ(t.n, 6u);
  EXPECT_LT(t.mean_difference, 0.0);
  EXPECT_LT(t.p_value, 0.01);
  EXPECT_GT(paired_less(y, x).p_value, 0.99);
  EXPECT_DOUBLE_EQ(paired_less(x, x).p_value, 1.0);
  EXPECT_THROW(paired_less(x, std::vector<double>{1.0}), Error);
}

TEST(Parity, PopulationFromMeanRounds) {
  StrategySpec nes = parse_strategy("nes:M=5,n_cross=4,n_mut=4");
  EXPECT_EQ(parity_population(nes, 3, 4.43), 1510);
  EXPECT_EQ(parity_population(nes, 3, 0.0), 128);
  EXPECT_EQ(parity_population(nes, 1, 1.0) % 2, 0);
}

TEST(Plans, ParseAndValidate) {
  const std::string text = R"({
    "name": "exp1", "issue_counts": [4, 5], "k_values": [3], "scenarios_per_setting": 20,
    "repetitions": 10, "master_seed": 42, "threads": 2,
    "matchups": [{"label": "es", "a": "es", "b": "es"}, {"label": "nes", "a": "nes", "b": "nes"}]
  })";
  const ExperimentPlan p = plan_from_string(text);
  EXPECT_EQ(p.name, "exp1");
  EXPECT_EQ(p.issue_counts, (std::vector<int>{4, 5}));
  EXPECT_EQ(p.matchups.size(), 2u);
  EXPECT_EQ(p.matchups[1].a.kind, StrategyKind::Nes);
  EXPECT_EQ(p.master_seed, 42u);
  EXPECT_EQ(p.threads, 2u);
  EXPECT_EQ(p.calibration_runs, 10);
}

TEST(Plans, MalformedPlansAreRejected) {
  EXPECT_THROW(plan_from_string(R"({"matchups": []})"), ParseError);
  EXPECT_THROW(plan_from_string(R"({"matchups": [{"label": "x", "a": "es"}]})"), ParseError);
  EXPECT_THROW(plan_from_string(R"({"matchups": [{"label": "x", "a": "es", "b": "zz"}]})"), ParseError);
  EXPECT_THROW(plan_from_string(R"({"repetitions": 0, "matchups": [{"label": "x", "a": "es", "b": "es"}]})"),
               ParseError);
  EXPECT_THROW(plan_from_string(R"({"scenarios_per_setting": 0, "matchups": [{"label": "x", "a": "es", "b": "es"}]})"),
               ParseError);
  EXPECT_THROW(plan_from_string(R"({"oops": 1, "matchups": [{"label": "x", "a": "es", "b": "es"}]})"), ParseError);
  EXPECT_THROW(plan_from_string(R"({"matchups": [{"label": "a b", "a": "es", "b": "es"}]})"), ParseError);
  EXPECT_THROW(plan_from_string(R"({"matchups": [{"label": "x", "a": "es", "b": "es"},
                                                 {"label": "x", "a": "es", "b": "es"}]})"),
               ParseError);
  EXPECT_THROW(plan_from_string(R"({"matchups": [{"label": "x", "a": "fair-buyer", "b": "es"}]})"), ParseError);
  EXPECT_THROW(plan_from_string("[1, 2"), ParseError);
}

TEST(Experiment, SingleCellHasZeroWidth) {
  ExperimentPlan p = tiny_plan();
  p.scenarios_per_setting = 1;
  p.repetitions = 1;
  p.matchups.resize(1);
  const ExperimentResult r = run_experiment(p);
  ASSERT_EQ(r.aggregates.size(), 1u);
  ASSERT_EQ(r.runs.size(), 1u);
  const auto& a = r.aggregates[0];
  EXPECT_EQ(a.runs, 1u);
  if (a.agreements == 1) {
    EXPECT_EQ(a.dist_nash.half_width, 0.0);
    EXPECT_EQ(a.rounds.half_width, 0.0);
  } else {
    EXPECT_TRUE(std::isnan(a.dist_nash.mean));
  }
}

TEST(Experiment, OneRowPerSettingAndMatchup) {
  ExperimentPlan p = tiny_plan();
  p.issue_counts = {3, 4};
  p.k_values = {1, 2};
  const ExperimentResult r = run_experiment(p);
  EXPECT_EQ(r.aggregates.size(), 3u * 2 * 2);
  EXPECT_EQ(r.runs.size(), 3u * 2 * 2 * 3 * 2);
  for (const auto& a : r.aggregates) {
    EXPECT_EQ(a.runs, 6u);
    EXPECT_GE(a.dist_nash.half_width, 0.0);
    EXPECT_GE(a.failure_rate, 0.0);
    EXPECT_LE(a.failure_rate, 1.0);
  }
  // NES agents play with the calibrated budget.
  ASSERT_EQ(r.calibration.size(), 2u * 2 * 2);
  for (const auto& row : r.runs)
    if (row.matchup == "nes") {
      EXPECT_GE(row.population_a, 16);
      bool found = false;
      for (const auto& c : r.calibration)
        if (c.issues == row.issues && c.k == row.k && c.side == "a") found = found || c.population == row.population_a;
      EXPECT_TRUE(found);
    }
  for (const auto& row : r.runs) {
    if (!row.metrics.agreed) continue;
    EXPECT_GE(row.metrics.dist_pareto, 0.0);
    EXPECT_GE(row.metrics.dist_nash, row.metrics.dist_pareto - 1e-12);
  }
}

TEST(Experiment, ResultsDoNotDependOnThreads) {
  ExperimentPlan p = tiny_plan();
  const ExperimentResult one = run_experiment(p);
  p.threads = 4;
  const ExperimentResult four = run_experiment(p);
  ASSERT_EQ(one.runs.size(), four.runs.size());
  for (std::size_t i = 0; i < one.runs.size(); ++i) EXPECT_EQ(csv::run_line(one.runs[i]), csv::run_line(four.runs[i]));
  for (std::size_t i = 0; i < one.aggregates.size(); ++i)
    EXPECT_EQ(csv::aggregate_line(one.aggregates[i]), csv::aggregate_line(four.aggregates[i]));
}

TEST(Experiment, MatchupsShareRunSeeds) {
  const ExperimentResult r = run_experiment(tiny_plan());
  const auto es = select_runs(r, "es", 3, 2), full = select_runs(r, "full", 3, 2);
  ASSERT_EQ(es.size(), full.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    EXPECT_EQ(es[i].seed, full[i].seed);
    EXPECT_EQ(es[i].scenario, full[i].scenario);
  }
  EXPECT_NO_THROW(paired_dist_nash(r, "es", "nes", 3, 2));
}

TEST(Experiment, CapabilityErrorsCarryTheSetting) {
  ExperimentPlan p = tiny_plan();
  p.issue_counts = {8};
  p.scenarios_per_setting = 1;
  try {
    run_experiment(p);
    FAIL() << "expected a capability error";
  } catch (const CapabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("N=8"), std::string::npos) << e.what();
  }
}

TEST(Output, FilesReconcileWithAggregates) {
  const ExperimentResult r = run_experiment(tiny_plan());
  const fs::path dir = scratch("reconcile");
  write_results(r, dir);
  EXPECT_TRUE(fs::exists(dir / "aggregate.csv"));
  EXPECT_TRUE(fs::exists(dir / "timing.csv"));
  EXPECT_TRUE(fs::exists(dir / "calibration.csv"));
  EXPECT_TRUE(fs::exists(dir / "runs_nes_N3_k2.csv"));
  const auto report = build_report(dir);
  ASSERT_EQ(report.size(), 3u);
  for (const auto& row : report) EXPECT_TRUE(row.reconciled) << row.aggregate.matchup;
  const std::string table = format_report(report);
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "matchup,issues,k,runs,failure_rate,dist_nash,dist_nash_lo,dist_nash_hi,dist_pareto,dist_pareto_lo,"
            "dist_pareto_hi,rounds,rounds_lo,rounds_hi,samples,reconciled");

  // Dropping a run row breaks reconciliation.
  const fs::path runs = dir / "runs_es_N3_k2.csv";
  std::string text = io::read_file(runs);
  text.erase(text.rfind('\n', text.size() - 2) + 1);
  io::write_file(runs, text);
  const auto broken = build_report(dir);
  EXPECT_FALSE(broken[0].reconciled);
  EXPECT_TRUE(broken[1].reconciled);
  fs::remove_all(dir);
}

TEST(Output, RepeatedRunsAreByteIdentical) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  write_results(run_experiment(tiny_plan()), a);
  write_results(run_experiment(tiny_plan()), b);
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (name == "timing.csv") continue;
    EXPECT_EQ(io::read_file(entry.path()), io::read_file(b / name)) << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Session, FairCaseFromSpecs) {
  const Scenario sc = fair_case::scenario();
  const SessionResult r =
      run_matchup_session(parse_strategy("fair-buyer"), parse_strategy("fair-seller"), sc, 2, 0, 100);
  ASSERT_TRUE(r.transcript.agreed());
  EXPECT_EQ(r.transcript.rounds(), 4);
  EXPECT_EQ(outcome_name(r.transcript.outcome), "agreement");
  EXPECT_EQ(r.population_a, 16);
}

TEST(Plans, BundledPlansLoad) {
  const fs::path dir = fs::path(NEGOSIM_SOURCE_DIR) / "data" / "plans";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(load_plan(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}
