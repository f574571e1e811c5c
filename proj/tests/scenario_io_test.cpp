#include <gtest/gtest.h>

#include <sstream>

#include "negosim/fair_case.hpp"
#include "negosim/scenario_io.hpp"

using namespace negosim;

namespace {

std::string fair_text() { return scenario_to_string(fair_case::scenario()); }

void replace_first(std::string& s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  s.replace(pos, from.size(), to);
}

}  // namespace

TEST(ScenarioIo, RoundTripPreservesStructure) {
  const Scenario sc = fair_case::scenario();
  const Scenario back = scenario_from_string(scenario_to_string(sc));
  EXPECT_EQ(back, sc);
  EXPECT_EQ(scenario_to_string(back), scenario_to_string(sc));
}

TEST(ScenarioIo, RoundTripOfGeneratedScenario) {
  ScenarioSpec spec;
  spec.domain = {4, 0, 9};
  spec.seed = 1234;
  const Scenario sc = generate_scenario(spec);
  const Scenario back = scenario_from_string(scenario_to_string(sc));
  EXPECT_EQ(back, sc);
}

TEST(ScenarioIo, BundledFixtureMatchesCode) {
  const Scenario file = load_scenario(std::string(NEGOSIM_SOURCE_DIR) + "/data/fair_case.json");
  EXPECT_EQ(file, fair_case::scenario());
}

TEST(ScenarioIo, IntervalWithLoAboveHiIsRejected) {
  std::string text = fair_text();
  replace_first(text, "\"hi\": 1,\n              \"issue\": 0,\n              \"lo\": 0",
                "\"hi\": 1,\n              \"issue\": 0,\n              \"lo\": 5");
  try {
    scenario_from_string(text, "bad.json");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json:/agents/0/constraints/0"), std::string::npos) << e.what();
  }
}

TEST(ScenarioIo, MissingMaxRawIsRecomputedWithWarning) {
  std::string text = fair_text();
  replace_first(text, "\"max_raw\": 160.0", "\"unused\": 0");
  std::ostringstream warn;
  const Scenario sc = scenario_from_string(text, "x.json", &warn);
  EXPECT_DOUBLE_EQ(sc.agents[0].max_raw(), 160.0);
  EXPECT_NE(warn.str().find("max_raw missing"), std::string::npos);
}

TEST(ScenarioIo, MalformedInputsNameTheirLocation) {
  EXPECT_THROW(scenario_from_string("{\n\"seed\": 1,\n  oops", "s.json"), ParseError);
  try {
    scenario_from_string("{\n\"seed\": 1,\n  oops", "s.json");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("s.json:3"), std::string::npos) << e.what();
  }
  std::string one_agent = fair_text();
  const auto pos = one_agent.find("\"agents\": [");
  ASSERT_NE(pos, std::string::npos);
  const io::json doc = io::json::parse(one_agent);
  io::json trimmed = doc;
  trimmed["agents"].erase(1);
  EXPECT_THROW(scenario_from_string(trimmed.dump()), ParseError);
  io::json bad_offer_domain = doc;
  bad_offer_domain["domain"]["upper"] = 5;
  EXPECT_THROW(scenario_from_string(bad_offer_domain.dump()), ParseError);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ParseError);
}

TEST(PopulationIo, RoundTrip) {
  Population p = fair_case::buyer_population();
  p.generation = 100;
  const Population back = population_from_string(population_to_string(p), fair_case::domain());
  EXPECT_EQ(back, p);
  EXPECT_NE(population_to_string(p).find("\"generation\": 100"), std::string::npos);
}

TEST(PopulationIo, RejectsOffersOutsideTheDomain) {
  const std::string text = R"({"generation": 0, "population": [{"offer": [1, 2, 10], "fitness": 0.5}]})";
  EXPECT_THROW(population_from_string(text, fair_case::domain()), ParseError);
  const std::string missing = R"({"generation": 0, "population": [{"fitness": 0.5}]})";
  EXPECT_THROW(population_from_string(missing, fair_case::domain()), ParseError);
}
