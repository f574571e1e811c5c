// Command-line front end: scenario generation, single sessions, Pareto/Nash
// oracle, batch experiments and report reconciliation.
//
// Exit codes: 0 success, 1 usage or malformed input, 2 capability, oracle
// or runtime failure.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fmt/format.h"
#include "negosim/negosim.hpp"

namespace {

using namespace negosim;

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string join_offers(const std::vector<Offer>& offers) {
  std::string s;
  for (const auto& o : offers) {
    if (!s.empty()) s += '|';
    s += to_string(o);
  }
  return s;
}

int cmd_gen(int issues, std::uint64_t seed, int lower, int upper, const std::string& out) {
  ScenarioSpec spec;
  spec.domain = {issues, lower, upper};
  spec.seed = seed;
  save_scenario(generate_scenario(spec), out);
  std::cerr << "wrote " << out << "\n";
  return 0;
}

std::string front_table(const ParetoFront& front) {
  const JointPoint& nash = nash_point(front);
  std::string s = "kind,u_a,u_b,product,offer,equivalent\n";
  auto row = [&](const char* kind, const JointPoint& p) {
    s += fmt::format("{},{},{},{},{},{}\n", kind, p.u_a, p.u_b, p.product(), quoted(to_string(p.offer)),
                     quoted(join_offers(p.equivalent)));
  };
  for (const auto& p : front.points) row("front", p);
  row("nash", nash);
  return s;
}

int cmd_pareto(const std::string& scenario_path, const std::string& out, unsigned threads) {
  const Scenario sc = load_scenario(scenario_path);
  const ParetoFront front = enumerate_front(sc.agents[0], sc.agents[1], threads);
  const std::string table = front_table(front);
  if (out.empty() || out == "-") {
    std::cout << table;
  } else {
    io::write_file(out, table);
  }
  const JointPoint& nash = nash_point(front);
  std::cerr << fmt::format("front points={} nash=({}) u_a={:.4f} u_b={:.4f}\n", front.size(), to_string(nash.offer),
                           nash.u_a, nash.u_b);
  return 0;
}

int cmd_run(const std::string& scenario_path, const std::string& spec_a, const std::string& spec_b, int k,
            std::uint64_t seed, int max_rounds, const std::string& trace) {
  const Scenario sc = load_scenario(scenario_path);
  const StrategySpec a = parse_strategy(spec_a), b = parse_strategy(spec_b);
  const SessionResult r = run_matchup_session(a, b, sc, k, seed, max_rounds);
  const std::string log = serialize_transcript(r.transcript);
  if (!trace.empty()) {
    io::write_file(trace, log);
  } else {
    std::cerr << log;
  }
  ParetoFront front;
  if (sc.domain.enumerable()) {
    front = enumerate_front(sc.agents[0], sc.agents[1]);
  } else {
    std::cerr << "warning: domain too large for the Pareto oracle; distances are reported as nan\n";
  }
  OutcomeMetrics m;
  if (!front.empty()) {
    m = outcome_metrics(r.transcript, sc.agents[0], sc.agents[1], front);
  } else {
    m.rounds = r.transcript.rounds();
    m.samples_a = r.transcript.samples_a;
    m.samples_b = r.transcript.samples_b;
    if (const auto* ag = r.transcript.agreement()) {
      m.agreed = true;
      m.u_a = sc.agents[0].evaluate(ag->offer);
      m.u_b = sc.agents[1].evaluate(ag->offer);
    }
  }
  const auto* ag = r.transcript.agreement();
  std::cout << "outcome,offer,u_a,u_b,dist_pareto,dist_nash,rounds,samples_a,samples_b\n";
  std::cout << fmt::format("{},{},{},{},{},{},{},{},{}\n", outcome_name(r.transcript.outcome),
                           quoted(ag ? to_string(ag->offer) : ""), m.u_a, m.u_b, m.dist_pareto, m.dist_nash, m.rounds,
                           m.samples_a, m.samples_b);
  return 0;
}

int cmd_sample(const std::string& scenario_path, int agent, int population, int generations, std::uint64_t seed,
               const std::string& out) {
  const Scenario sc = load_scenario(scenario_path);
  if (agent < 0 || agent > 1) throw ConfigError("--agent must be 0 or 1");
  GaConfig ga;
  ga.population_size = population;
  ga.max_generations = generations;
  ga.seed = seed;
  const std::string text = population_to_string(self_sample(sc.agents[static_cast<std::size_t>(agent)], ga));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    io::write_file(out, text);
  }
  return 0;
}

int cmd_experiment(const std::string& plan_path, const std::string& out_dir, unsigned threads) {
  ExperimentPlan plan = load_plan(plan_path);
  if (threads > 0) plan.threads = threads;
  const ExperimentResult r = run_experiment(plan, &std::cerr);
  write_results(r, out_dir);
  std::cout << csv::kAggregateHeader << "\n";
  for (const auto& a : r.aggregates) std::cout << csv::aggregate_line(a) << "\n";
  return 0;
}

int cmd_report(const std::string& in_dir, const std::string& out) {
  const auto rows = build_report(in_dir);
  const std::string text = format_report(rows);
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    io::write_file(out, text);
  }
  for (const auto& r : rows)
    if (!r.reconciled) {
      std::cerr << fmt::format("error: aggregate row {} N={} k={} does not reconcile with its run file\n",
                               r.aggregate.matchup, r.aggregate.issues, r.aggregate.k);
      return 2;
    }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilateral multi-issue negotiation simulator"};
  app.require_subcommand(1);

  int issues = 4, lower = 0, upper = 9, k = 3, max_rounds = 100, agent = 0, population = 128, generations = 100;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string out, scenario, spec_a = "es", spec_b = "es", trace, plan, in_dir;

  auto* gen = app.add_subcommand("gen", "Generate a random scenario");
  gen->add_option("--issues", issues, "Number of issues")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Scenario seed")->required();
  gen->add_option("--lower", lower, "Lowest issue value");
  gen->add_option("--upper", upper, "Highest issue value");
  gen->add_option("--out", out, "Output file")->required();

  auto* run = app.add_subcommand("run", "Run one negotiation session");
  run->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--strategy-a", spec_a, "Strategy of the initiator, e.g. es:M=5");
  run->add_option("--strategy-b", spec_b, "Strategy of the responder");
  run->add_option("--k", k, "Offers per proposal")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Session seed");
  run->add_option("--max-rounds", max_rounds, "Round cap")->check(CLI::PositiveNumber);
  run->add_option("--trace", trace, "Transcript output file (stderr when omitted)");

  auto* pareto = app.add_subcommand("pareto", "Enumerate the Pareto front and Nash point");
  pareto->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  pareto->add_option("--out", out, "Output table (stdout when omitted)");
  pareto->add_option("--threads", threads, "Worker threads");

  auto* sample = app.add_subcommand("sample", "Export a self-sampled population");
  sample->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sample->add_option("--agent", agent, "Agent index (0 or 1)");
  sample->add_option("--population", population, "Population size");
  sample->add_option("--generations", generations, "Generations");
  sample->add_option("--seed", seed, "GA seed");
  sample->add_option("--out", out, "Output file (stdout when omitted)");

  auto* experiment = app.add_subcommand("experiment", "Run an experiment plan");
  experiment->add_option("--plan", plan, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out-dir", out, "Result directory")->required();
  experiment->add_option("--threads", threads, "Override the plan's worker threads");

  auto* report = app.add_subcommand("report", "Reconcile and tabulate experiment results");
  report->add_option("--in", in_dir, "Result directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--out", out, "Output table (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(issues, seed, lower, upper, out);
    if (*run) return cmd_run(scenario, spec_a, spec_b, k, seed, max_rounds, trace);
    if (*pareto) return cmd_pareto(scenario, out, std::max(1u, threads));
    if (*sample) return cmd_sample(scenario, agent, population, generations, seed, out);
    if (*experiment) return cmd_experiment(plan, out, threads);
    if (*report) return cmd_report(in_dir, out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const negosim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
