#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sks/correlated.hpp"
#include "sks/error.hpp"
#include "sks/experiment.hpp"
#include "sks/hst.hpp"
#include "sks/io.hpp"
#include "sks/oracles.hpp"
#include "sks/planner.hpp"
#include "sks/rounding.hpp"
#include "sks/uber.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitResource = 3;

struct Common {
  std::string metric;
  std::string dists;
  int k = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t trials = 1000;
  std::string out;
  double sigma = 6.0;
  std::string mode = "cover";
  std::string exact = "on";
  std::uint64_t budget = sks::kDefaultOracleBudget;
};

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) sks::fail(sks::ErrorKind::kValidation, "cannot write '" + path.string() + "'");
  return out;
}

sks::Configuration parse_config(const std::string& text) {
  std::vector<sks::PointId> pos;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      pos.push_back(std::stoi(item));
    } catch (const std::exception&) {
      sks::fail(sks::ErrorKind::kValidation, "bad point '" + item + "' in configuration '" + text + "'");
    }
  }
  return sks::Configuration(std::move(pos));
}

std::string show(const sks::Configuration& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.k(); ++i) s += (i ? "," : "") + std::to_string(c.positions()[i]);
  return s + "}";
}

sks::MetricKind parse_kind(const std::string& text) {
  if (text == "line") return sks::MetricKind::kLine;
  if (text == "circle") return sks::MetricKind::kCircle;
  if (text == "general") return sks::MetricKind::kGeneral;
  sks::fail(sks::ErrorKind::kValidation, "unknown metric kind '" + text + "'");
}

void require_seed(const Common& c, const char* what) {
  if (!c.seed_given) sks::fail(sks::ErrorKind::kValidation, std::string(what) + " is randomized; pass --seed");
}

void load(const Common& c, std::optional<sks::Metric>& m, std::optional<sks::DistributionSequence>& d) {
  m = sks::load_metric(c.metric);
  std::vector<std::string> warnings;
  d = sks::load_distributions(c.dists, *m, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_solve(const Common& c, const std::string& dump_lp, const std::string& start) {
  std::optional<sks::Metric> m;
  std::optional<sks::DistributionSequence> d;
  load(c, m, d);
  std::optional<sks::Configuration> fixed;
  if (!start.empty()) fixed = parse_config(start);
  const sks::PlannerResult r = sks::plan_nonadaptive(*m, *d, c.k, {}, fixed);
  if (!dump_lp.empty()) {
    std::ofstream out(dump_lp);
    if (!out) sks::fail(sks::ErrorKind::kValidation, "cannot write '" + dump_lp + "'");
    sks::write_lp_text(r.program.lp, out);
  }
  const sks::CertificateReport cert = sks::lp_dual_bound(r.program.lp, r.solution);
  std::cout << "lp_value " << sks::format_number(r.solution.objective_value) << '\n'
            << "iterations " << r.solution.iterations << '\n'
            << "certificate " << (cert.pass ? "pass" : "fail") << " gap " << sks::format_number(cert.gap)
            << " violation " << sks::format_number(cert.max_violation) << '\n';
  if (!c.out.empty()) {
    auto out = open_out(c.out, "fractional_plan.csv");
    sks::write_plan_csv(r.plan, out);
  }
  return 0;
}

int cmd_round(const Common& c, const std::string& dump_hst) {
  std::optional<sks::Metric> m;
  std::optional<sks::DistributionSequence> d;
  load(c, m, d);
  const sks::PlannerResult r = sks::plan_nonadaptive(*m, *d, c.k);
  std::cout << "lp_value " << sks::format_number(r.solution.objective_value) << '\n';
  sks::IntegralPlan plan;
  if (m->ordered()) {
    const sks::LineRounding best = sks::derandomize_offset(*m, r.plan, *d);
    plan = best.plan;
    std::cout << "offset " << sks::format_number(best.offset.r) << '\n'
              << "average_over_offsets " << sks::format_number(best.average_cost) << '\n';
  } else {
    require_seed(c, "HST rounding");
    plan = sks::round_plan_general(*m, r.plan, c.sigma, c.seed);
    if (!dump_hst.empty()) {
      std::ofstream out(dump_hst);
      if (!out) sks::fail(sks::ErrorKind::kValidation, "cannot write '" + dump_hst + "'");
      sks::dump_hst(sks::frt_embed(*m, c.sigma, c.seed), out);
    }
  }
  if (c.exact == "on") {
    std::cout << "expected_cost " << sks::format_number(sks::expected_plan_cost(*m, plan, *d)) << '\n';
  } else {
    require_seed(c, "Monte-Carlo evaluation");
    const sks::CostStats s = sks::simulate_plan(*m, plan, *d, c.trials, c.seed);
    std::cout << "mean_cost " << sks::format_number(s.mean) << " stderr " << sks::format_number(s.stderr_mean) << '\n';
  }
  if (!c.out.empty()) {
    auto out = open_out(c.out, "rounded_plan.csv");
    sks::write_plan_csv(plan, m->size(), out);
  }
  return 0;
}

int cmd_oracle(const Common& c) {
  std::optional<sks::Metric> m;
  std::optional<sks::DistributionSequence> d;
  load(c, m, d);
  sks::OracleOptions opts;
  opts.budget = c.budget;
  const sks::PolicyTable dp = sks::optimal_online_dp(*m, *d, c.k, sks::parse_cost_mode(c.mode), opts);
  std::cout << "dp_value " << sks::format_number(dp.value) << " mode " << c.mode << '\n'
            << "initial " << show(dp.space.at(dp.initial)) << '\n';
  std::optional<double> brute;
  try {
    brute = sks::best_nonadaptive_bruteforce(*m, *d, c.k, opts).value;
    std::cout << "best_nonadaptive " << sks::format_number(*brute) << '\n';
  } catch (const sks::Error& e) {
    if (e.kind() != sks::ErrorKind::kResource) throw;
    std::cout << "best_nonadaptive NA\n";
  }
  std::optional<double> lp_value, rounded;
  try {
    const sks::PlannerResult lp = sks::plan_nonadaptive(*m, *d, c.k);
    lp_value = lp.solution.objective_value;
    if (m->ordered()) rounded = sks::derandomize_offset(*m, lp.plan, *d).expected_cost;
  } catch (const sks::Error& e) {
    if (e.kind() != sks::ErrorKind::kResource) throw;
    std::cerr << "warning: " << e.what() << '\n';
  }
  const auto cell = [](const std::optional<double>& v) { return v ? sks::format_number(*v) : std::string("NA"); };
  std::cout << "lp_value " << cell(lp_value) << '\n' << "rounded " << cell(rounded) << '\n';
  if (c.exact == "off") {
    require_seed(c, "policy simulation");
    const sks::CostStats s = sks::simulate_policy(*m, dp, c.trials, c.seed);
    std::cout << "simulated " << sks::format_number(s.mean) << " stderr " << sks::format_number(s.stderr_mean) << '\n';
  }
  if (!c.out.empty()) {
    auto out = open_out(c.out, "oracle.csv");
    out << "instance,dp_value,bruteforce_value,lp_value,rounded_value\n"
        << "0," << sks::format_number(dp.value) << ',' << cell(brute) << ',' << cell(lp_value) << ',' << cell(rounded)
        << '\n';
  }
  return 0;
}

int cmd_correlated(const Common& c, const std::string& scenarios, const std::string& start) {
  const sks::Metric m = sks::load_metric(c.metric);
  const sks::ScenarioSet set = sks::load_scenarios(scenarios, m);
  const sks::Configuration initial = parse_config(start);
  const sks::ScenarioTrie trie = sks::build_trie(set, c.k, initial);
  const sks::CorrelatedLp program = sks::build_correlated_lp(trie, m);
  const sks::LpSolution sol = sks::solve(program.lp);
  if (sol.status != sks::LpStatus::kOptimal)
    sks::fail(sks::ErrorKind::kInfeasible, "correlated program is " + sks::to_string(sol.status));
  std::cout << "trie_nodes " << trie.nodes.size() << '\n'
            << "lp_value " << sks::format_number(sol.objective_value) << '\n';
  if (m.ordered()) {
    const sks::CorrelatedRounding best = sks::derandomize_correlated(trie, m, program, sol);
    std::cout << "expected_rounded " << sks::format_number(sks::expected_correlated_cost(trie, m, program, sol)) << '\n'
              << "derandomized " << sks::format_number(best.expected_cost) << " offset "
              << sks::format_number(best.offset.r) << '\n';
  } else {
    require_seed(c, "HST execution");
    double total = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
      total += set.probs[i] * sks::execute_correlated(trie, m, program, sol, set.sequences[i], sks::RoundingOffset(0.0),
                                                      c.seed, c.sigma);
    std::cout << "expected_rounded " << sks::format_number(total) << '\n';
  }
  sks::OracleOptions opts;
  opts.budget = c.budget;
  try {
    std::cout << "best_online " << sks::format_number(sks::best_online_bruteforce_correlated(trie, m, opts)) << '\n';
  } catch (const sks::Error& e) {
    if (e.kind() != sks::ErrorKind::kResource) throw;
    std::cout << "best_online NA\n";
  }
  return 0;
}

int cmd_uber(const Common& c, const std::string& demands_path) {
  const sks::Metric m = sks::load_metric(c.metric);
  const sks::DemandSchedule schedule = sks::load_demands(demands_path, m);
  sks::OracleOptions opts;
  opts.budget = c.budget;
  if (schedule.deterministic) {
    const auto demands = schedule.sequence();
    const auto sources = sks::uber_reduce(demands);
    const sks::OfflineResult wrapped = sks::offline_opt(m, sources, c.k, sks::CostMode::kCover, opts);
    std::cout << "kserver_offline " << sks::format_number(wrapped.value) << '\n'
              << "ride_length " << sks::format_number(sks::uber_ride_length(m, demands)) << '\n'
              << "uber_execute " << sks::format_number(sks::uber_execute(m, wrapped.trace, demands)) << '\n';
    try {
      std::cout << "uber_opt " << sks::format_number(sks::uber_opt_bruteforce(m, demands, c.k, opts)) << '\n';
    } catch (const sks::Error& e) {
      if (e.kind() != sks::ErrorKind::kResource) throw;
      std::cout << "uber_opt NA\n";
    }
    return 0;
  }
  const sks::DistributionSequence sources = sks::marginalize_sources(m, schedule.steps);
  const sks::PlannerResult lp = sks::plan_nonadaptive(m, sources, c.k);
  sks::IntegralPlan plan;
  if (m.ordered()) {
    plan = sks::derandomize_offset(m, lp.plan, sources).plan;
  } else {
    require_seed(c, "HST rounding");
    plan = sks::round_plan_general(m, lp.plan, c.sigma, c.seed);
  }
  std::cout << "lp_value " << sks::format_number(lp.solution.objective_value) << '\n'
            << "expected_uber_cost " << sks::format_number(sks::expected_uber_cost(m, plan, schedule.steps)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic k-server planning, rounding and exact oracles"};
  app.require_subcommand(1);
  Common c;

  const auto common = [&c](CLI::App* sub, bool dists) {
    sub->add_option("--metric", c.metric, "Metric JSON file")->required();
    if (dists) sub->add_option("--dists", c.dists, "Distribution CSV (step,point,probability)")->required();
    sub->add_option("--k", c.k, "Number of servers")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>("--seed", [&c](const std::uint64_t& s) { c.seed = s; c.seed_given = true; },
                                            "Random seed");
    sub->add_option("--trials", c.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--sigma", c.sigma, "HST separation")->capture_default_str();
    sub->add_option("--mode", c.mode, "Oracle cost accounting")->check(CLI::IsMember({"cover", "serve-return"}));
    sub->add_option("--exact-expectation", c.exact, "Exact expectations or Monte-Carlo")
        ->check(CLI::IsMember({"on", "off"}));
    sub->add_option("--budget", c.budget, "Oracle state-transition budget");
  };

  std::string dump_lp, dump_hst, start, scenarios, demands;
  auto* solve = app.add_subcommand("solve", "Solve the non-adaptive LP relaxation");
  common(solve, true);
  solve->add_option("--dump-lp", dump_lp, "Write the program in LP text format");
  solve->add_option("--start", start, "Pin B_0, e.g. 0,3");
  auto* round = app.add_subcommand("round", "Solve and round to an integral plan");
  common(round, true);
  round->add_option("--dump-hst", dump_hst, "Write the sampled HST");
  auto* oracle = app.add_subcommand("oracle", "Exact online DP and best non-adaptive plan");
  common(oracle, true);
  auto* corr = app.add_subcommand("correlated", "Scenario-trie LP and its online execution");
  common(corr, false);
  corr->add_option("--scenarios", scenarios, "Scenario CSV (scenario_id,prob,step,point)")->required();
  corr->add_option("--start", start, "Initial configuration, e.g. 0,3")->required();
  auto* uber = app.add_subcommand("uber", "Uber reduction against exact optima");
  common(uber, false);
  uber->add_option("--demands", demands, "Demand CSV (step,source,destination[,probability])")->required();

  sks::ExperimentSpec spec;
  std::string kind = "line", pipelines;
  auto* exp = app.add_subcommand("experiment", "Ratio and runtime experiment");
  exp->add_option("--metric", spec.metric_path, "Metric JSON file (ingested instance)");
  exp->add_option("--dists", spec.dists_path, "Distribution CSV (ingested instance)");
  exp->add_option("--n", spec.n, "Synthetic points")->capture_default_str();
  exp->add_option("--t", spec.t, "Synthetic steps")->capture_default_str();
  exp->add_option("--kind", kind, "line, circle or general")->capture_default_str();
  exp->add_option("--concentration", spec.concentration, "Distribution peakedness")->capture_default_str();
  exp->add_option("--instances", spec.instances, "Synthetic instances")->capture_default_str();
  exp->add_option("--k-min", spec.k_min, "Smallest server count")->capture_default_str();
  exp->add_option("--k-max", spec.k_max, "Largest server count")->capture_default_str();
  exp->add_option_function<std::uint64_t>("--seed", [&spec](const std::uint64_t& s) { spec.seed = s; }, "Random seed");
  exp->add_option("--pipelines", pipelines, "Comma list: lp+line-round, lp+hst-round, dp-oracle, brute-force");
  exp->add_option("--trials", spec.trials, "HST rounding samples, or Monte-Carlo runs")->capture_default_str();
  exp->add_option("--sigma", spec.sigma, "HST separation")->capture_default_str();
  exp->add_option("--budget", spec.budget, "Oracle state-transition budget")->capture_default_str();
  exp->add_option("--workers", spec.workers, "Worker threads (0: all)");
  std::string exact = "on";
  exp->add_option("--exact-expectation", exact, "Exact expectations or Monte-Carlo")->check(CLI::IsMember({"on", "off"}));
  std::string out_dir;
  exp->add_option("--out", out_dir, "Report directory")->required();

  std::size_t syn_n = 40, syn_t = 30;
  std::uint64_t syn_seed = 0;
  double syn_conc = 1.0;
  std::string syn_kind = "line", syn_out;
  auto* synth = app.add_subcommand("synth", "Write a synthetic metric and distribution file");
  synth->add_option("--n", syn_n, "Number of points")->capture_default_str();
  synth->add_option("--t", syn_t, "Number of steps")->capture_default_str();
  synth->add_option("--kind", syn_kind, "Metric kind: line, circle or general")->capture_default_str();
  synth->add_option("--seed", syn_seed, "Random seed")->required();
  synth->add_option("--concentration", syn_conc, "Peakedness of each step (Dirichlet weight 1/c)")->capture_default_str();
  synth->add_option("--out", syn_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*solve) return cmd_solve(c, dump_lp, start);
    if (*round) return cmd_round(c, dump_hst);
    if (*oracle) return cmd_oracle(c);
    if (*corr) return cmd_correlated(c, scenarios, start);
    if (*uber) return cmd_uber(c, demands);
    if (*exp) {
      spec.kind = parse_kind(kind);
      spec.exact_expectation = exact == "on";
      if (!pipelines.empty()) {
        spec.pipelines.clear();
        std::stringstream ss(pipelines);
        std::string item;
        while (std::getline(ss, item, ',')) spec.pipelines.push_back(sks::parse_pipeline(item));
      }
      const sks::ExperimentReport report = sks::run_experiment(spec);
      sks::write_reports(report, out_dir);
      sks::write_ratios_csv(report, std::cout);
      return 0;
    }
    if (*synth) {
      const sks::SynthInstance inst = sks::synth_instance(syn_n, syn_t, parse_kind(syn_kind), syn_seed, syn_conc);
      auto metric = open_out(syn_out, "metric.json");
      sks::write_metric_json(inst.metric, metric);
      auto dists = open_out(syn_out, "dists.csv");
      sks::write_distributions_csv(inst.dists, dists);
      return 0;
    }
  } catch (const sks::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == sks::ErrorKind::kResource ? kExitResource : kExitValidation;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitResource;
  }
  return 0;
}
