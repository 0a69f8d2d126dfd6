#include "sks/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>

#include <omp.h>

#include "sks/error.hpp"
#include "sks/hst.hpp"
#include "sks/io.hpp"
#include "sks/rounding.hpp"

namespace sks {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  return splitmix(splitmix(splitmix(seed ^ splitmix(a)) ^ b) ^ c);
}

std::vector<double> dirichlet(std::size_t n, double alpha, Rng& rng) {
  // Gamma(alpha) = Gamma(alpha + 1) * U^(1/alpha), kept in log space so tiny
  // alphas do not underflow.
  std::gamma_distribution<double> gamma(alpha + 1.0, 1.0);
  std::vector<double> logw(n);
  for (double& l : logw) {
    const double u = std::max(uniform01(rng), 1e-300);
    l = std::log(std::max(gamma(rng), 1e-300)) + std::log(u) / alpha;
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += (w[i] = std::exp(logw[i] - top));
  for (double& x : w) x /= sum;
  return w;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool has(const ExperimentSpec& spec, Pipeline p) {
  return std::find(spec.pipelines.begin(), spec.pipelines.end(), p) != spec.pipelines.end();
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

}  // namespace

SynthInstance synth_instance(std::size_t n, std::size_t t, MetricKind kind, std::uint64_t seed,
                             double concentration) {
  if (n == 0) fail(ErrorKind::kValidation, "synthetic instance needs n >= 1");
  if (!(concentration > 0.0)) fail(ErrorKind::kValidation, "concentration must be positive");
  Rng rng = make_stream(seed, 0);
  std::vector<double> coords(n);
  for (std::size_t i = 0; i < n; ++i) coords[i] = 10.0 * static_cast<double>(i);

  std::optional<Metric> metric;
  switch (kind) {
    case MetricKind::kLine:
      metric = build_line_metric(coords);
      break;
    case MetricKind::kCircle:
      metric = build_circle_metric(coords, 10.0 * static_cast<double>(n));
      break;
    case MetricKind::kGeneral:
    case MetricKind::kHstInduced: {
      std::vector<std::pair<double, double>> pts(n);
      for (auto& [x, y] : pts) {
        x = 100.0 * uniform01(rng);
        y = 100.0 * uniform01(rng);
      }
      std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) d[a][b] = std::hypot(pts[a].first - pts[b].first, pts[a].second - pts[b].second);
      metric = build_general_metric(d);
      break;
    }
  }

  DistributionSequence dists;
  Rng draw = make_stream(seed, 1);
  for (std::size_t i = 0; i < t; ++i) {
    const auto w = dirichlet(n, 1.0 / concentration, draw);
    std::vector<Outcome> step;
    double kept = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      if (w[p] >= 1e-9) kept += w[p];
    for (std::size_t p = 0; p < n; ++p)
      if (w[p] >= 1e-9) step.push_back({static_cast<PointId>(p), w[p] / kept});
    dists.steps.push_back(std::move(step));
  }
  return {*metric, normalized(*metric, std::move(dists))};
}

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::kLineRound: return "lp+line-round";
    case Pipeline::kHstRound: return "lp+hst-round";
    case Pipeline::kDpOracle: return "dp-oracle";
    case Pipeline::kBruteForce: return "brute-force";
  }
  return "?";
}

Pipeline parse_pipeline(const std::string& text) {
  for (Pipeline p : {Pipeline::kLineRound, Pipeline::kHstRound, Pipeline::kDpOracle, Pipeline::kBruteForce})
    if (to_string(p) == text) return p;
  fail(ErrorKind::kValidation, "unknown pipeline '" + text + "'");
}

void validate(const ExperimentSpec& spec) {
  if (spec.k_min < 1 || spec.k_max < spec.k_min) fail(ErrorKind::kValidation, "empty or invalid k range");
  if (spec.pipelines.empty()) fail(ErrorKind::kValidation, "no pipeline selected");
  if (has(spec, Pipeline::kLineRound) && has(spec, Pipeline::kHstRound))
    fail(ErrorKind::kValidation, "select one rounding pipeline per experiment");
  const bool from_files = !spec.metric_path.empty() || !spec.dists_path.empty();
  if (from_files && (spec.metric_path.empty() || spec.dists_path.empty()))
    fail(ErrorKind::kValidation, "ingested experiments need both a metric and a distribution file");
  if (!from_files && spec.instances == 0) fail(ErrorKind::kValidation, "no instances requested");
  if (!spec.seed && (!from_files || has(spec, Pipeline::kHstRound) || !spec.exact_expectation))
    fail(ErrorKind::kValidation, "a seed is required for randomized pipelines");
  if (!from_files && has(spec, Pipeline::kLineRound) && spec.kind != MetricKind::kLine &&
      spec.kind != MetricKind::kCircle)
    fail(ErrorKind::kValidation, "line rounding needs a line or circle metric");
  if (has(spec, Pipeline::kHstRound) && spec.trials == 0) fail(ErrorKind::kValidation, "trials must be positive");
  if (!(spec.sigma > 1.0)) fail(ErrorKind::kValidation, "sigma must exceed 1");
}

std::optional<double> ExperimentRow::ratio() const {
  if (!rounded_cost || !dp_value) return std::nullopt;
  if (*dp_value > 1e-12) return *rounded_cost / *dp_value;
  return *rounded_cost <= 1e-9 ? 1.0 : std::numeric_limits<double>::infinity();
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  const std::uint64_t seed = spec.seed.value_or(0);
  std::vector<SynthInstance> instances;
  if (!spec.metric_path.empty()) {
    Metric m = load_metric(spec.metric_path);
    DistributionSequence d = load_distributions(spec.dists_path, m);
    instances.push_back({std::move(m), std::move(d)});
  } else {
    for (std::size_t i = 0; i < spec.instances; ++i)
      instances.push_back(synth_instance(spec.n, spec.t, spec.kind, derive(seed, 1, i), spec.concentration));
  }
  for (const auto& inst : instances)
    if (has(spec, Pipeline::kLineRound) && !inst.metric.ordered())
      fail(ErrorKind::kValidation, "line rounding needs a line or circle metric");

  const int ks = spec.k_max - spec.k_min + 1;
  ExperimentReport report;
  report.rows.resize(instances.size() * static_cast<std::size_t>(ks));
  const bool lp = has(spec, Pipeline::kLineRound) || has(spec, Pipeline::kHstRound);
  const int workers = spec.workers > 0 ? spec.workers : omp_get_max_threads();

  // Exceptions cannot cross the parallel region; the first one is rethrown.
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::size_t item = 0; item < report.rows.size(); ++item) {
    try {
      const std::size_t i = item / static_cast<std::size_t>(ks);
      const int k = spec.k_min + static_cast<int>(item % static_cast<std::size_t>(ks));
      const Metric& m = instances[i].metric;
      const DistributionSequence& d = instances[i].dists;
      ExperimentRow& row = report.rows[item];
      row.instance = i;
      row.k = k;

      if (lp) {
        auto start = std::chrono::steady_clock::now();
        const PlannerResult planned = plan_nonadaptive(m, d, k);
        row.lp_seconds = seconds_since(start);
        row.lp_value = planned.solution.objective_value;

        start = std::chrono::steady_clock::now();
        if (has(spec, Pipeline::kLineRound)) {
          const LineRounding best = derandomize_offset(m, planned.plan, d);
          if (spec.exact_expectation) {
            row.rounded_cost = best.expected_cost;
          } else {
            const CostStats s = simulate_plan(m, best.plan, d, spec.trials, derive(seed, 2, i, static_cast<std::uint64_t>(k)),
                                              ExecPolicy::kSerial);
            row.rounded_cost = s.mean;
            row.rounded_stderr = s.stderr_mean;
          }
        } else {
          std::vector<double> costs(spec.trials);
          for (std::size_t j = 0; j < spec.trials; ++j) {
            const IntegralPlan rounded =
                round_plan_general(m, planned.plan, spec.sigma, derive(seed, 3, i, static_cast<std::uint64_t>(k) * 1'000'003 + j));
            costs[j] = expected_plan_cost(m, rounded, d);
          }
          const CostStats s = summarize(std::move(costs));
          row.rounded_cost = s.mean;
          row.rounded_stderr = s.stderr_mean;
        }
        row.round_seconds = seconds_since(start);
      }

      OracleOptions opts;
      opts.budget = spec.budget;
      if (has(spec, Pipeline::kDpOracle)) {
        const auto start = std::chrono::steady_clock::now();
        try {
          row.dp_value = optimal_online_dp(m, d, k, CostMode::kCover, opts).value;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kResource) throw;
          row.oracle_over_budget = true;
        }
        row.dp_seconds = seconds_since(start);
      }
      if (has(spec, Pipeline::kBruteForce)) {
        try {
          row.bruteforce_value = best_nonadaptive_bruteforce(m, d, k, opts).value;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kResource) throw;
          row.oracle_over_budget = true;
        }
      }
    } catch (...) {
#pragma omp critical(sks_experiment_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return report;
}

void write_results_csv(const ExperimentReport& report, std::ostream& out) {
  out << "instance,k,lp_value,rounded_expected_cost,rounded_stderr,dp_value,bruteforce_value,ratio,oracle\n";
  for (const ExperimentRow& r : report.rows) {
    out << r.instance << ',' << r.k << ',' << format_number(r.lp_value) << ',' << cell(r.rounded_cost) << ','
        << format_number(r.rounded_stderr) << ',' << cell(r.dp_value) << ',' << cell(r.bruteforce_value) << ','
        << cell(r.ratio()) << ',' << (r.oracle_over_budget ? "NA" : "ok") << '\n';
  }
}

void write_ratios_csv(const ExperimentReport& report, std::ostream& out) {
  out << "instance,k,ratio\n";
  for (const ExperimentRow& r : report.rows) out << r.instance << ',' << r.k << ',' << cell(r.ratio()) << '\n';
}

void write_timings_csv(const ExperimentReport& report, std::ostream& out) {
  out << "instance,k,lp_seconds,round_seconds,dp_seconds\n";
  for (const ExperimentRow& r : report.rows)
    out << r.instance << ',' << r.k << ',' << r.lp_seconds << ',' << r.round_seconds << ',' << r.dp_seconds << '\n';
}

void write_reports(const ExperimentReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto write = [&](const char* name, void (*fn)(const ExperimentReport&, std::ostream&)) {
    const auto path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path);
    if (!out) fail(ErrorKind::kValidation, "cannot write '" + path.string() + "'");
    fn(report, out);
  };
  write("results.csv", write_results_csv);
  write("ratios.csv", write_ratios_csv);
  write("timings.csv", write_timings_csv);
}

}  // namespace sks
