#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sks/metric.hpp"
#include "sks/oracles.hpp"
#include "sks/planner.hpp"

namespace sks {

struct SynthInstance {
  Metric metric;
  DistributionSequence dists;
};

/// Line: n points every 10 units. Circle: n evenly spaced points on a circle
/// of circumference 10n. General: Euclidean distances of n random points in
/// a 100 x 100 square. Each step draws a symmetric Dirichlet vector with
/// parameter 1/concentration, so large concentrations give near-deterministic
/// steps. Entries below 1e-9 are dropped.
SynthInstance synth_instance(std::size_t n, std::size_t t, MetricKind kind, std::uint64_t seed,
                             double concentration);

enum class Pipeline { kLineRound, kHstRound, kDpOracle, kBruteForce };

std::string to_string(Pipeline p);
Pipeline parse_pipeline(const std::string& text);

struct ExperimentSpec {
  // Either both paths are set (one ingested instance) or instances are synthesised.
  std::string metric_path;
  std::string dists_path;
  std::size_t n = 10;
  std::size_t t = 5;
  MetricKind kind = MetricKind::kLine;
  double concentration = 1.0;
  std::size_t instances = 1;

  int k_min = 2;
  int k_max = 4;
  std::optional<std::uint64_t> seed;
  std::vector<Pipeline> pipelines{Pipeline::kLineRound, Pipeline::kDpOracle};
  std::size_t trials = 200;       // HST rounding samples, or Monte-Carlo runs when not exact
  bool exact_expectation = true;  // line rounding: exact offset average and expectation
  double sigma = 6.0;
  std::uint64_t budget = kDefaultOracleBudget;
  int workers = 0;  // 0: OpenMP default
};

/// Throws kValidation on inconsistent specs (missing seed, empty k range,
/// line rounding on a non-ordered metric, ...).
void validate(const ExperimentSpec& spec);

struct ExperimentRow {
  std::size_t instance = 0;
  int k = 0;
  double lp_value = 0.0;
  std::optional<double> rounded_cost;
  double rounded_stderr = 0.0;  // 0 when computed exactly
  std::optional<double> dp_value;
  std::optional<double> bruteforce_value;
  bool oracle_over_budget = false;
  double lp_seconds = 0.0;
  double round_seconds = 0.0;
  double dp_seconds = 0.0;

  /// rounded_cost / dp_value when both exist; 1 when both vanish.
  std::optional<double> ratio() const;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;  // ordered by (instance, k)
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// results.csv and ratios.csv hold only deterministic quantities; wall
/// times go to timings.csv.
void write_reports(const ExperimentReport& report, const std::string& out_dir);
void write_results_csv(const ExperimentReport& report, std::ostream& out);
void write_ratios_csv(const ExperimentReport& report, std::ostream& out);
void write_timings_csv(const ExperimentReport& report, std::ostream& out);

}  // namespace sks
