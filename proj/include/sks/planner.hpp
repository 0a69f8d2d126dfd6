#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sks/exec.hpp"
#include "sks/lp.hpp"
#include "sks/metric.hpp"
#include "sks/rng.hpp"

namespace sks {

struct Outcome {
  PointId point;
  double prob;
};

/// t independent request distributions; each step lists its support sorted
/// by point with strictly positive probabilities.
struct DistributionSequence {
  std::vector<std::vector<Outcome>> steps;

  std::size_t t() const { return steps.size(); }
  /// One-point distributions reproducing a fixed request sequence.
  static DistributionSequence deterministic(const std::vector<PointId>& requests);
};

/// Sorts supports, merges repeated points, drops zero-probability entries
/// and checks normalisation (1e-9) against the metric.
DistributionSequence normalized(const Metric& m, DistributionSequence d);
void validate(const Metric& m, const DistributionSequence& d);
std::vector<PointId> sample_requests(const DistributionSequence& d, Rng& rng);

struct IntegralPlan {
  std::vector<Configuration> configs;  // B_0 .. B_t
};

struct ServeAssignment {
  PointId request;
  double prob;
  std::vector<double> share;  // share[v] = mass of v serving `request`
};

struct FractionalPlan {
  double k = 0.0;
  std::vector<FractionalConfiguration> configs;       // B_0 .. B_t
  std::vector<std::vector<double>> flows;             // flows[tau-1][u*n+v], tau = 1..t
  std::vector<std::vector<ServeAssignment>> serving;  // serving[tau-1]
};

/// Column layout of the non-adaptive program.
struct LpLayout {
  std::size_t n = 0, t = 0;
  int k = 0;
  int b0 = 0;  // b[tau][v] at b0 + tau*n + v, tau = 0..t
  int f0 = 0;  // f[tau][u][v] at f0 + (tau-1)*n*n + u*n + v, tau = 1..t
  struct XBlock {
    std::size_t step;  // 1..t
    PointId request;
    double prob;
    int first;  // x[tau][v][r] at first + v
  };
  std::vector<XBlock> x;

  int b(std::size_t tau, PointId v) const { return b0 + static_cast<int>(tau * n) + v; }
  int f(std::size_t tau, PointId u, PointId v) const {
    return f0 + static_cast<int>((tau - 1) * n * n + static_cast<std::size_t>(u) * n) + v;
  }
};

struct NonAdaptiveLp {
  LinearProgram lp;
  LpLayout layout;
};

/// Builds the relaxed program: configuration masses b, movements f and
/// serving shares x, with flow conservation, one covering row per possible
/// request, x <= b and total mass <= k per step. `fixed_start` pins B_0.
NonAdaptiveLp build_nonadaptive_lp(const Metric& m, const DistributionSequence& d, int k,
                                   const std::optional<Configuration>& fixed_start = std::nullopt);

/// Reads the plan out of an optimal solution and audits every constraint
/// family. Any mass deficit below k is parked, constant over time, on the
/// heaviest point of B_0 so that every configuration carries exactly k.
FractionalPlan extract_fractional_plan(const NonAdaptiveLp& program, const LpSolution& sol);

/// Throws kExtraction naming the first violated constraint family.
void audit_fractional_plan(const FractionalPlan& plan, std::size_t n);

double plan_cost_fractional(const Metric& m, const FractionalPlan& plan,
                            const DistributionSequence& d);

struct PlannerResult {
  NonAdaptiveLp program;
  LpSolution solution;
  FractionalPlan plan;
};

/// build + solve + extract; throws kInfeasible if the program is not optimal.
PlannerResult plan_nonadaptive(const Metric& m, const DistributionSequence& d, int k,
                               const SolveOptions& options = {},
                               const std::optional<Configuration>& fixed_start = std::nullopt);

/// Request-oblivious plan from an adaptive trace: B_0 = A_0, B_i = A_{i-1}.
IntegralPlan shift_plan(const std::vector<Configuration>& adaptive_trace);

/// Sum of d(A_{i-1}, A_i) over a trace whose A_i cover r_i.
double trace_cost(const Metric& m, const std::vector<Configuration>& trace);

/// sum d(B_{i-1}, B_i) + 2 sum d(B_i, r_i).
double plan_cost_integral(const Metric& m, const IntegralPlan& plan,
                          const std::vector<PointId>& requests);
/// Exact expectation of plan_cost_integral over the distributions.
double expected_plan_cost(const Metric& m, const IntegralPlan& plan, const DistributionSequence& d);

struct CostStats {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::vector<double> samples;
};

CostStats summarize(std::vector<double> samples);

/// Monte-Carlo cost of a plan; trial i draws from stream (seed, i).
CostStats simulate_plan(const Metric& m, const IntegralPlan& plan, const DistributionSequence& d,
                        std::size_t trials, std::uint64_t seed,
                        ExecPolicy policy = ExecPolicy::kParallel);

}  // namespace sks
