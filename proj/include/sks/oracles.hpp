#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sks/exec.hpp"
#include "sks/metric.hpp"
#include "sks/planner.hpp"

namespace sks {

/// All size-k multisets over n points in colex order of their stars-and-bars
/// combination, so index() is a closed-form rank.
class ConfigSpace {
 public:
  ConfigSpace(std::size_t n, int k);

  std::size_t size() const { return configs_.size(); }
  std::size_t n() const { return n_; }
  int k() const { return k_; }
  const Configuration& at(std::size_t i) const { return configs_[i]; }
  std::size_t index(const Configuration& c) const;

 private:
  std::size_t n_;
  int k_;
  std::vector<Configuration> configs_;
};

/// C(n+k-1, k), saturating at SIZE_MAX.
std::size_t count_configurations(std::size_t n, int k);

/// How a step is charged.
///  kCover: the configuration after step i must hold a server at r_i; the
///          step costs the movement d(A_{i-1}, A_i).
///  kServeReturn: any configuration; the step costs d(A_{i-1}, A_i) plus a
///          round trip 2 d(A_i, r_i).
enum class CostMode { kCover, kServeReturn };

std::string to_string(CostMode mode);
CostMode parse_cost_mode(const std::string& text);

inline constexpr std::uint64_t kDefaultOracleBudget = 5'000'000;

struct OracleOptions {
  std::uint64_t budget = kDefaultOracleBudget;  // t * S^2 state transitions
  ExecPolicy policy = ExecPolicy::kParallel;
  std::optional<Configuration> fixed_start;
};

/// Optimal online policy. cost_to_go[i][s] is the expected cost of steps
/// i+1..t from state s; next[i][s][j] is the state chosen at step i+1 when
/// the j-th support point of that step is requested.
struct PolicyTable {
  ConfigSpace space;
  CostMode mode;
  DistributionSequence dists;
  std::vector<std::vector<double>> cost_to_go;
  std::vector<std::vector<std::vector<std::uint32_t>>> next;
  std::size_t initial = 0;
  double value = 0.0;

  std::size_t t() const { return dists.t(); }
  /// Next configuration from `current` when step `step` (1-based) requests `r`.
  const Configuration& respond(std::size_t step, const Configuration& current, PointId r) const;
};

/// Backward induction over configurations; minimised over the initial
/// configuration unless options.fixed_start is set. Throws kResource when
/// t * S^2 exceeds the budget.
PolicyTable optimal_online_dp(const Metric& m, const DistributionSequence& d, int k,
                              CostMode mode = CostMode::kCover, const OracleOptions& options = {});

/// Exact expected cost of following the stored decisions, by walking the
/// decision tree forward. Independent of the cost_to_go table.
double evaluate_policy_exact(const Metric& m, const PolicyTable& policy);

/// Per-request cost of one step under the policy's accounting.
double step_cost(const Metric& m, CostMode mode, const Configuration& from, const Configuration& to,
                 PointId r);

CostStats simulate_policy(const Metric& m, const PolicyTable& policy, std::size_t trials,
                          std::uint64_t seed, ExecPolicy exec = ExecPolicy::kParallel);

struct OfflineResult {
  double value = 0.0;
  std::vector<Configuration> trace;  // A_0 .. A_t
};

/// Offline optimum of a known request sequence. In kCover mode this is
/// min sum d(A_{i-1}, A_i) over sequences with r_i in A_i.
OfflineResult offline_opt(const Metric& m, const std::vector<PointId>& requests, int k,
                          CostMode mode = CostMode::kCover, const OracleOptions& options = {});

struct NonAdaptiveOptimum {
  double value = 0.0;
  IntegralPlan plan;
};

/// Exact minimiser of expected_plan_cost over all integral plans. The
/// objective separates into pairwise movement terms and per-step service
/// terms, so a shortest path over the layered configuration graph is exact.
NonAdaptiveOptimum best_nonadaptive_bruteforce(const Metric& m, const DistributionSequence& d, int k,
                                               const OracleOptions& options = {});

/// Pairwise config_distance table over a configuration space.
std::vector<double> config_distance_table(const Metric& m, const ConfigSpace& space,
                                          ExecPolicy policy = ExecPolicy::kParallel);

}  // namespace sks
