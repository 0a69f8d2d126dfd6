#include <doctest.h>

#include <omp.h>

#include "sks/correlated.hpp"
#include "sks/oracles.hpp"
#include "support/oracles.hpp"

using namespace sks;
using namespace sks::testing;

// The OpenMP kernels must agree bit for bit with their serial references,
// whatever the thread count.

TEST_CASE("DP tables") {
  Rng rng = make_stream(111, 0);
  for (int rep = 0; rep < 6; ++rep) {
    const Metric m = rep % 2 ? random_line(rng, 7) : random_euclidean(rng, 7);
    const DistributionSequence d = random_dists(rng, 7, 4, 4);
    OracleOptions serial;
    serial.policy = ExecPolicy::kSerial;
    const PolicyTable a = optimal_online_dp(m, d, 3, CostMode::kCover, serial);
    for (int threads : {1, 2, 4}) {
      omp_set_num_threads(threads);
      const PolicyTable b = optimal_online_dp(m, d, 3);
      CHECK(a.value == b.value);
      CHECK(a.initial == b.initial);
      CHECK(a.cost_to_go == b.cost_to_go);
      CHECK(a.next == b.next);
    }
    const ConfigSpace space(7, 3);
    CHECK(config_distance_table(m, space, ExecPolicy::kSerial) == config_distance_table(m, space, ExecPolicy::kParallel));
  }
}

TEST_CASE("simulation") {
  Rng rng = make_stream(112, 0);
  const Metric m = random_line(rng, 6);
  const DistributionSequence d = random_dists(rng, 6, 5, 3);
  const PolicyTable p = optimal_online_dp(m, d, 2);
  const IntegralPlan plan{std::vector<Configuration>(6, random_config(rng, 6, 2))};
  const CostStats ref = simulate_policy(m, p, 5000, 9, ExecPolicy::kSerial);
  const CostStats ref_plan = simulate_plan(m, plan, d, 5000, 9, ExecPolicy::kSerial);
  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    CHECK(simulate_policy(m, p, 5000, 9).samples == ref.samples);
    CHECK(simulate_plan(m, plan, d, 5000, 9).samples == ref_plan.samples);
  }
}

TEST_CASE("simplex pivots") {
  Rng rng = make_stream(113, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const LinearProgram lp = random_bounded_lp(rng, 8, 8);
    SolveOptions serial;
    serial.policy = ExecPolicy::kSerial;
    const LpSolution a = solve(lp, serial);
    const LpSolution b = solve(lp);
    CHECK(a.status == b.status);
    CHECK(a.objective_value == b.objective_value);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("offline and non-adaptive oracles") {
  Rng rng = make_stream(114, 0);
  const Metric m = random_euclidean(rng, 6);
  const DistributionSequence d = random_dists(rng, 6, 3, 3);
  OracleOptions serial;
  serial.policy = ExecPolicy::kSerial;
  const NonAdaptiveOptimum a = best_nonadaptive_bruteforce(m, d, 2, serial);
  const NonAdaptiveOptimum b = best_nonadaptive_bruteforce(m, d, 2);
  CHECK(a.value == b.value);
  CHECK(a.plan.configs == b.plan.configs);
  const std::vector<PointId> req{0, 3, 5, 1};
  CHECK(offline_opt(m, req, 2, CostMode::kCover, serial).value == offline_opt(m, req, 2).value);
}
