#include <doctest.h>

#include <cmath>

#include "sks/error.hpp"
#include "sks/oracles.hpp"
#include "support/oracles.hpp"

using namespace sks;
using namespace sks::testing;

namespace {

Metric line(std::vector<double> c) { return build_line_metric(c); }

}  // namespace

TEST_CASE("configuration space ranking") {
  for (std::size_t n = 1; n <= 5; ++n)
    for (int k = 1; k <= 4; ++k) {
      const ConfigSpace space(n, k);
      const auto ref = all_multisets(n, k);
      CHECK(space.size() == ref.size());
      CHECK(count_configurations(n, k) == ref.size());
      for (std::size_t i = 0; i < space.size(); ++i) CHECK(space.index(space.at(i)) == i);
      for (const auto& c : ref) CHECK(space.at(space.index(Configuration(c))).positions() == c);
    }
  CHECK(count_configurations(10, 4) == 715);
}

TEST_CASE("online dynamic program") {
  SUBCASE("deterministic single request") {
    const Metric m = line({0, 4, 9});
    CHECK(optimal_online_dp(m, DistributionSequence::deterministic({2}), 1).value == 0.0);
  }
  SUBCASE("uniform two-point instance") {
    const Metric m = line({0, 1});
    const DistributionSequence d{{{{0, 0.5}, {1, 0.5}}}};
    CHECK(optimal_online_dp(m, d, 1, CostMode::kCover).value == doctest::Approx(0.5));
    CHECK(optimal_online_dp(m, d, 1, CostMode::kServeReturn).value == doctest::Approx(0.5));
  }
  SUBCASE("matches expectimax over the request tree") {
    Rng rng = make_stream(81, 0);
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t n = 2 + rng() % 3;
      const int k = 1 + static_cast<int>(rng() % 2);
      const Metric m = rep % 2 ? random_line(rng, n) : random_euclidean(rng, n);
      const DistributionSequence d = random_dists(rng, n, 1 + rng() % 3, n);
      for (CostMode mode : {CostMode::kCover, CostMode::kServeReturn}) {
        const PolicyTable p = optimal_online_dp(m, d, k, mode);
        CHECK(p.value == doctest::Approx(brute_online(m, d, k, mode == CostMode::kCover)).epsilon(1e-12));
        CHECK(std::abs(evaluate_policy_exact(m, p) - p.value) <= 1e-9);
        for (const auto& layer : p.cost_to_go)
          for (double v : layer) CHECK(v >= 0.0);
        for (double v : p.cost_to_go.back()) CHECK(v == 0.0);
      }
      OracleOptions fixed;
      fixed.fixed_start = random_config(rng, n, k);
      const PolicyTable pf = optimal_online_dp(m, d, k, CostMode::kCover, fixed);
      CHECK(pf.value == doctest::Approx(brute_online(m, d, k, true, &fixed.fixed_start->positions())).epsilon(1e-12));
    }
  }
  SUBCASE("budget") {
    const Metric m = line({0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    const DistributionSequence d = DistributionSequence::deterministic({1, 2, 3});
    OracleOptions tight;
    tight.budget = 1000;
    try {
      optimal_online_dp(m, d, 3, CostMode::kCover, tight);
      FAIL("budget ignored");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kResource);
    }
    CHECK_THROWS_AS(offline_opt(m, {1, 2, 3}, 3, CostMode::kCover, tight), Error);
    CHECK_THROWS_AS(best_nonadaptive_bruteforce(m, d, 3, tight), Error);
  }
}

TEST_CASE("policy simulation") {
  const Metric m = line({0, 1});
  const DistributionSequence d{{{{0, 0.5}, {1, 0.5}}, {{0, 0.5}, {1, 0.5}}}};
  const PolicyTable p = optimal_online_dp(m, d, 1);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const CostStats a = simulate_policy(m, p, 20000, seed);
    const CostStats b = simulate_policy(m, p, 20000, seed, ExecPolicy::kSerial);
    CHECK(a.samples == b.samples);
    CHECK(std::abs(a.mean - p.value) <= 3.0 * a.stderr_mean);
  }
  const PolicyTable det = optimal_online_dp(line({0, 3, 8}), DistributionSequence::deterministic({0, 2, 1}), 1);
  const CostStats s = simulate_policy(line({0, 3, 8}), det, 100, 4);
  CHECK(s.stderr_mean == 0.0);
  CHECK(s.mean == doctest::Approx(det.value));
  const Configuration next = p.respond(1, p.space.at(p.initial), 1);
  CHECK(next.contains(1));
}

TEST_CASE("offline optimum") {
  const Metric m = line({0, 10});
  CHECK(offline_opt(m, {0, 0, 0}, 1).value == 0.0);
  const OfflineResult z = offline_opt(m, {0, 1, 0}, 1);
  CHECK(z.value == 20.0);
  REQUIRE(z.trace.size() == 4);
  CHECK(z.trace[2] == Configuration{1});
  CHECK(offline_opt(m, {0, 1, 0}, 2).value == 0.0);

  Rng rng = make_stream(82, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng() % 3;
    const int k = 1 + static_cast<int>(rng() % 2);
    const Metric g = rep % 2 ? random_line(rng, n) : random_euclidean(rng, n);
    std::vector<PointId> req;
    for (std::size_t i = 0, t = 1 + rng() % 4; i < t; ++i) req.push_back(static_cast<PointId>(rng() % n));
    for (CostMode mode : {CostMode::kCover, CostMode::kServeReturn}) {
      const OfflineResult r = offline_opt(g, req, k, mode);
      CHECK(r.value == doctest::Approx(brute_offline(g, req, k, mode == CostMode::kCover)).epsilon(1e-12));
      double replay = 0.0;
      for (std::size_t i = 0; i < req.size(); ++i) replay += step_cost(g, mode, r.trace[i], r.trace[i + 1], req[i]);
      CHECK(replay == doctest::Approx(r.value));
    }
  }
}

TEST_CASE("best non-adaptive plan") {
  const Metric two = line({0, 1});
  const NonAdaptiveOptimum u = best_nonadaptive_bruteforce(two, DistributionSequence{{{{0, 0.5}, {1, 0.5}}}}, 1);
  CHECK(u.value == doctest::Approx(1.0));

  Rng rng = make_stream(83, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng() % 3;
    const int k = 1 + static_cast<int>(rng() % 2);
    const Metric m = rep % 2 ? random_line(rng, n) : random_euclidean(rng, n);
    const DistributionSequence d = random_dists(rng, n, 1 + rng() % 3, n);
    const NonAdaptiveOptimum b = best_nonadaptive_bruteforce(m, d, k);
    CHECK(b.value == doctest::Approx(brute_best_plan(m, d, k)).epsilon(1e-12));
    CHECK(expected_plan_cost(m, b.plan, d) == doctest::Approx(b.value));
    const double dp = optimal_online_dp(m, d, k).value;
    CHECK(dp <= b.value + 1e-9);
    CHECK(b.value <= 3.0 * dp + 1e-9);
    CHECK(plan_nonadaptive(m, d, k).solution.objective_value <= b.value + 1e-7);

    std::vector<PointId> req;
    for (const auto& step : d.steps) req.push_back(step.front().point);
    const DistributionSequence det = DistributionSequence::deterministic(req);
    CHECK(best_nonadaptive_bruteforce(m, det, k).value ==
          doctest::Approx(offline_opt(m, req, k, CostMode::kServeReturn).value));
  }
}

TEST_CASE("sandwich: offline optimum is below every plan on every sequence") {
  Rng rng = make_stream(84, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 3;
    const Metric m = random_line(rng, n);
    const DistributionSequence d = random_dists(rng, n, 3, n);
    const NonAdaptiveOptimum b = best_nonadaptive_bruteforce(m, d, 1);
    for (int s = 0; s < 5; ++s) {
      Rng draw = make_stream(85, static_cast<std::uint64_t>(rep * 5 + s));
      const auto req = sample_requests(d, draw);
      CHECK(offline_opt(m, req, 1, CostMode::kServeReturn).value <= plan_cost_integral(m, b.plan, req) + 1e-9);
    }
  }
}
