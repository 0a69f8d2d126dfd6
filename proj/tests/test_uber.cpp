#include <doctest.h>

#include <algorithm>
#include <limits>

#include "sks/error.hpp"
#include "sks/uber.hpp"
#include "support/oracles.hpp"

using namespace sks;
using namespace sks::testing;

namespace {

Metric line(std::vector<double> c) { return build_line_metric(c); }

// Exhaustive search over which server serves each demand, with servers
// ending at destinations. Independent of the configuration-space DP.
double brute_uber(const Metric& m, std::vector<PointId> servers, const std::vector<UberDemand>& demands,
                  std::size_t i = 0) {
  if (i == demands.size()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < servers.size(); ++s) {
    const PointId was = servers[s];
    const double step = m.dist(was, demands[i].source) + m.dist(demands[i].source, demands[i].destination);
    servers[s] = demands[i].destination;
    best = std::min(best, step + brute_uber(m, servers, demands, i + 1));
    servers[s] = was;
  }
  return best;
}

}  // namespace

TEST_CASE("reduction keeps the sources") {
  CHECK(uber_reduce({{0, 1}, {2, 3}}) == std::vector<PointId>{0, 2});
  CHECK(uber_reduce({{1, 1}, {2, 2}}) == std::vector<PointId>{1, 2});
  CHECK(uber_reduce({}).empty());
  const Metric m = line({0, 2, 7});
  CHECK(uber_ride_length(m, {{0, 2}, {1, 0}}) == 9.0);
  CHECK_THROWS_AS(validate(m, std::vector<UberDemand>{{0, 3}}), Error);
}

TEST_CASE("execution cost accounting") {
  const Metric m = line({0, 2, 7});
  CHECK(uber_execute(m, std::vector<Configuration>{{0}, {0}}, {{0, 2}}) == 14.0);
  const std::vector<Configuration> trace{{0}, {1}, {2}};
  CHECK(uber_execute(m, trace, {{1, 1}, {2, 2}}) == trace_cost(m, trace));
  CHECK_THROWS_AS(uber_execute(m, trace, {{1, 1}, {0, 2}}), Error);
  CHECK_THROWS_AS(uber_execute(m, trace, {{1, 1}}), Error);
  const IntegralPlan plan{{{0}, {0}}};
  CHECK(uber_execute(m, plan, {{1, 2}}) == plan_cost_integral(m, plan, {1}) + 10.0);
}

TEST_CASE("Uber optimum") {
  const Metric m = line({0, 2, 7});
  OracleOptions at;
  at.fixed_start = Configuration{0};
  CHECK(uber_opt_bruteforce(m, {{0, 2}}, 1, at) == 7.0);
  CHECK(uber_opt_bruteforce(m, {}, 2) == 0.0);
  OracleOptions tight;
  tight.budget = 3;
  try {
    uber_opt_bruteforce(m, {{0, 1}, {1, 2}}, 2, tight);
    FAIL("budget ignored");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kResource);
  }

  Rng rng = make_stream(101, 0);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t n = 2 + rng() % 4;
    const int k = 1 + static_cast<int>(rng() % 2);
    const Metric g = rep % 2 ? random_line(rng, n) : random_euclidean(rng, n);
    std::vector<UberDemand> dm;
    for (std::size_t i = 0, t = 1 + rng() % 4; i < t; ++i)
      dm.push_back({static_cast<PointId>(rng() % n), static_cast<PointId>(rng() % n)});
    OracleOptions fixed;
    fixed.fixed_start = random_config(rng, n, k);
    const double opt = uber_opt_bruteforce(g, dm, k, fixed);
    CHECK(opt == doctest::Approx(brute_uber(g, fixed.fixed_start->positions(), dm)).epsilon(1e-12));

    const double opt_free = uber_opt_bruteforce(g, dm, k);
    const OfflineResult ks = offline_opt(g, uber_reduce(dm), k, CostMode::kCover);
    CHECK(opt_free >= ks.value - 1e-9);
    CHECK(opt_free >= uber_ride_length(g, dm) - 1e-9);
    const double wrapped = uber_execute(g, ks.trace, dm);
    CHECK(wrapped <= 3.0 * opt_free + 1e-9);
  }
}

TEST_CASE("stochastic demands") {
  const Metric m = line({0, 1, 5});
  const StochasticDemands sd{{{{0, 2}, 0.5}, {{1, 2}, 0.25}, {{0, 1}, 0.25}}, {{{2, 2}, 1.0}}};
  const DistributionSequence d = marginalize_sources(m, sd);
  REQUIRE(d.t() == 2);
  REQUIRE(d.steps[0].size() == 2);
  CHECK(d.steps[0][0].point == 0);
  CHECK(d.steps[0][0].prob == doctest::Approx(0.75));
  const IntegralPlan plan{{{0}, {0}, {2}}};
  const double ride = 0.5 * 5 + 0.25 * 4 + 0.25 * 1;
  CHECK(expected_uber_cost(m, plan, sd) == doctest::Approx(expected_plan_cost(m, plan, d) + 2.0 * ride));
}
