#include <doctest.h>

#include <cmath>

#include "sks/error.hpp"
#include "sks/planner.hpp"
#include "support/oracles.hpp"

using namespace sks;
using namespace sks::testing;

namespace {

Metric line(std::vector<double> c) { return build_line_metric(c); }

DistributionSequence uniform_two_point() { return DistributionSequence{{{{0, 0.5}, {1, 0.5}}}}; }

}  // namespace

TEST_CASE("distribution validation") {
  const Metric m = line({0, 1, 2});
  CHECK_THROWS_AS(validate(m, DistributionSequence{{{}}}), Error);
  CHECK_THROWS_AS(validate(m, DistributionSequence{{{{0, 0.5}, {1, 0.4}}}}), Error);
  CHECK_THROWS_AS(validate(m, DistributionSequence{{{{5, 1.0}}}}), Error);
  const DistributionSequence merged = normalized(m, DistributionSequence{{{{2, 0.25}, {0, 0.5}, {2, 0.25}, {1, 0.0}}}});
  REQUIRE(merged.steps[0].size() == 2);
  CHECK(merged.steps[0][0].point == 0);
  CHECK(merged.steps[0][1].point == 2);
  CHECK(merged.steps[0][1].prob == doctest::Approx(0.5));
}

TEST_CASE("LP construction") {
  SUBCASE("variable count of the smallest program") {
    const Metric m = line({0, 1});
    const NonAdaptiveLp p = build_nonadaptive_lp(m, DistributionSequence{{{{1, 1.0}}}}, 1);
    CHECK(p.lp.num_variables() == 10);
    CHECK(p.lp.names()[static_cast<std::size_t>(p.layout.b(1, 1))] == "b[1,1]");
    CHECK(p.lp.names()[static_cast<std::size_t>(p.layout.f(1, 0, 1))] == "f[1,0,1]");
  }
  SUBCASE("zero-cost instance") {
    const Metric m = line({0, 3, 7});
    const DistributionSequence d = DistributionSequence::deterministic({1, 1, 2});
    const PlannerResult r = plan_nonadaptive(m, d, 3);
    CHECK(r.solution.objective_value == doctest::Approx(0.0).epsilon(1e-9));
    for (const auto& f : r.plan.flows)
      for (double v : f) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("uniform two-point instance") {
    const Metric m = line({0, 1});
    const PlannerResult r = plan_nonadaptive(m, uniform_two_point(), 1);
    CHECK(r.solution.objective_value == doctest::Approx(1.0));
    CHECK(vertex_enumeration(r.program.lp) == doctest::Approx(1.0));
    // The optimum is not unique: one full server at either point and the
    // even split all cost 1.
    CHECK(r.plan.configs[1].total() == doctest::Approx(1.0));
    FractionalConfiguration split;
    split.mass = {0.5, 0.5};
    CHECK(2.0 * (0.5 * fractional_serve_distance(m, split, 0) + 0.5 * fractional_serve_distance(m, split, 1)) ==
          doctest::Approx(1.0));
    CHECK(plan_cost_fractional(m, r.plan, uniform_two_point()) == doctest::Approx(1.0));
  }
  SUBCASE("empty support is rejected") {
    const Metric m = line({0, 1});
    CHECK_THROWS_AS(build_nonadaptive_lp(m, DistributionSequence{{{}}}, 1), Error);
    CHECK_THROWS_AS(build_nonadaptive_lp(m, DistributionSequence{}, 1), Error);
  }
}

TEST_CASE("extraction audit and cost round trip") {
  Rng rng = make_stream(51, 0);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rng() % 4;
    const int k = 1 + static_cast<int>(rng() % 2);
    const Metric m = rep % 3 ? random_line(rng, n) : random_euclidean(rng, n);
    const DistributionSequence d = random_dists(rng, n, 1 + rng() % 3, n);
    const PlannerResult r = plan_nonadaptive(m, d, k);
    CHECK_NOTHROW(audit_fractional_plan(r.plan, n));
    CHECK(plan_cost_fractional(m, r.plan, d) == doctest::Approx(r.solution.objective_value).epsilon(1e-6));
    for (const auto& c : r.plan.configs) CHECK(c.total() == doctest::Approx(k));
    // the LP is a relaxation of every integral plan
    if (n <= 4 && d.t() <= 2) CHECK(r.solution.objective_value <= brute_best_plan(m, d, k) + 1e-7);
  }
}

TEST_CASE("audit names the violated family") {
  const Metric m = line({0, 1});
  PlannerResult r = plan_nonadaptive(m, uniform_two_point(), 1);
  FractionalPlan broken = r.plan;
  broken.configs[1].mass[0] += 0.3;
  try {
    audit_fractional_plan(broken, 2);
    FAIL("audit accepted a broken plan");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kExtraction);
    CHECK(std::string(e.what()).find("total-mass family") != std::string::npos);
  }
}

TEST_CASE("fixed start pins B_0") {
  const Metric m = line({0, 1});
  const PlannerResult r = plan_nonadaptive(m, uniform_two_point(), 1, {}, Configuration{0});
  CHECK(r.plan.configs[0][0] == doctest::Approx(1.0));
  CHECK(r.solution.objective_value >= 1.0 - 1e-9);
}

TEST_CASE("shift plan") {
  const Metric m = line({0, 5});
  SUBCASE("constant trace") {
    const std::vector<Configuration> trace{{1}, {1}, {1}};
    const IntegralPlan p = shift_plan(trace);
    CHECK(p.configs == trace);
    CHECK(plan_cost_integral(m, p, {1, 1}) == 0.0);
  }
  SUBCASE("factor three is tight") {
    const std::vector<Configuration> trace{{0}, {1}, {1}};
    CHECK(trace_cost(m, trace) == 5.0);
    const IntegralPlan p = shift_plan(trace);
    CHECK(p.configs == std::vector<Configuration>{{0}, {0}, {1}});
    CHECK(plan_cost_integral(m, p, {1, 1}) == 15.0);
  }
  SUBCASE("random traces never exceed three times") {
    Rng rng = make_stream(52, 0);
    for (int rep = 0; rep < 300; ++rep) {
      const std::size_t n = 2 + rng() % 5;
      const int k = 1 + static_cast<int>(rng() % 3);
      const Metric g = rep % 2 ? random_line(rng, n) : random_euclidean(rng, n);
      const std::size_t t = 1 + rng() % 5;
      std::vector<Configuration> trace{random_config(rng, n, k)};
      std::vector<PointId> req;
      for (std::size_t i = 0; i < t; ++i) {
        Configuration next = random_config(rng, n, k);
        req.push_back(next.positions()[rng() % static_cast<std::size_t>(k)]);
        trace.push_back(next);
      }
      CHECK(plan_cost_integral(g, shift_plan(trace), req) <= 3.0 * trace_cost(g, trace) + 1e-9);
    }
  }
}

TEST_CASE("integral plan costs") {
  const Metric m = line({0, 3, 7});
  CHECK(plan_cost_integral(m, IntegralPlan{{{0}, {1}}}, {2}) == 11.0);
  CHECK(plan_cost_integral(m, IntegralPlan{{{0, 2}, {0, 2}, {0, 2}}}, {0, 2}) == 0.0);
  CHECK_THROWS_AS(plan_cost_integral(m, IntegralPlan{{{0}, {1}}}, {2, 2}), Error);

  const Metric two = line({0, 1});
  const IntegralPlan constant{{{0}, {0}}};
  CHECK(expected_plan_cost(two, constant, uniform_two_point()) == doctest::Approx(1.0));

  const DistributionSequence det = DistributionSequence::deterministic({2, 0});
  const IntegralPlan p{{{0}, {1}, {2}}};
  CHECK(expected_plan_cost(m, p, det) == doctest::Approx(plan_cost_integral(m, p, {2, 0})));
}

TEST_CASE("simulation") {
  const Metric two = line({0, 1});
  const IntegralPlan constant{{{0}, {0}}};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const CostStats s = simulate_plan(two, constant, uniform_two_point(), 20000, seed);
    CHECK(std::abs(s.mean - 1.0) <= 3.0 * s.stderr_mean);
    const CostStats again = simulate_plan(two, constant, uniform_two_point(), 20000, seed, ExecPolicy::kSerial);
    CHECK(again.samples == s.samples);
  }
  SUBCASE("fixed sequence has zero variance and matches the formula") {
    const Metric m = line({0, 3, 7});
    const IntegralPlan p{{{0}, {1}, {2}}};
    const CostStats s = simulate_plan(m, p, DistributionSequence::deterministic({2, 0}), 50, 9);
    CHECK(s.stderr_mean == 0.0);
    CHECK(s.mean == plan_cost_integral(m, p, {2, 0}));
  }
  SUBCASE("Monte-Carlo agrees with the exact expectation") {
    Rng rng = make_stream(53, 0);
    const Metric g = random_euclidean(rng, 5);
    const DistributionSequence d = random_dists(rng, 5, 3, 5);
    const IntegralPlan p{{random_config(rng, 5, 2), random_config(rng, 5, 2), random_config(rng, 5, 2),
                          random_config(rng, 5, 2)}};
    const CostStats s = simulate_plan(g, p, d, 100000, 77);
    CHECK(std::abs(s.mean - expected_plan_cost(g, p, d)) <= 3.0 * s.stderr_mean);
  }
}
