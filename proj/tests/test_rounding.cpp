#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sks/error.hpp"
#include "sks/rounding.hpp"
#include "support/oracles.hpp"

using namespace sks;
using namespace sks::testing;

namespace {

Metric unit_line(std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = static_cast<double>(i);
  return build_line_metric(c);
}

FractionalConfiguration frac(std::size_t n, std::vector<std::pair<PointId, double>> entries) {
  FractionalConfiguration f;
  f.mass.assign(n, 0.0);
  for (auto [p, w] : entries) f.mass[static_cast<std::size_t>(p)] += w;
  return f;
}

// Average over r of the rounded distance, integrating the piecewise-constant
// function on a partition computed here from plain cumulative sums.
double midpoint_average(const Metric& m, const FractionalConfiguration& a, const FractionalConfiguration& b, int k) {
  std::vector<double> cuts{0.0, 1.0};
  for (const auto* c : {&a, &b}) {
    double acc = 0.0;
    for (double v : c->mass) {
      acc += v;
      cuts.push_back(acc - std::floor(acc));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double avg = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double w = cuts[i] - cuts[i - 1];
    if (w < 1e-9) continue;
    const RoundingOffset r(0.5 * (cuts[i] + cuts[i - 1]));
    avg += w * config_distance(m, round_line(m, a, r, k), round_line(m, b, r, k));
  }
  return avg;
}

}  // namespace

TEST_CASE("mass function") {
  const Metric m = unit_line(6);
  const auto a = frac(6, {{0, 1}, {3, 1}});
  CHECK(mass_function(m, a, 0.5) == 0);
  CHECK(mass_function(m, a, 1.5) == 3);
  CHECK(mass_function(m, a, 1.0) == 0);
  const auto b = frac(6, {{0, 0.5}, {1, 0.5}, {5, 1}});
  CHECK(mass_function(m, b, 0.75) == 1);
  CHECK(mass_function(m, b, 0.5) == 0);
  CHECK(mass_function(m, b, 2.0) == 5);
  CHECK_THROWS_AS(mass_function(m, b, 0.0), Error);
  CHECK_THROWS_AS(mass_function(m, b, 2.1), Error);
  CHECK_THROWS_AS(RoundingOffset(1.0), Error);
  CHECK_THROWS_AS(RoundingOffset(-0.1), Error);
}

TEST_CASE("line rounding examples") {
  const Metric m = unit_line(6);
  const auto b = frac(6, {{0, 0.5}, {1, 0.5}, {5, 1}});
  CHECK(round_line(m, b, RoundingOffset(0.25), 2) == Configuration{0, 5});
  CHECK(round_line(m, b, RoundingOffset(0.75), 2) == Configuration{1, 5});

  const auto integral = frac(6, {{1, 1}, {4, 2}});
  for (double r = 0.0; r < 1.0; r += 0.1) CHECK(round_line(m, integral, RoundingOffset(r), 3) == Configuration{1, 4, 4});

  const Metric big = unit_line(10);
  const auto heavy = frac(10, {{2, 0.4}, {7, 1.2}, {9, 0.4}});
  for (int i = 0; i < 10; ++i) CHECK(round_line(big, heavy, RoundingOffset(0.1 * i), 2).contains(7));

  CHECK(breakpoint_offsets({b}, 2) == std::vector<double>{0.0, 0.5});
}

TEST_CASE("server presence holds for every offset") {
  Rng rng = make_stream(61, 0);
  int violations = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rng() % 8;
    const int k = 1 + static_cast<int>(rng() % 4);
    const Metric m = random_line(rng, n);
    const auto a = random_fractional(rng, n, k);
    for (int j = 0; j < 10; ++j) {
      const Configuration c = round_line(m, a, RoundingOffset(uniform01(rng)), k);
      CHECK(c.k() == static_cast<std::size_t>(k));
      for (std::size_t p = 0; p < n; ++p)
        if (a.mass[p] >= 1.0 && !c.contains(static_cast<PointId>(p))) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("distance preservation") {
  const Metric m = unit_line(3);
  const auto a = frac(3, {{0, 0.5}, {2, 0.5}});
  const auto b = frac(3, {{1, 1.0}});
  CHECK(average_rounded_distance(m, a, b, 1) == doctest::Approx(1.0));

  const Metric five = unit_line(5);
  for (double r = 0.0; r < 1.0; r += 0.125)
    CHECK(config_distance(five, round_line(five, frac(5, {{0, 1}}), RoundingOffset(r), 1),
                          round_line(five, frac(5, {{4, 1}}), RoundingOffset(r), 1)) == 4.0);

  Rng rng = make_stream(62, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 6;
    const int k = 1 + static_cast<int>(rng() % 3);
    const Metric l = random_line(rng, n);
    const auto x = random_fractional(rng, n, k), y = random_fractional(rng, n, k);
    const double exact = fractional_distance(l, x, y);
    CHECK(average_rounded_distance(l, x, y, k) == doctest::Approx(exact).epsilon(1e-9));
    CHECK(midpoint_average(l, x, y, k) == doctest::Approx(exact).epsilon(1e-9));
  }
}

TEST_CASE("plan rounding and derandomization") {
  const Metric two = unit_line(2);
  const DistributionSequence uniform{{{{0, 0.5}, {1, 0.5}}}};
  const PlannerResult r = plan_nonadaptive(two, uniform, 1);
  const LineRounding best = derandomize_offset(two, r.plan, uniform);
  CHECK(best.expected_cost <= 1.0 + 1e-9);
  CHECK(best.expected_cost <= best.average_cost + 1e-12);

  SUBCASE("constant plan rounds to a constant plan") {
    FractionalPlan p;
    p.k = 2;
    p.configs.assign(3, frac(2, {{0, 0.7}, {1, 1.3}}));
    const IntegralPlan ip = round_plan_line(two, p, RoundingOffset(0.4));
    CHECK(ip.configs[0] == ip.configs[1]);
    CHECK(ip.configs[1] == ip.configs[2]);
  }
  SUBCASE("integral plans are unchanged") {
    FractionalPlan p;
    p.k = 1;
    p.configs = {frac(2, {{0, 1}}), frac(2, {{1, 1}})};
    for (double off : {0.0, 0.3, 0.9}) {
      const IntegralPlan ip = round_plan_line(two, p, RoundingOffset(off));
      CHECK(ip.configs == std::vector<Configuration>{{0}, {1}});
    }
  }
  SUBCASE("rounded cost never exceeds the LP value on lines") {
    Rng rng = make_stream(63, 0);
    for (int rep = 0; rep < 40; ++rep) {
      const std::size_t n = 2 + rng() % 4;
      const int k = 1 + static_cast<int>(rng() % 2);
      const Metric l = random_line(rng, n);
      const DistributionSequence d = random_dists(rng, n, 1 + rng() % 3, n);
      const PlannerResult pr = plan_nonadaptive(l, d, k);
      const LineRounding lr = derandomize_offset(l, pr.plan, d);
      CHECK(lr.expected_cost <= pr.solution.objective_value + 1e-6);
      CHECK(lr.average_cost <= pr.solution.objective_value + 1e-6);
      CHECK(expected_plan_cost(l, lr.plan, d) == doctest::Approx(lr.expected_cost));
    }
  }
}

TEST_CASE("circle rounding stays valid") {
  Rng rng = make_stream(64, 0);
  const std::vector<double> c{0, 2, 3.5, 6, 8.5};
  const Metric circ = build_circle_metric(c, 10);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = random_fractional(rng, 5, 2);
    const Configuration r = round_line(circ, a, RoundingOffset(uniform01(rng)), 2);
    CHECK(r.k() == 2);
    for (std::size_t p = 0; p < 5; ++p)
      if (a.mass[p] >= 1.0) CHECK(r.contains(static_cast<PointId>(p)));
  }
  CHECK_THROWS_AS(round_line(random_euclidean(rng, 3), frac(3, {{0, 1}}), RoundingOffset(0.2), 1), Error);
}
