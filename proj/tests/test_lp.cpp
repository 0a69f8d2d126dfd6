#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sks/error.hpp"
#include "sks/lp.hpp"
#include "sks/tableau.hpp"
#include "support/oracles.hpp"

using namespace sks;
using namespace sks::testing;

TEST_CASE("small programs") {
  SUBCASE("min x s.t. x >= 3") {
    LinearProgram lp;
    const int x = lp.add_variable("x", 1.0);
    lp.add_constraint({{x, 1.0}}, Relation::kGreaterEqual, 3.0, "lower");
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(3.0));
    CHECK(sol.objective_value == doctest::Approx(3.0));

    const CertificateReport cert = lp_dual_bound(lp, sol);
    CHECK(cert.pass);
    CHECK(cert.max_violation == doctest::Approx(0.0));
    CHECK(cert.gap == doctest::Approx(0.0));

    LpSolution bad = sol;
    bad.values[0] = 2.9;
    const CertificateReport worse = lp_dual_bound(lp, bad);
    CHECK_FALSE(worse.pass);
    CHECK(worse.max_violation == doctest::Approx(0.1));
    CHECK(worse.worst == "lower");
  }
  SUBCASE("min x + y s.t. x + y >= 2, x - y = 0") {
    LinearProgram lp;
    const int x = lp.add_variable("x", 1.0), y = lp.add_variable("y", 1.0);
    lp.add_constraint({{x, 1}, {y, 1}}, Relation::kGreaterEqual, 2);
    lp.add_constraint({{x, 1}, {y, -1}}, Relation::kEqual, 0);
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[0] == doctest::Approx(1.0));
    CHECK(sol.values[1] == doctest::Approx(1.0));
    CHECK(sol.objective_value == doctest::Approx(2.0));
  }
  SUBCASE("bounds are honoured") {
    LinearProgram lp;
    const int x = lp.add_variable("x", -1.0, 1.0, 4.0);
    const int y = lp.add_variable("y", 1.0, 2.0);
    lp.add_constraint({{x, 1}, {y, 1}}, Relation::kLessEqual, 10);
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.values[x] == doctest::Approx(4.0));
    CHECK(sol.values[y] == doctest::Approx(2.0));
    CHECK(sol.objective_value == doctest::Approx(-2.0));
  }
  SUBCASE("infeasible and unbounded are statuses") {
    LinearProgram lp;
    const int x = lp.add_variable("x", 1.0);
    lp.add_constraint({{x, 1}}, Relation::kLessEqual, 1);
    lp.add_constraint({{x, 1}}, Relation::kGreaterEqual, 2);
    CHECK(solve(lp).status == LpStatus::kInfeasible);

    LinearProgram un;
    const int z = un.add_variable("z", -1.0);
    un.add_constraint({{z, 1}}, Relation::kGreaterEqual, 0);
    CHECK(solve(un).status == LpStatus::kUnbounded);
  }
  SUBCASE("bad variable index is a construction error") {
    LinearProgram lp;
    lp.add_variable("x", 1.0);
    CHECK_THROWS(lp.add_constraint({{3, 1.0}}, Relation::kLessEqual, 1));
  }
  SUBCASE("degenerate cycling example terminates") {
    // Beale's classic cycling program for the pure largest-coefficient rule.
    LinearProgram lp;
    const int a = lp.add_variable("a", -0.75), b = lp.add_variable("b", 150), c = lp.add_variable("c", -0.02),
              d = lp.add_variable("d", 6);
    lp.add_constraint({{a, 0.25}, {b, -60}, {c, -0.04}, {d, 9}}, Relation::kLessEqual, 0);
    lp.add_constraint({{a, 0.5}, {b, -90}, {c, -0.02}, {d, 3}}, Relation::kLessEqual, 0);
    lp.add_constraint({{c, 1}}, Relation::kLessEqual, 1);
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(sol.objective_value == doctest::Approx(-0.05));
  }
}

TEST_CASE("random programs agree with vertex enumeration") {
  Rng rng = make_stream(41, 0);
  int checked = 0;
  for (int rep = 0; checked < 60 && rep < 500; ++rep) {
    const std::size_t vars = 2 + rng() % 7, rows = 1 + rng() % 8;
    const LinearProgram lp = random_bounded_lp(rng, vars, rows);
    const double ref = vertex_enumeration(lp);
    if (!std::isfinite(ref)) continue;  // dependent equality rows defeat the enumerator
    ++checked;
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == LpStatus::kOptimal);
    CHECK(std::abs(sol.objective_value - ref) <= 1e-7 * std::max(1.0, std::abs(ref)));
    const CertificateReport cert = lp_dual_bound(lp, sol);
    CHECK(cert.pass);
    CHECK(cert.max_violation <= 1e-7);
  }
  CHECK(checked == 60);
}

TEST_CASE("determinism and monotonicity") {
  Rng rng = make_stream(42, 0);
  for (int rep = 0; rep < 30; ++rep) {
    LinearProgram lp = random_bounded_lp(rng, 6, 5);
    const LpSolution a = solve(lp), b = solve(lp);
    REQUIRE(a.status == LpStatus::kOptimal);
    CHECK(a.values == b.values);
    CHECK(a.objective_value == b.objective_value);

    std::vector<Term> extra;
    for (int j = 0; j < 6; ++j) extra.push_back({j, static_cast<double>(static_cast<int>(rng() % 7) - 3)});
    lp.add_constraint(extra, Relation::kLessEqual, static_cast<double>(rng() % 5));
    const LpSolution c = solve(lp);
    if (c.status == LpStatus::kOptimal) CHECK(c.objective_value >= a.objective_value - 1e-9);
  }
}

TEST_CASE("serial and parallel pivots agree bit for bit") {
  Rng rng = make_stream(43, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const LinearProgram lp = random_bounded_lp(rng, 8, 8);
    SolveOptions serial;
    serial.policy = ExecPolicy::kSerial;
    SolveOptions parallel;
    parallel.policy = ExecPolicy::kParallel;
    const LpSolution a = solve(lp, serial), b = solve(lp, parallel);
    CHECK(a.status == b.status);
    CHECK(a.values == b.values);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("LP text dump") {
  LinearProgram lp;
  const int x = lp.add_variable("f[1,0,2]", 2.5);
  const int y = lp.add_variable("y", -1.0, 0.0, 3.0);
  lp.add_constraint({{x, 1}, {y, -2}}, Relation::kGreaterEqual, 1, "cover[1,0]");
  lp.add_constraint({{x, 1}}, Relation::kEqual, 4, "fix");
  std::ostringstream out;
  write_lp_text(lp, out);
  const std::string text = out.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
  CHECK(text.find("f(1,0,2)") != std::string::npos);
  CHECK(text.find('[') == std::string::npos);
  CHECK(text.find(">=") != std::string::npos);
  CHECK(text.find("<= 3") != std::string::npos);
}

TEST_CASE("pivot kernel") {
  Tableau t(2, 3);
  t(0, 0) = 2; t(0, 1) = 4; t(0, 2) = 6;
  t(1, 0) = 1; t(1, 1) = 1; t(1, 2) = 1;
  pivot(t, 0, 0, ExecPolicy::kSerial);
  CHECK(t(0, 0) == 1.0);
  CHECK(t(0, 1) == 2.0);
  CHECK(t(1, 0) == 0.0);
  CHECK(t(1, 1) == -1.0);
  CHECK(t(1, 2) == -2.0);
}

TEST_CASE("tableau size limit") {
  Rng rng = make_stream(19, 0);
  const LinearProgram lp = random_bounded_lp(rng, 6, 6);
  SolveOptions tiny;
  tiny.max_tableau_entries = 20;
  try {
    solve(lp, tiny);
    FAIL("limit ignored");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kResource);
  }
  CHECK(solve(lp).status == LpStatus::kOptimal);
}
