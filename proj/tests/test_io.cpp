#include <doctest.h>

#include <sstream>

#include "sks/error.hpp"
#include "sks/io.hpp"

using namespace sks;

namespace {

DistributionSequence parse(const std::string& text, const Metric& m, std::vector<std::string>* warnings = nullptr) {
  std::istringstream in(text);
  return parse_distributions_csv(in, m, "d.csv", warnings);
}

std::string rejection(const std::string& text, const Metric& m) {
  try {
    parse(text, m);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    return e.what();
  }
  return "";
}

const Metric& three() {
  static const Metric m = build_line_metric(std::vector<double>{0, 10, 20});
  return m;
}

}  // namespace

TEST_CASE("metric JSON") {
  const Metric l = parse_metric_json(R"({"kind":"line","coords":[0,10,25]})");
  CHECK(l.kind() == MetricKind::kLine);
  CHECK(l.dist(0, 2) == 25.0);
  const Metric c = parse_metric_json(R"({"kind":"circle","coords":[0,3,8],"circumference":10})");
  CHECK(c.dist(0, 2) == 2.0);
  const Metric g = parse_metric_json(R"({"kind":"general","dist":[[0,1,2],[1,0,1],[2,1,0]]})");
  CHECK(g.dist(0, 2) == 2.0);
  CHECK_THROWS_AS(parse_metric_json(R"({"kind":"general","dist":[[0,1,5],[1,0,1],[5,1,0]]})"), Error);
  CHECK_THROWS_AS(parse_metric_json(R"({"kind":"torus"})"), Error);
  CHECK_THROWS_AS(parse_metric_json("{not json"), Error);
  CHECK_THROWS_AS(parse_metric_json(R"({"kind":"line"})"), Error);
  for (const Metric* m : {&l, &c, &g}) {
    std::ostringstream out;
    write_metric_json(*m, out);
    const Metric back = parse_metric_json(out.str());
    for (PointId a = 0; a < 3; ++a)
      for (PointId b = 0; b < 3; ++b) CHECK(back.dist(a, b) == m->dist(a, b));
  }
}

TEST_CASE("distribution CSV") {
  SUBCASE("minimal file") {
    const DistributionSequence d = parse("step,point,probability\n1,2,1\n", three());
    CHECK(d.t() == 1);
    CHECK(d.steps[0][0].point == 2);
  }
  SUBCASE("round trip") {
    const DistributionSequence d = parse("step,point,probability\n1,0,0.25\n1,1,0.75\n2,2,1\n", three());
    std::ostringstream out;
    write_distributions_csv(d, out);
    const DistributionSequence back = parse(out.str(), three());
    REQUIRE(back.t() == 2);
    CHECK(back.steps[0][1].prob == 0.75);
  }
  SUBCASE("non-normalized step is rejected with its line") {
    const std::string msg = rejection("step,point,probability\n1,0,0.5\n1,1,0.4\n", three());
    CHECK(msg.find("d.csv:2") != std::string::npos);
    CHECK(msg.find("step 1") != std::string::npos);
  }
  SUBCASE("tiny drift is renormalized") {
    const DistributionSequence d = parse("step,point,probability\n1,0,0.5000004\n1,1,0.5\n", three());
    CHECK(d.steps[0][0].prob + d.steps[0][1].prob == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("duplicates are summed with a warning") {
    std::vector<std::string> warnings;
    const DistributionSequence d = parse("step,point,probability\n1,0,0.25\n1,0,0.25\n1,2,0.5\n", three(), &warnings);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("d.csv:3") != std::string::npos);
    CHECK(d.steps[0][0].prob == doctest::Approx(0.5));
  }
  SUBCASE("cell errors carry line and column") {
    CHECK(rejection("step,point,probability\n1,7,1\n", three()).find("d.csv:2:2") != std::string::npos);
    CHECK(rejection("step,point,probability\n1,0,x\n", three()).find("d.csv:2:3") != std::string::npos);
    CHECK(rejection("step,point,probability\n0,0,1\n", three()).find("d.csv:2:1") != std::string::npos);
    CHECK(rejection("step,point,probability\n1,0\n", three()).find("d.csv:2") != std::string::npos);
    CHECK(rejection("step,pt,probability\n", three()).find("d.csv:1:2") != std::string::npos);
    CHECK(rejection("step,point,probability\n1,0,-1\n1,1,2\n", three()).find("d.csv:2:3") != std::string::npos);
  }
  SUBCASE("gaps and empty files") {
    CHECK(rejection("step,point,probability\n1,0,1\n3,0,1\n", three()).find("step 2") != std::string::npos);
    CHECK(!rejection("", three()).empty());
    CHECK(!rejection("step,point,probability\n", three()).empty());
  }
}

TEST_CASE("scenario CSV") {
  std::istringstream in("scenario_id,prob,step,point\na,0.5,1,0\na,0.5,2,1\nb,0.5,1,2\nb,0.5,2,2\n");
  const ScenarioSet s = parse_scenarios_csv(in, three(), "s.csv");
  CHECK(s.size() == 2);
  CHECK(s.sequences[1] == std::vector<PointId>{2, 2});

  std::istringstream ragged("scenario_id,prob,step,point\na,0.5,1,0\nb,0.5,1,2\nb,0.5,2,2\n");
  CHECK_THROWS_AS(parse_scenarios_csv(ragged, three(), "s.csv"), Error);
  std::istringstream light("scenario_id,prob,step,point\na,0.5,1,0\nb,0.4,1,2\n");
  CHECK_THROWS_AS(parse_scenarios_csv(light, three(), "s.csv"), Error);
  std::istringstream mixed("scenario_id,prob,step,point\na,0.5,1,0\na,0.4,2,0\n");
  try {
    parse_scenarios_csv(mixed, three(), "s.csv");
    FAIL("accepted conflicting probabilities");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("s.csv:3:2") != std::string::npos);
  }
}

TEST_CASE("demand CSV") {
  std::istringstream det("step,source,destination\n1,0,2\n2,1,1\n");
  const DemandSchedule a = parse_demands_csv(det, three(), "u.csv");
  CHECK(a.deterministic);
  REQUIRE(a.sequence().size() == 2);
  CHECK(a.sequence()[0].destination == 2);

  std::istringstream weighted("step,source,destination,probability\n1,0,2,0.5\n1,1,2,0.5\n");
  const DemandSchedule b = parse_demands_csv(weighted, three(), "u.csv");
  CHECK(!b.deterministic);
  CHECK_THROWS_AS(b.sequence(), Error);

  std::istringstream twice("step,source,destination\n1,0,2\n1,1,1\n");
  CHECK_THROWS_AS(parse_demands_csv(twice, three(), "u.csv"), Error);
}

TEST_CASE("plan CSV and number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(3.0) == "3");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333333333");
  std::ostringstream out;
  write_plan_csv(IntegralPlan{{{0, 2}, {1, 1}}}, 3, out);
  CHECK(out.str().find("step") == 0);
  CHECK(out.str().find('\n') != std::string::npos);
}

TEST_CASE("shipped fixtures parse") {
  const std::string root = SKS_DATA_DIR;
  const Metric big = load_metric(root + "/synthetic40x30/metric.json");
  const DistributionSequence d = load_distributions(root + "/synthetic40x30/dists.csv", big);
  CHECK(big.size() == 40);
  CHECK(d.t() == 30);
  const Metric small = load_metric(root + "/small/metric.json");
  CHECK(load_distributions(root + "/small/dists.csv", small).t() == 3);
  CHECK(load_scenarios(root + "/small/scenarios.csv", small).size() == 2);
  CHECK(load_demands(root + "/small/demands.csv", small).sequence().size() == 3);
}
