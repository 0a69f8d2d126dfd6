#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sks/correlated.hpp"
#include "sks/metric.hpp"
#include "sks/planner.hpp"
#include "sks/uber.hpp"

namespace sks {

/// JSON metric: {"kind":"line","coords":[...]},
/// {"kind":"circle","coords":[...],"circumference":C} or
/// {"kind":"general","dist":[[...],...]}.
Metric parse_metric_json(const std::string& text);
Metric load_metric(const std::string& path);
void write_metric_json(const Metric& m, std::ostream& out);

/// CSV `step,point,probability` with 1-based consecutive steps. Repeated
/// (step, point) rows are summed and reported in `warnings`. A step whose
/// probabilities miss 1 by more than 1e-6 is rejected; smaller gaps are
/// renormalised away.
DistributionSequence parse_distributions_csv(std::istream& in, const Metric& m, const std::string& source,
                                             std::vector<std::string>* warnings = nullptr);
DistributionSequence load_distributions(const std::string& path, const Metric& m,
                                        std::vector<std::string>* warnings = nullptr);
void write_distributions_csv(const DistributionSequence& d, std::ostream& out);

/// CSV `scenario_id,prob,step,point`; every row of a scenario repeats its
/// probability.
ScenarioSet parse_scenarios_csv(std::istream& in, const Metric& m, const std::string& source);
ScenarioSet load_scenarios(const std::string& path, const Metric& m);

/// CSV `step,source,destination[,probability]`. Without the probability
/// column each step holds exactly one demand.
struct DemandSchedule {
  StochasticDemands steps;
  bool deterministic = true;

  /// The demand sequence of a deterministic schedule.
  std::vector<UberDemand> sequence() const;
};

DemandSchedule parse_demands_csv(std::istream& in, const Metric& m, const std::string& source);
DemandSchedule load_demands(const std::string& path, const Metric& m);

/// CSV `step,point,mass` listing nonzero masses of B_0..B_t.
void write_plan_csv(const FractionalPlan& plan, std::ostream& out);
void write_plan_csv(const IntegralPlan& plan, std::size_t n, std::ostream& out);

/// Shortest decimal text that round-trips the double.
std::string format_number(double v);

}  // namespace sks
