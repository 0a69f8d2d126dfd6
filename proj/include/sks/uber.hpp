#pragma once

#include <vector>

#include "sks/metric.hpp"
#include "sks/oracles.hpp"
#include "sks/planner.hpp"

namespace sks {

struct UberDemand {
  PointId source;
  PointId destination;
};

void validate(const Metric& m, const std::vector<UberDemand>& demands);

/// The k-server instance seen by the wrapped algorithm: sources only.
std::vector<PointId> uber_reduce(const std::vector<UberDemand>& demands);

/// Sum of d(s_i, t_i).
double uber_ride_length(const Metric& m, const std::vector<UberDemand>& demands);

/// Cost of serving the demands with a k-server trace A_0..A_t for the
/// sources (A_i must hold a server at s_i): the trace's movement plus a
/// detour s_i -> t_i -> s_i for every demand.
double uber_execute(const Metric& m, const std::vector<Configuration>& trace,
                    const std::vector<UberDemand>& demands);
/// Same with a non-adaptive plan serving sources by round trips.
double uber_execute(const Metric& m, const IntegralPlan& plan, const std::vector<UberDemand>& demands);

/// Optimal Uber cost: serving demand i means some server visits s_i and then
/// t_i and may stay at t_i. Free initial configuration unless fixed.
double uber_opt_bruteforce(const Metric& m, const std::vector<UberDemand>& demands, int k,
                           const OracleOptions& options = {});

/// Per-step distributions over demand pairs.
struct WeightedDemand {
  UberDemand demand;
  double prob;
};
using StochasticDemands = std::vector<std::vector<WeightedDemand>>;

/// Source marginals, fed to the k-server pipeline.
DistributionSequence marginalize_sources(const Metric& m, const StochasticDemands& demands);

/// Exact expected cost of a non-adaptive plan over the demand distributions:
/// expected plan cost on the source marginals plus 2 E[d(s_i, t_i)].
double expected_uber_cost(const Metric& m, const IntegralPlan& plan, const StochasticDemands& demands);

}  // namespace sks
