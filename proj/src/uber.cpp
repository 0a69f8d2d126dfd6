#include "sks/uber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sks/error.hpp"

namespace sks {

void validate(const Metric& m, const std::vector<UberDemand>& demands) {
  for (std::size_t i = 0; i < demands.size(); ++i)
    if (!m.valid_point(demands[i].source) || !m.valid_point(demands[i].destination))
      fail(ErrorKind::kValidation, "demand " + std::to_string(i + 1) + " names an unknown point");
}

std::vector<PointId> uber_reduce(const std::vector<UberDemand>& demands) {
  std::vector<PointId> out;
  out.reserve(demands.size());
  for (const UberDemand& d : demands) out.push_back(d.source);
  return out;
}

double uber_ride_length(const Metric& m, const std::vector<UberDemand>& demands) {
  validate(m, demands);
  double sum = 0.0;
  for (const UberDemand& d : demands) sum += m.dist(d.source, d.destination);
  return sum;
}

double uber_execute(const Metric& m, const std::vector<Configuration>& trace,
                    const std::vector<UberDemand>& demands) {
  validate(m, demands);
  if (trace.size() != demands.size() + 1)
    fail(ErrorKind::kSizeMismatch, "trace must hold one configuration per demand plus the start");
  for (std::size_t i = 0; i < demands.size(); ++i)
    if (!trace[i + 1].contains(demands[i].source))
      fail(ErrorKind::kValidation, "trace does not reach the source of demand " + std::to_string(i + 1));
  return trace_cost(m, trace) + 2.0 * uber_ride_length(m, demands);
}

double uber_execute(const Metric& m, const IntegralPlan& plan, const std::vector<UberDemand>& demands) {
  validate(m, demands);
  return plan_cost_integral(m, plan, uber_reduce(demands)) + 2.0 * uber_ride_length(m, demands);
}

double uber_opt_bruteforce(const Metric& m, const std::vector<UberDemand>& demands, int k,
                           const OracleOptions& options) {
  validate(m, demands);
  if (k < 1) fail(ErrorKind::kValidation, "k must be at least 1");
  const std::size_t states = count_configurations(m.size(), k);
  const unsigned __int128 work =
      static_cast<unsigned __int128>(std::max<std::size_t>(demands.size(), 1)) * states * states;
  if (work > options.budget) fail(ErrorKind::kResource, "Uber enumeration exceeds the state-transition budget");

  const ConfigSpace space(m.size(), k);
  const std::size_t S = space.size();
  const auto dist = config_distance_table(m, space, options.policy);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> cur(S, options.fixed_start ? kInf : 0.0);
  if (options.fixed_start) cur[space.index(*options.fixed_start)] = 0.0;
  for (const UberDemand& dm : demands) {
    // Reach a configuration holding a server at the source, then drive that
    // server to the destination.
    std::vector<double> next(S, kInf);
    const double ride = m.dist(dm.source, dm.destination);
    for (std::size_t b = 0; b < S; ++b) {
      const Configuration& pickup = space.at(b);
      if (!pickup.contains(dm.source)) continue;
      double best = kInf;
      for (std::size_t a = 0; a < S; ++a) best = std::min(best, cur[a] + dist[a * S + b]);
      std::vector<PointId> pos = pickup.positions();
      *std::find(pos.begin(), pos.end(), dm.source) = dm.destination;
      const std::size_t dropoff = space.index(Configuration(std::move(pos)));
      next[dropoff] = std::min(next[dropoff], best + ride);
    }
    cur = std::move(next);
  }
  return *std::min_element(cur.begin(), cur.end());
}

DistributionSequence marginalize_sources(const Metric& m, const StochasticDemands& demands) {
  DistributionSequence d;
  for (const auto& step : demands) {
    std::vector<Outcome> out;
    for (const WeightedDemand& w : step) out.push_back({w.demand.source, w.prob});
    d.steps.push_back(std::move(out));
  }
  return normalized(m, std::move(d));
}

double expected_uber_cost(const Metric& m, const IntegralPlan& plan, const StochasticDemands& demands) {
  double rides = 0.0;
  for (const auto& step : demands)
    for (const WeightedDemand& w : step) rides += w.prob * m.dist(w.demand.source, w.demand.destination);
  return expected_plan_cost(m, plan, marginalize_sources(m, demands)) + 2.0 * rides;
}

}  // namespace sks
