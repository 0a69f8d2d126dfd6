#include "sks/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sks/error.hpp"

namespace sks {

namespace {
constexpr double kFlowEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                          const std::function<double(int, int)>& cost) {
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(total_supply - total_demand) > 1e-6)
    fail(ErrorKind::kImbalance, "transport supply and demand totals differ");

  std::vector<int> src, dst;
  for (std::size_t i = 0; i < supply.size(); ++i)
    if (supply[i] > kFlowEps) src.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > kFlowEps) dst.push_back(static_cast<int>(j));
  const std::size_t ns = src.size(), nt = dst.size();
  if (ns == 0 || nt == 0) return 0.0;

  std::vector<double> c(ns * nt);
  double cmax = 1.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      c[i * nt + j] = cost(src[i], dst[j]);
      cmax = std::max(cmax, std::abs(c[i * nt + j]));
    }
  // Relaxations must improve by more than rounding noise, otherwise
  // zero-cost residual cycles can look slightly negative.
  const double slack = 1e-12 * cmax;

  std::vector<double> left(ns), need(nt), flow(ns * nt, 0.0);
  for (std::size_t i = 0; i < ns; ++i) left[i] = supply[static_cast<std::size_t>(src[i])];
  for (std::size_t j = 0; j < nt; ++j) need[j] = demand[static_cast<std::size_t>(dst[j])];

  // Nodes 0..ns-1 are sources, ns..ns+nt-1 sinks. Bellman-Ford handles the
  // negative-cost residual arcs; instances here are small.
  const std::size_t nv = ns + nt;
  std::vector<double> dist(nv);
  std::vector<long> pred(nv);
  double remaining = std::min(total_supply, total_demand);
  while (remaining > kFlowEps) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), -1);
    for (std::size_t i = 0; i < ns; ++i)
      if (left[i] > kFlowEps) dist[i] = 0.0;
    for (std::size_t iter = 0; iter < nv; ++iter) {
      bool changed = false;
      for (std::size_t i = 0; i < ns; ++i) {
        if (dist[i] == kInf) continue;
        for (std::size_t j = 0; j < nt; ++j) {
          const double nd = dist[i] + c[i * nt + j];
          if (nd < dist[ns + j] - slack) {
            dist[ns + j] = nd;
            pred[ns + j] = static_cast<long>(i);
            changed = true;
          }
        }
      }
      for (std::size_t j = 0; j < nt; ++j) {
        if (dist[ns + j] == kInf) continue;
        for (std::size_t i = 0; i < ns; ++i) {
          if (flow[i * nt + j] <= kFlowEps) continue;
          const double nd = dist[ns + j] - c[i * nt + j];
          if (nd < dist[i] - slack) {
            dist[i] = nd;
            pred[i] = static_cast<long>(ns + j);
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    std::size_t target = nv;
    for (std::size_t j = 0; j < nt; ++j) {
      if (need[j] > kFlowEps && dist[ns + j] < kInf &&
          (target == nv || dist[ns + j] < dist[target]))
        target = ns + j;
    }
    if (target == nv) break;

    double push = need[target - ns];
    std::size_t v = target;
    std::size_t steps = 0;
    while (pred[v] >= 0) {
      if (++steps > nv) fail(ErrorKind::kInfeasible, "transport residual graph has a cycle");
      const std::size_t u = static_cast<std::size_t>(pred[v]);
      if (u >= ns) push = std::min(push, flow[v * nt + (u - ns)]);  // backward arc sink u -> source v
      v = u;
    }
    push = std::min(push, left[v]);
    const std::size_t origin = v;

    v = target;
    while (pred[v] >= 0) {
      const std::size_t u = static_cast<std::size_t>(pred[v]);
      if (u < ns)
        flow[u * nt + (v - ns)] += push;
      else
        flow[v * nt + (u - ns)] -= push;
      v = u;
    }
    left[origin] -= push;
    need[target - ns] -= push;
    remaining -= push;
  }

  double total = 0.0;
  for (std::size_t idx = 0; idx < flow.size(); ++idx)
    if (flow[idx] > 0.0) total += flow[idx] * c[idx];
  return total;
}

}  // namespace sks
