#pragma once

#include <functional>
#include <span>

namespace sks {

/// Balanced transportation problem solved exactly by successive shortest
/// paths on the residual bipartite graph. `supply` and `demand` must be
/// nonnegative with equal totals (within 1e-6). Integral inputs yield an
/// integral optimal flow, so this doubles as the assignment solver used for
/// configuration distances on general metrics.
double min_cost_transport(std::span<const double> supply, std::span<const double> demand,
                          const std::function<double(int, int)>& cost);

}  // namespace sks
