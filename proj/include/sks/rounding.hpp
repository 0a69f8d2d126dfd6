#pragma once

#include <cstdint>
#include <vector>

#include "sks/metric.hpp"
#include "sks/planner.hpp"

namespace sks {

/// Shared rounding offset r in [0, 1). Offset 0 is treated as the limit
/// r -> 1, so servers sit at f_A(1), ..., f_A(k); the two conventions differ
/// on a null set of offsets only.
struct RoundingOffset {
  double r = 0.0;

  explicit RoundingOffset(double value = 0.0);
};

/// Masses are rounded onto a fixed-point grid of 2^-40 before rounding so
/// that cumulative sums, breakpoints and the "mass >= 1 keeps a server"
/// guarantee are exact integer statements.
inline constexpr std::int64_t kMassUnit = std::int64_t{1} << 40;

/// First point (in coordinate order) at which the cumulative mass reaches x,
/// for x in (0, k]. Requires a line or circle metric.
PointId mass_function(const Metric& m, const FractionalConfiguration& a, double x);

/// Servers at f_A(r), f_A(r+1), ..., f_A(r+k-1).
Configuration round_line(const Metric& m, const FractionalConfiguration& a, RoundingOffset offset,
                         int k);

/// Rounds every configuration of the plan with the same offset.
IntegralPlan round_plan_line(const Metric& m, const FractionalPlan& plan, RoundingOffset offset);

/// Distinct fractional parts of all cumulative masses, ascending; the
/// rounded configurations are piecewise constant in r between them.
std::vector<double> breakpoint_offsets(const std::vector<FractionalConfiguration>& configs, int k);

/// One cell (lo, hi] of the offset partition with a representative offset
/// and its length.
struct OffsetPiece {
  RoundingOffset offset;
  double weight;
};

std::vector<OffsetPiece> offset_partition(const std::vector<FractionalConfiguration>& configs, int k);

/// Exact average over r in [0,1) of config_distance(I_r(a), I_r(b)).
double average_rounded_distance(const Metric& m, const FractionalConfiguration& a,
                                const FractionalConfiguration& b, int k);

struct LineRounding {
  RoundingOffset offset;
  IntegralPlan plan;
  double expected_cost = 0.0;  // of `plan` under the distributions
  double average_cost = 0.0;   // over uniformly random r
};

/// Exhaustive search over the offset partition for the offset whose rounded
/// plan has the least expected cost.
LineRounding derandomize_offset(const Metric& m, const FractionalPlan& plan,
                                const DistributionSequence& d);

}  // namespace sks
