#include "sks/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sks/error.hpp"

namespace sks {

RoundingOffset::RoundingOffset(double value) : r(value) {
  if (!(value >= 0.0 && value < 1.0))
    fail(ErrorKind::kDomain, "rounding offset must lie in [0, 1)");
}

namespace {

struct Quantized {
  std::vector<std::int64_t> cum;  // cumulative mass in units of kMassUnit
  std::int64_t excess = 0;        // max(0, total - k*unit)
  PointId last_positive = 0;
};

Quantized quantize(const FractionalConfiguration& a, int k) {
  Quantized q;
  q.cum.resize(a.size());
  std::int64_t acc = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double v = a.mass[j];
    if (v < -kTol) fail(ErrorKind::kValidation, "negative mass in fractional configuration");
    const std::int64_t units = v > 0.0 ? std::llround(v * static_cast<double>(kMassUnit)) : 0;
    acc += units;
    q.cum[j] = acc;
    if (units > 0) q.last_positive = static_cast<PointId>(j);
  }
  const std::int64_t target = static_cast<std::int64_t>(k) * kMassUnit;
  if (std::llabs(acc - target) > kMassUnit / 1000000)
    fail(ErrorKind::kImbalance, "fractional configuration mass does not match k");
  q.excess = std::max<std::int64_t>(0, acc - target);
  return q;
}

std::int64_t offset_units(RoundingOffset offset) {
  std::int64_t u = std::llround(offset.r * static_cast<double>(kMassUnit));
  if (u <= 0) u = kMassUnit;
  return std::min(u, kMassUnit);
}

PointId locate(const Quantized& q, std::int64_t x) {
  const auto it = std::lower_bound(q.cum.begin(), q.cum.end(), x);
  if (it == q.cum.end()) return q.last_positive;
  return static_cast<PointId>(it - q.cum.begin());
}

Configuration round_quantized(const Quantized& q, std::int64_t offset, int k) {
  // An offset inside the rounding excess could push a whole unit of mass
  // past the last server; nudge it just above the excess.
  offset = std::max(offset, q.excess + 1);
  std::vector<PointId> pos;
  pos.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pos.push_back(locate(q, offset + static_cast<std::int64_t>(i) * kMassUnit));
  return Configuration(std::move(pos));
}

void require_ordered(const Metric& m) {
  if (!m.ordered()) fail(ErrorKind::kDomain, "line rounding needs a line or circle metric");
}

std::vector<std::int64_t> breakpoint_units(const std::vector<FractionalConfiguration>& configs, int k) {
  std::vector<std::int64_t> b{kMassUnit};
  for (const auto& a : configs) {
    const Quantized q = quantize(a, k);
    for (std::int64_t c : q.cum) {
      const std::int64_t frac = c % kMassUnit;
      b.push_back(frac == 0 ? kMassUnit : frac);
    }
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

RoundingOffset offset_from_units(std::int64_t u) {
  return RoundingOffset(u >= kMassUnit ? 0.0 : static_cast<double>(u) / static_cast<double>(kMassUnit));
}

}  // namespace

PointId mass_function(const Metric& m, const FractionalConfiguration& a, double x) {
  require_ordered(m);
  if (a.size() != m.size()) fail(ErrorKind::kValidation, "configuration size does not match metric");
  const double total = a.total();
  if (!(x > 0.0) || x > total + 1e-9) fail(ErrorKind::kDomain, "mass function argument outside (0, k]");
  const int k = static_cast<int>(std::llround(total));
  const Quantized q = quantize(a, k);
  return locate(q, std::llround(x * static_cast<double>(kMassUnit)));
}

Configuration round_line(const Metric& m, const FractionalConfiguration& a, RoundingOffset offset,
                         int k) {
  require_ordered(m);
  if (a.size() != m.size()) fail(ErrorKind::kValidation, "configuration size does not match metric");
  return round_quantized(quantize(a, k), offset_units(offset), k);
}

IntegralPlan round_plan_line(const Metric& m, const FractionalPlan& plan, RoundingOffset offset) {
  IntegralPlan out;
  const int k = static_cast<int>(std::llround(plan.k));
  out.configs.reserve(plan.configs.size());
  for (const auto& a : plan.configs) out.configs.push_back(round_line(m, a, offset, k));
  return out;
}

std::vector<double> breakpoint_offsets(const std::vector<FractionalConfiguration>& configs, int k) {
  std::vector<double> out;
  for (std::int64_t u : breakpoint_units(configs, k)) out.push_back(offset_from_units(u).r);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<OffsetPiece> offset_partition(const std::vector<FractionalConfiguration>& configs, int k) {
  const auto b = breakpoint_units(configs, k);
  std::vector<OffsetPiece> pieces;
  std::int64_t prev = 0;
  for (std::int64_t hi : b) {
    pieces.push_back({offset_from_units(hi),
                      static_cast<double>(hi - prev) / static_cast<double>(kMassUnit)});
    prev = hi;
  }
  return pieces;
}

double average_rounded_distance(const Metric& m, const FractionalConfiguration& a,
                                const FractionalConfiguration& b, int k) {
  require_ordered(m);
  double avg = 0.0;
  for (const OffsetPiece& p : offset_partition({a, b}, k)) {
    avg += p.weight * config_distance(m, round_line(m, a, p.offset, k), round_line(m, b, p.offset, k));
  }
  return avg;
}

LineRounding derandomize_offset(const Metric& m, const FractionalPlan& plan,
                                const DistributionSequence& d) {
  require_ordered(m);
  const int k = static_cast<int>(std::llround(plan.k));
  LineRounding best;
  best.expected_cost = std::numeric_limits<double>::infinity();
  for (const OffsetPiece& p : offset_partition(plan.configs, k)) {
    IntegralPlan rounded = round_plan_line(m, plan, p.offset);
    const double c = expected_plan_cost(m, rounded, d);
    best.average_cost += p.weight * c;
    if (c < best.expected_cost) {
      best.expected_cost = c;
      best.offset = p.offset;
      best.plan = std::move(rounded);
    }
  }
  return best;
}

}  // namespace sks
