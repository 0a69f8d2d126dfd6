#include "sks/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sks/error.hpp"
#include "sks/transport.hpp"

namespace sks {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::kLine: return "line";
    case MetricKind::kCircle: return "circle";
    case MetricKind::kGeneral: return "general";
    case MetricKind::kHstInduced: return "hst-induced";
  }
  return "unknown";
}

double Metric::diameter() const {
  double d = 0.0;
  for (double v : dist_) d = std::max(d, v);
  return d;
}

double Metric::min_positive_distance() const {
  double d = 0.0;
  for (double v : dist_) {
    if (v > 0.0 && (d == 0.0 || v < d)) d = v;
  }
  return d;
}

Metric build_metric_unchecked(MetricKind kind, std::size_t n, std::vector<double> dist) {
  Metric m;
  m.n_ = n;
  m.kind_ = kind;
  m.dist_ = std::move(dist);
  return m;
}

Metric build_line_metric(std::span<const double> coords) {
  if (coords.empty()) fail(ErrorKind::kValidation, "line metric needs at least one point");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!std::isfinite(coords[i]))
      fail(ErrorKind::kValidation, "line coordinate " + std::to_string(i) + " is not finite");
    if (i > 0 && !(coords[i] > coords[i - 1]))
      fail(ErrorKind::kValidation, "line coordinates must be strictly ascending (index " +
                                       std::to_string(i) + ")");
  }
  const std::size_t n = coords.size();
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(coords[i] - coords[j]);
  Metric m = build_metric_unchecked(MetricKind::kLine, n, std::move(dist));
  m.coords_.assign(coords.begin(), coords.end());
  return m;
}

Metric build_circle_metric(std::span<const double> coords, double circumference) {
  if (coords.empty()) fail(ErrorKind::kValidation, "circle metric needs at least one point");
  if (!(circumference > 0.0) || !std::isfinite(circumference))
    fail(ErrorKind::kValidation, "circle circumference must be positive");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!(coords[i] >= 0.0 && coords[i] < circumference))
      fail(ErrorKind::kValidation,
           "circle coordinate " + std::to_string(i) + " outside [0, circumference)");
    if (i > 0 && !(coords[i] > coords[i - 1]))
      fail(ErrorKind::kValidation, "circle coordinates must be strictly ascending (index " +
                                       std::to_string(i) + ")");
  }
  const std::size_t n = coords.size();
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double delta = std::abs(coords[i] - coords[j]);
      dist[i * n + j] = std::min(delta, circumference - delta);
    }
  }
  Metric m = build_metric_unchecked(MetricKind::kCircle, n, std::move(dist));
  m.coords_.assign(coords.begin(), coords.end());
  m.circumference_ = circumference;
  return m;
}

Metric build_general_metric(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.size();
  if (n == 0) fail(ErrorKind::kValidation, "metric needs at least one point");
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      fail(ErrorKind::kValidation, "distance matrix row " + std::to_string(i) + " has " +
                                       std::to_string(rows[i].size()) + " entries, expected " +
                                       std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rows[i][j];
      if (!std::isfinite(v) || v < 0.0)
        fail(ErrorKind::kValidation, "distance (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") must be finite and nonnegative");
      dist[i * n + j] = v;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dist[i * n + i]) > kTol)
      fail(ErrorKind::kValidation, "d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(dist[i * n + j] - dist[j * n + i]) > kTol)
        fail(ErrorKind::kValidation,
             "distance matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t z = 0; z < n; ++z) {
        if (dist[x * n + y] + dist[y * n + z] < dist[x * n + z] - kTriangleSlack) {
          std::ostringstream os;
          os << "triangle inequality violated: d(" << x << "," << y << ") + d(" << y << "," << z
             << ") < d(" << x << "," << z << ")";
          fail(ErrorKind::kValidation, os.str());
        }
      }
    }
  }
  return build_metric_unchecked(MetricKind::kGeneral, n, std::move(dist));
}

Configuration::Configuration(std::vector<PointId> positions) : positions_(std::move(positions)) {
  std::sort(positions_.begin(), positions_.end());
}

bool Configuration::contains(PointId p) const {
  return std::binary_search(positions_.begin(), positions_.end(), p);
}

std::vector<int> Configuration::counts(std::size_t n) const {
  std::vector<int> c(n, 0);
  for (PointId p : positions_) ++c[static_cast<std::size_t>(p)];
  return c;
}

double FractionalConfiguration::total() const {
  return std::accumulate(mass.begin(), mass.end(), 0.0);
}

FractionalConfiguration FractionalConfiguration::lift(const Configuration& c, std::size_t n) {
  FractionalConfiguration f;
  f.mass.assign(n, 0.0);
  for (PointId p : c.positions()) f.mass[static_cast<std::size_t>(p)] += 1.0;
  return f;
}

void validate(const Metric& m, const Configuration& c) {
  for (PointId p : c.positions()) {
    if (!m.valid_point(p))
      fail(ErrorKind::kValidation, "configuration point " + std::to_string(p) + " not in metric");
  }
}

void validate(const Metric& m, const FractionalConfiguration& c, double k) {
  if (c.size() != m.size())
    fail(ErrorKind::kValidation, "fractional configuration has " + std::to_string(c.size()) +
                                     " entries for a metric of " + std::to_string(m.size()) +
                                     " points");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c.mass[i] >= 0.0)) fail(ErrorKind::kValidation, "negative mass at " + std::to_string(i));
  }
  if (std::abs(c.total() - k) > kTol)
    fail(ErrorKind::kValidation, "fractional configuration mass does not sum to k");
}

namespace {

// Transport on a cycle with edge lengths `len` and prefix imbalances `prefix`
// (flow through edge j is prefix[j] - c for a free circulation c). The
// optimal c is a weighted median of the prefixes.
double cycle_transport(std::vector<double> prefix, const std::vector<double>& len) {
  std::vector<std::size_t> order(prefix.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return prefix[a] < prefix[b]; });
  const double half = std::accumulate(len.begin(), len.end(), 0.0) / 2.0;
  double acc = 0.0;
  double median = 0.0;
  for (std::size_t idx : order) {
    acc += len[idx];
    median = prefix[idx];
    if (acc >= half) break;
  }
  double cost = 0.0;
  for (std::size_t j = 0; j < prefix.size(); ++j) cost += len[j] * std::abs(prefix[j] - median);
  return cost;
}

double ordered_transport(const Metric& m, std::span<const double> x, std::span<const double> y) {
  const std::size_t n = m.size();
  const auto& c = m.coords();
  std::vector<double> prefix(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += x[j] - y[j];
    prefix[j] = acc;
  }
  if (m.kind() == MetricKind::kLine) {
    double cost = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) cost += std::abs(prefix[j]) * (c[j + 1] - c[j]);
    return cost;
  }
  std::vector<double> len(n);
  for (std::size_t j = 0; j + 1 < n; ++j) len[j] = c[j + 1] - c[j];
  len[n - 1] = m.circumference() - c[n - 1] + c[0];
  prefix[n - 1] = 0.0;
  return cycle_transport(std::move(prefix), len);
}

}  // namespace

double config_distance(const Metric& m, const Configuration& x, const Configuration& y) {
  if (x.k() != y.k())
    fail(ErrorKind::kSizeMismatch, "configurations hold " + std::to_string(x.k()) + " and " +
                                       std::to_string(y.k()) + " servers");
  validate(m, x);
  validate(m, y);
  if (x == y) return 0.0;
  if (m.kind() == MetricKind::kLine) {
    double cost = 0.0;
    const auto& a = x.positions();
    const auto& b = y.positions();
    for (std::size_t i = 0; i < a.size(); ++i) cost += m.dist(a[i], b[i]);
    return cost;
  }
  std::vector<double> cx(m.size(), 0.0), cy(m.size(), 0.0);
  for (PointId p : x.positions()) cx[static_cast<std::size_t>(p)] += 1.0;
  for (PointId p : y.positions()) cy[static_cast<std::size_t>(p)] += 1.0;
  if (m.kind() == MetricKind::kCircle) return ordered_transport(m, cx, cy);
  return min_cost_transport(cx, cy, [&](int u, int v) { return m.dist(u, v); });
}

double fractional_distance(const Metric& m, const FractionalConfiguration& x,
                           const FractionalConfiguration& y) {
  if (x.size() != m.size() || y.size() != m.size())
    fail(ErrorKind::kValidation, "fractional configuration size does not match metric");
  if (std::abs(x.total() - y.total()) > 1e-6)
    fail(ErrorKind::kImbalance, "fractional configurations carry different total mass");
  if (m.ordered()) return ordered_transport(m, x.mass, y.mass);
  return min_cost_transport(x.mass, y.mass, [&](int u, int v) { return m.dist(u, v); });
}

double serve_distance(const Metric& m, const Configuration& b, PointId r) {
  if (!m.valid_point(r)) fail(ErrorKind::kValidation, "request point not in metric");
  validate(m, b);
  if (b.k() == 0) fail(ErrorKind::kInfeasible, "empty configuration cannot serve");
  double best = m.dist(b.positions().front(), r);
  for (PointId s : b.positions()) best = std::min(best, m.dist(s, r));
  return best;
}

double fractional_serve_distance(const Metric& m, const FractionalConfiguration& b, PointId r) {
  if (!m.valid_point(r)) fail(ErrorKind::kValidation, "request point not in metric");
  if (b.size() != m.size())
    fail(ErrorKind::kValidation, "fractional configuration size does not match metric");
  if (b.total() < 1.0 - kTol) fail(ErrorKind::kInfeasible, "total server mass below one");
  double deficit = 1.0 - b[r];
  if (deficit <= kTol) return 0.0;
  std::vector<PointId> order;
  for (PointId v = 0; v < static_cast<PointId>(m.size()); ++v)
    if (v != r && b[v] > 0.0) order.push_back(v);
  std::stable_sort(order.begin(), order.end(),
                   [&](PointId a, PointId c) { return m.dist(a, r) < m.dist(c, r); });
  double cost = 0.0;
  for (PointId v : order) {
    const double take = std::min(deficit, b[v]);
    cost += take * m.dist(v, r);
    deficit -= take;
    if (deficit <= 0.0) break;
  }
  return cost;
}

}  // namespace sks
