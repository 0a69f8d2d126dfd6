#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sks {

using PointId = int;

enum class MetricKind { kLine, kCircle, kGeneral, kHstInduced };

std::string to_string(MetricKind kind);

/// Absolute slack allowed on the triangle inequality.
inline constexpr double kTriangleSlack = 1e-9;
/// Default absolute tolerance for equality of distances and masses.
inline constexpr double kTol = 1e-9;

/// Finite metric space. Line metrics keep their coordinates sorted ascending
/// so that point order equals coordinate order; circle metrics keep arc
/// positions in [0, circumference), also sorted.
class Metric {
 public:
  std::size_t size() const { return n_; }
  MetricKind kind() const { return kind_; }
  double dist(PointId x, PointId y) const { return dist_[index(x, y)]; }
  const std::vector<double>& coords() const { return coords_; }
  double circumference() const { return circumference_; }
  bool valid_point(PointId x) const { return x >= 0 && static_cast<std::size_t>(x) < n_; }
  double diameter() const;
  /// Smallest positive distance between two points; 0 for a single point.
  double min_positive_distance() const;
  bool ordered() const { return kind_ == MetricKind::kLine || kind_ == MetricKind::kCircle; }

  friend Metric build_line_metric(std::span<const double> coords);
  friend Metric build_circle_metric(std::span<const double> coords, double circumference);
  friend Metric build_general_metric(const std::vector<std::vector<double>>& dist);
  friend Metric build_metric_unchecked(MetricKind kind, std::size_t n, std::vector<double> dist);

 private:
  std::size_t index(PointId x, PointId y) const {
    return static_cast<std::size_t>(x) * n_ + static_cast<std::size_t>(y);
  }

  std::size_t n_ = 0;
  MetricKind kind_ = MetricKind::kGeneral;
  std::vector<double> dist_;
  std::vector<double> coords_;
  double circumference_ = 0.0;
};

/// Points on the real line; `coords` must be strictly ascending.
Metric build_line_metric(std::span<const double> coords);
/// Points on a circle of the given circumference; arc-length distance.
Metric build_circle_metric(std::span<const double> coords, double circumference);
/// Arbitrary finite metric; validates zero diagonal, symmetry and the
/// triangle inequality, naming the first violating triple on failure.
Metric build_general_metric(const std::vector<std::vector<double>>& dist);
/// Internal: wraps a distance matrix (row-major) without validation.
Metric build_metric_unchecked(MetricKind kind, std::size_t n, std::vector<double> dist);

/// Multiset of k server positions, kept sorted.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<PointId> positions);
  Configuration(std::initializer_list<PointId> positions)
      : Configuration(std::vector<PointId>(positions)) {}

  std::size_t k() const { return positions_.size(); }
  const std::vector<PointId>& positions() const { return positions_; }
  bool contains(PointId p) const;
  /// Server count per point for an n-point metric.
  std::vector<int> counts(std::size_t n) const;

  auto operator<=>(const Configuration&) const = default;

 private:
  std::vector<PointId> positions_;
};

/// Nonnegative server mass per point.
struct FractionalConfiguration {
  std::vector<double> mass;

  double total() const;
  std::size_t size() const { return mass.size(); }
  double operator[](PointId p) const { return mass[static_cast<std::size_t>(p)]; }
  /// Unit mass per server of an integral configuration.
  static FractionalConfiguration lift(const Configuration& c, std::size_t n);
};

void validate(const Metric& m, const Configuration& c);
void validate(const Metric& m, const FractionalConfiguration& c, double k);

/// Min-cost perfect matching between two configurations of equal size.
double config_distance(const Metric& m, const Configuration& x, const Configuration& y);
/// Optimal transport cost between two mass vectors of equal total.
double fractional_distance(const Metric& m, const FractionalConfiguration& x,
                           const FractionalConfiguration& y);
/// Distance from the closest server of `b` to `r`.
double serve_distance(const Metric& m, const Configuration& b, PointId r);
/// Cheapest transport that raises the mass at `r` to one.
double fractional_serve_distance(const Metric& m, const FractionalConfiguration& b, PointId r);

}  // namespace sks
