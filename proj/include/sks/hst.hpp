#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sks/metric.hpp"
#include "sks/planner.hpp"
#include "sks/rng.hpp"

namespace sks {

struct HstNode {
  int parent = -1;
  int depth = 0;
  std::vector<int> children;
  PointId point = -1;  // leaves only
};

/// Rooted sigma-HST with all leaves at depth `height`. The edge from a node
/// at depth d to each child weighs scale * sigma^(height - d). For FRT trees
/// `scale` is beta * delta / sigma, with delta the smallest positive distance
/// and beta the sampled radius factor in [1, sigma).
class Hst {
 public:
  double sigma() const { return sigma_; }
  int height() const { return height_; }
  double scale() const { return scale_; }
  const std::vector<HstNode>& nodes() const { return nodes_; }
  std::size_t num_points() const { return leaf_of_point_.size(); }
  int leaf(PointId p) const { return leaf_of_point_[static_cast<std::size_t>(p)]; }

  /// Weight of the edge between `node` and its parent.
  double edge_weight(int node) const;
  int lca(int a, int b) const;
  /// Tree distance between two metric points; depends only on LCA depth.
  double distance(PointId a, PointId b) const;
  double distance_for_lca_depth(int depth) const;
  Metric induced_metric() const;

  friend Hst frt_embed(const Metric& m, double sigma, std::uint64_t seed);

 private:
  double sigma_ = 6.0;
  int height_ = 0;
  double scale_ = 1.0;
  std::vector<HstNode> nodes_;
  std::vector<int> leaf_of_point_;
};

/// Random hierarchical decomposition (random permutation of centres, random
/// log-uniform radius factor beta in [1, sigma)) with radii shrinking by a
/// factor sigma per level. Every sample is non-contracting.
Hst frt_embed(const Metric& m, double sigma, std::uint64_t seed);

/// Indented text dump: node id, depth, edge weight, leaf point.
void dump_hst(const Hst& tree, std::ostream& out);

/// Fractional mass inside every subtree, indexed by node.
std::vector<double> subtree_mass(const Hst& tree, const FractionalConfiguration& target);
/// Server count inside every subtree, indexed by node.
std::vector<int> subtree_count(const Hst& tree, const Configuration& config);

/// One step of top-down dependent rounding: every subtree receives the floor
/// or ceiling of its fractional mass, children whose current count already
/// meets the ceiling keep it first, and the rest are chosen by systematic
/// sampling weighted by fractional parts.
Configuration hst_round_step(const Hst& tree, const std::optional<Configuration>& prev,
                             const FractionalConfiguration& target, Rng& rng);
Configuration hst_round_step(const Hst& tree, const std::optional<Configuration>& prev,
                             const FractionalConfiguration& target, std::uint64_t seed);

/// Embeds with frt_embed(seed) and rounds B_0..B_t sequentially on one
/// random stream derived from the same seed.
IntegralPlan round_plan_general(const Metric& m, const FractionalPlan& plan, double sigma,
                                std::uint64_t seed);

}  // namespace sks
