#include "sks/hst.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sks/error.hpp"
#include "sks/rounding.hpp"

namespace sks {

double Hst::edge_weight(int node) const {
  const int parent = nodes_[static_cast<std::size_t>(node)].parent;
  if (parent < 0) return 0.0;
  return scale_ * std::pow(sigma_, height_ - nodes_[static_cast<std::size_t>(parent)].depth);
}

int Hst::lca(int a, int b) const {
  while (nodes_[static_cast<std::size_t>(a)].depth > nodes_[static_cast<std::size_t>(b)].depth)
    a = nodes_[static_cast<std::size_t>(a)].parent;
  while (nodes_[static_cast<std::size_t>(b)].depth > nodes_[static_cast<std::size_t>(a)].depth)
    b = nodes_[static_cast<std::size_t>(b)].parent;
  while (a != b) {
    a = nodes_[static_cast<std::size_t>(a)].parent;
    b = nodes_[static_cast<std::size_t>(b)].parent;
  }
  return a;
}

double Hst::distance_for_lca_depth(int depth) const {
  double d = 0.0;
  for (int level = 1; level <= height_ - depth; ++level) d += std::pow(sigma_, level);
  return 2.0 * scale_ * d;
}

double Hst::distance(PointId a, PointId b) const {
  if (a == b) return 0.0;
  return distance_for_lca_depth(nodes_[static_cast<std::size_t>(lca(leaf(a), leaf(b)))].depth);
}

Metric Hst::induced_metric() const {
  const std::size_t n = num_points();
  std::vector<double> dist(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      dist[a * n + b] = distance(static_cast<PointId>(a), static_cast<PointId>(b));
  return build_metric_unchecked(MetricKind::kHstInduced, n, std::move(dist));
}

Hst frt_embed(const Metric& m, double sigma, std::uint64_t seed) {
  if (!(sigma > 1.0)) fail(ErrorKind::kDomain, "HST separation sigma must exceed 1");
  const std::size_t n = m.size();
  if (n == 0) fail(ErrorKind::kValidation, "cannot embed an empty metric");
  Hst tree;
  tree.sigma_ = sigma;
  tree.leaf_of_point_.assign(n, 0);
  if (n == 1) {
    tree.height_ = 0;
    tree.nodes_.push_back({-1, 0, {}, 0});
    return tree;
  }

  Rng rng = make_stream(seed, 0);
  const double beta = std::pow(sigma, uniform01(rng));
  std::vector<PointId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng() % (i + 1)]);

  double delta = m.min_positive_distance();
  if (delta <= 0.0) delta = 1.0;
  const double diam = m.diameter();
  int levels = 1;
  while (std::pow(sigma, levels - 1) * delta < diam) ++levels;
  tree.height_ = levels;
  // Scaling edges by the sampled radius factor keeps every pair
  // non-contracted: a pair split below a level-l cluster is at most
  // 2 beta sigma^(l-1) delta apart, exactly the leading tree term.
  tree.scale_ = beta * delta / sigma;

  struct Pending {
    int node;
    std::vector<PointId> cluster;
  };
  tree.nodes_.push_back({-1, 0, {}, -1});
  std::vector<Pending> frontier{{0, std::vector<PointId>(perm.begin(), perm.end())}};
  std::sort(frontier[0].cluster.begin(), frontier[0].cluster.end());

  for (int depth = 0; depth < levels; ++depth) {
    const int level = levels - depth - 1;  // level of the children being created
    std::vector<Pending> next;
    for (Pending& p : frontier) {
      std::vector<std::vector<PointId>> parts;
      if (level == 0) {
        for (PointId v : p.cluster) parts.push_back({v});
      } else {
        const double radius = beta * std::pow(sigma, level - 1) * delta;
        std::vector<bool> taken(p.cluster.size(), false);
        for (PointId centre : perm) {
          std::vector<PointId> part;
          for (std::size_t i = 0; i < p.cluster.size(); ++i) {
            if (!taken[i] && m.dist(centre, p.cluster[i]) <= radius) {
              taken[i] = true;
              part.push_back(p.cluster[i]);
            }
          }
          if (!part.empty()) parts.push_back(std::move(part));
        }
      }
      for (auto& part : parts) {
        const int id = static_cast<int>(tree.nodes_.size());
        HstNode node{p.node, depth + 1, {}, -1};
        if (level == 0) {
          node.point = part.front();
          tree.leaf_of_point_[static_cast<std::size_t>(part.front())] = id;
        }
        tree.nodes_.push_back(node);
        tree.nodes_[static_cast<std::size_t>(p.node)].children.push_back(id);
        next.push_back({id, std::move(part)});
      }
    }
    frontier = std::move(next);
  }
  return tree;
}

void dump_hst(const Hst& tree, std::ostream& out) {
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, indent] = stack.back();
    stack.pop_back();
    const HstNode& node = tree.nodes()[static_cast<std::size_t>(id)];
    out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << "node " << id << " depth "
        << node.depth << " weight " << tree.edge_weight(id);
    if (node.point >= 0) out << " point " << node.point;
    out << '\n';
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
      stack.push_back({*it, indent + 1});
  }
}

namespace {

// Children are appended after their parents, so a reverse sweep is post-order.
template <typename T>
std::vector<T> accumulate_up(const Hst& tree, std::vector<T> value) {
  const auto& nodes = tree.nodes();
  for (std::size_t i = nodes.size(); i-- > 1;)
    value[static_cast<std::size_t>(nodes[i].parent)] += value[i];
  return value;
}

std::vector<std::int64_t> quantized_leaf_mass(const Hst& tree, const FractionalConfiguration& target,
                                              int k) {
  std::vector<std::int64_t> q(tree.nodes().size(), 0);
  std::int64_t total = 0;
  std::size_t heaviest = 0;
  for (std::size_t p = 0; p < target.size(); ++p) {
    const double v = std::max(0.0, target.mass[p]);
    const std::int64_t units = std::llround(v * static_cast<double>(kMassUnit));
    const auto leaf = static_cast<std::size_t>(tree.leaf(static_cast<PointId>(p)));
    q[leaf] = units;
    total += units;
    if (units > q[heaviest]) heaviest = leaf;
  }
  const std::int64_t want = static_cast<std::int64_t>(k) * kMassUnit;
  if (std::llabs(total - want) > kMassUnit / 1000000)
    fail(ErrorKind::kImbalance, "target mass does not match k");
  q[heaviest] += want - total;
  return q;
}

// Picks `need` items with inclusion probability proportional to weight
// (capped at one) by systematic sampling.
std::vector<std::size_t> systematic_select(const std::vector<double>& weight, std::size_t need, Rng& rng) {
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> rest(weight.size());
  std::iota(rest.begin(), rest.end(), 0);
  while (need > 0 && !rest.empty()) {
    if (need >= rest.size()) {
      chosen.insert(chosen.end(), rest.begin(), rest.end());
      return chosen;
    }
    double total = 0.0;
    for (std::size_t i : rest) total += weight[i];
    std::vector<std::size_t> sure, open;
    for (std::size_t i : rest) {
      if (total <= 0.0 || static_cast<double>(need) * weight[i] >= total)
        sure.push_back(i);
      else
        open.push_back(i);
    }
    if (total <= 0.0) {
      sure.resize(need);
      chosen.insert(chosen.end(), sure.begin(), sure.end());
      return chosen;
    }
    if (!sure.empty()) {
      const std::size_t take = std::min(need, sure.size());
      chosen.insert(chosen.end(), sure.begin(), sure.begin() + static_cast<long>(take));
      need -= take;
      rest = std::move(open);
      continue;
    }
    const double u = uniform01(rng);
    double cum = 0.0;
    std::vector<std::size_t> picked;
    for (std::size_t i : rest) {
      const double lo = cum;
      cum += static_cast<double>(need) * weight[i] / total;
      // select when some u + j (j integer) falls in [lo, cum)
      if (std::floor(cum - u) > std::floor(lo - u)) picked.push_back(i);
    }
    if (picked.size() > need) picked.resize(need);
    for (std::size_t i : rest) {
      if (picked.size() >= need) break;
      if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
    }
    chosen.insert(chosen.end(), picked.begin(), picked.end());
    return chosen;
  }
  return chosen;
}

}  // namespace

std::vector<double> subtree_mass(const Hst& tree, const FractionalConfiguration& target) {
  std::vector<double> mass(tree.nodes().size(), 0.0);
  for (std::size_t p = 0; p < target.size(); ++p)
    mass[static_cast<std::size_t>(tree.leaf(static_cast<PointId>(p)))] = target.mass[p];
  return accumulate_up(tree, std::move(mass));
}

std::vector<int> subtree_count(const Hst& tree, const Configuration& config) {
  std::vector<int> count(tree.nodes().size(), 0);
  for (PointId p : config.positions()) ++count[static_cast<std::size_t>(tree.leaf(p))];
  return accumulate_up(tree, std::move(count));
}

Configuration hst_round_step(const Hst& tree, const std::optional<Configuration>& prev,
                             const FractionalConfiguration& target, Rng& rng) {
  if (target.size() != tree.num_points())
    fail(ErrorKind::kValidation, "target does not cover the tree's leaves");
  const int k = static_cast<int>(std::llround(target.total()));
  const auto mass = accumulate_up(tree, quantized_leaf_mass(tree, target, k));
  std::vector<int> prev_count(tree.nodes().size(), 0);
  if (prev) {
    if (prev->k() != static_cast<std::size_t>(k))
      fail(ErrorKind::kSizeMismatch, "previous configuration does not hold k servers");
    prev_count = subtree_count(tree, *prev);
  }

  const auto& nodes = tree.nodes();
  std::vector<int> count(nodes.size(), 0);
  count[0] = k;
  std::vector<PointId> positions;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const HstNode& node = nodes[id];
    if (node.children.empty()) {
      for (int c = 0; c < count[id]; ++c) positions.push_back(node.point);
      continue;
    }
    int assigned = 0;
    std::vector<std::size_t> sticky, other;
    for (int child : node.children) {
      const auto c = static_cast<std::size_t>(child);
      count[c] = static_cast<int>(mass[c] / kMassUnit);
      assigned += count[c];
      if (mass[c] % kMassUnit == 0) continue;
      (prev_count[c] > count[c] ? sticky : other).push_back(c);
    }
    const int extra = count[id] - assigned;
    if (extra < 0 || static_cast<std::size_t>(extra) > sticky.size() + other.size())
      fail(ErrorKind::kInfeasible, "subtree counts cannot be rounded consistently");
    auto weights = [&](const std::vector<std::size_t>& set) {
      std::vector<double> w;
      for (std::size_t c : set) w.push_back(static_cast<double>(mass[c] % kMassUnit));
      return w;
    };
    std::vector<std::size_t> up;
    if (static_cast<std::size_t>(extra) <= sticky.size()) {
      for (std::size_t i : systematic_select(weights(sticky), static_cast<std::size_t>(extra), rng))
        up.push_back(sticky[i]);
    } else {
      up = sticky;
      for (std::size_t i : systematic_select(weights(other), static_cast<std::size_t>(extra) - sticky.size(), rng))
        up.push_back(other[i]);
    }
    for (std::size_t c : up) ++count[c];
  }
  return Configuration(std::move(positions));
}

Configuration hst_round_step(const Hst& tree, const std::optional<Configuration>& prev,
                             const FractionalConfiguration& target, std::uint64_t seed) {
  Rng rng = make_stream(seed, 1);
  return hst_round_step(tree, prev, target, rng);
}

IntegralPlan round_plan_general(const Metric& m, const FractionalPlan& plan, double sigma,
                                std::uint64_t seed) {
  const Hst tree = frt_embed(m, sigma, seed);
  Rng rng = make_stream(seed, 1);
  IntegralPlan out;
  std::optional<Configuration> prev;
  for (const auto& a : plan.configs) {
    prev = hst_round_step(tree, prev, a, rng);
    out.configs.push_back(*prev);
  }
  return out;
}

}  // namespace sks
