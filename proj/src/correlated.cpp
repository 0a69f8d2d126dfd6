#include "sks/correlated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sks/error.hpp"
#include "sks/hst.hpp"

namespace sks {

ScenarioSet make_scenario_set(const Metric& m, std::vector<std::vector<PointId>> sequences,
                              std::vector<double> probs) {
  if (sequences.empty()) fail(ErrorKind::kValidation, "scenario set is empty");
  if (sequences.size() != probs.size())
    fail(ErrorKind::kSizeMismatch, "scenario and probability counts differ");
  const std::size_t t = sequences.front().size();
  double sum = 0.0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (sequences[i].empty()) fail(ErrorKind::kValidation, "scenario " + std::to_string(i) + " is empty");
    if (sequences[i].size() != t)
      fail(ErrorKind::kValidation, "scenario " + std::to_string(i) + " has length " +
                                       std::to_string(sequences[i].size()) + ", expected " + std::to_string(t));
    for (PointId p : sequences[i])
      if (!m.valid_point(p)) fail(ErrorKind::kValidation, "scenario " + std::to_string(i) + " requests an unknown point");
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
      fail(ErrorKind::kValidation, "scenario " + std::to_string(i) + " has an invalid probability");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorKind::kValidation, "scenario probabilities sum to " + std::to_string(sum));

  ScenarioSet out;
  std::map<std::vector<PointId>, std::size_t> seen;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    if (probs[i] == 0.0) continue;
    const auto [it, fresh] = seen.emplace(sequences[i], out.sequences.size());
    if (fresh) {
      out.sequences.push_back(std::move(sequences[i]));
      out.probs.push_back(probs[i]);
    } else {
      out.probs[it->second] += probs[i];
    }
  }
  return out;
}

std::vector<int> ScenarioTrie::path(std::size_t scenario) const { return locate(scenarios.sequences.at(scenario)); }

std::vector<int> ScenarioTrie::locate(const std::vector<PointId>& requests) const {
  if (requests.size() != scenarios.t())
    fail(ErrorKind::kUnknownScenario, "realized sequence has length " + std::to_string(requests.size()) +
                                          ", scenarios have length " + std::to_string(scenarios.t()));
  std::vector<int> out;
  int cur = root();
  for (std::size_t i = 0; i < requests.size(); ++i) {
    int found = -1;
    for (int c : nodes[static_cast<std::size_t>(cur)].children)
      if (nodes[static_cast<std::size_t>(c)].point == requests[i]) found = c;
    if (found < 0)
      fail(ErrorKind::kUnknownScenario, "request " + std::to_string(requests[i]) + " at step " +
                                            std::to_string(i + 1) + " leaves every scenario");
    out.push_back(found);
    cur = found;
  }
  return out;
}

std::vector<int> ScenarioTrie::ancestors(int v) const {
  std::vector<int> out;
  for (int u = nodes[static_cast<std::size_t>(v)].parent; u >= 0; u = nodes[static_cast<std::size_t>(u)].parent)
    out.push_back(u);
  return out;
}

ScenarioTrie build_trie(const ScenarioSet& s, int k, const Configuration& initial) {
  if (s.size() == 0) fail(ErrorKind::kValidation, "scenario set is empty");
  if (k < 1) fail(ErrorKind::kValidation, "k must be at least 1");
  if (initial.k() != static_cast<std::size_t>(k))
    fail(ErrorKind::kSizeMismatch, "initial configuration does not hold k servers");
  ScenarioTrie trie;
  trie.k = k;
  trie.scenarios = s;
  std::vector<std::size_t> all(s.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  for (int j = 0; j < k; ++j) {
    TrieNode node;
    node.parent = j - 1;
    node.depth = j - (k - 1);
    node.point = initial.positions()[static_cast<std::size_t>(j)];
    node.initial = true;
    node.scenarios = all;
    if (j > 0) trie.nodes[static_cast<std::size_t>(j - 1)].children.push_back(j);
    trie.nodes.push_back(std::move(node));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    int cur = trie.root();
    for (PointId p : s.sequences[i]) {
      int found = -1;
      for (int c : trie.nodes[static_cast<std::size_t>(cur)].children)
        if (trie.nodes[static_cast<std::size_t>(c)].point == p) found = c;
      if (found < 0) {
        found = static_cast<int>(trie.nodes.size());
        TrieNode node;
        node.parent = cur;
        node.depth = trie.nodes[static_cast<std::size_t>(cur)].depth + 1;
        node.point = p;
        node.prob = 0.0;
        trie.nodes[static_cast<std::size_t>(cur)].children.push_back(found);
        trie.nodes.push_back(std::move(node));
      }
      TrieNode& node = trie.nodes[static_cast<std::size_t>(found)];
      node.prob += s.probs[i];
      node.scenarios.push_back(i);
      cur = found;
    }
  }
  return trie;
}

CorrelatedLp build_correlated_lp(const ScenarioTrie& trie, const Metric& m) {
  CorrelatedLp out;
  std::map<std::pair<int, int>, int> var;
  for (std::size_t v = 0; v < trie.nodes.size(); ++v) {
    const TrieNode& node = trie.nodes[v];
    if (node.initial) continue;
    std::vector<Term> serve;
    for (int u : trie.ancestors(static_cast<int>(v))) {
      const double cost = node.prob * m.dist(trie.nodes[static_cast<std::size_t>(u)].point, node.point);
      const int id = out.lp.add_variable("x[" + std::to_string(u) + "," + std::to_string(v) + "]", cost, 0.0, 1.0);
      var[{u, static_cast<int>(v)}] = id;
      out.links.emplace_back(u, static_cast<int>(v));
      serve.push_back({id, 1.0});
    }
    out.lp.add_constraint(std::move(serve), Relation::kEqual, 1.0, "serve[" + std::to_string(v) + "]");
  }
  for (std::size_t u = 0; u < trie.nodes.size(); ++u) {
    for (std::size_t i : trie.nodes[u].scenarios) {
      std::vector<Term> row;
      for (int v : trie.path(i)) {
        const auto it = var.find({static_cast<int>(u), v});
        if (it != var.end()) row.push_back({it->second, 1.0});
      }
      if (row.empty()) continue;
      out.lp.add_constraint(std::move(row), Relation::kLessEqual, 1.0,
                            "path[" + std::to_string(u) + "," + std::to_string(i) + "]");
    }
  }
  return out;
}

std::vector<FractionalConfiguration> correlated_path_configs(const ScenarioTrie& trie, const Metric& m,
                                                             const CorrelatedLp& program,
                                                             const LpSolution& sol,
                                                             const std::vector<PointId>& requests) {
  if (sol.values.size() != program.links.size())
    fail(ErrorKind::kSizeMismatch, "solution does not match the correlated program");
  const std::vector<int> path = trie.locate(requests);
  std::map<std::pair<int, int>, double> x;
  for (std::size_t j = 0; j < program.links.size(); ++j) x[program.links[j]] = sol.values[j];

  std::vector<double> node_mass(trie.nodes.size(), 0.0);
  for (int j = 0; j < trie.k; ++j) node_mass[static_cast<std::size_t>(j)] = 1.0;
  std::vector<int> live;
  for (int j = 0; j < trie.k; ++j) live.push_back(j);

  const auto snapshot = [&] {
    FractionalConfiguration c;
    c.mass.assign(m.size(), 0.0);
    double total = 0.0;
    for (int u : live) {
      double w = node_mass[static_cast<std::size_t>(u)];
      if (w < -1e-7) fail(ErrorKind::kExtraction, "link mass out of node " + std::to_string(u) + " exceeds one");
      w = std::max(w, 0.0);
      c.mass[static_cast<std::size_t>(trie.nodes[static_cast<std::size_t>(u)].point)] += w;
      total += w;
    }
    if (std::abs(total - trie.k) > 1e-6) fail(ErrorKind::kExtraction, "path mass drifted from k");
    for (double& w : c.mass) w *= trie.k / total;
    return c;
  };

  std::vector<FractionalConfiguration> out{snapshot()};
  for (int v : path) {
    for (int u : live) {
      const auto it = x.find({u, v});
      if (it != x.end()) node_mass[static_cast<std::size_t>(u)] -= it->second;
    }
    node_mass[static_cast<std::size_t>(v)] = 1.0;
    live.push_back(v);
    out.push_back(snapshot());
  }
  return out;
}

namespace {

double rounded_path_cost(const Metric& m, const std::vector<FractionalConfiguration>& configs, int k,
                         RoundingOffset offset) {
  double cost = 0.0;
  Configuration prev = round_line(m, configs.front(), offset, k);
  for (std::size_t i = 1; i < configs.size(); ++i) {
    Configuration cur = round_line(m, configs[i], offset, k);
    cost += config_distance(m, prev, cur);
    prev = std::move(cur);
  }
  return cost;
}

}  // namespace

double execute_correlated(const ScenarioTrie& trie, const Metric& m, const CorrelatedLp& program,
                          const LpSolution& sol, const std::vector<PointId>& requests,
                          RoundingOffset offset, std::uint64_t seed, double sigma) {
  const auto configs = correlated_path_configs(trie, m, program, sol, requests);
  if (m.ordered()) return rounded_path_cost(m, configs, trie.k, offset);
  FractionalPlan plan;
  plan.k = trie.k;
  plan.configs = configs;
  const IntegralPlan rounded = round_plan_general(m, plan, sigma, seed);
  double cost = 0.0;
  for (std::size_t i = 1; i < rounded.configs.size(); ++i)
    cost += config_distance(m, rounded.configs[i - 1], rounded.configs[i]);
  return cost;
}

double expected_correlated_cost(const ScenarioTrie& trie, const Metric& m, const CorrelatedLp& program,
                                const LpSolution& sol) {
  if (!m.ordered()) fail(ErrorKind::kDomain, "exact expectation needs a line or circle metric");
  double total = 0.0;
  for (std::size_t i = 0; i < trie.scenarios.size(); ++i) {
    const auto configs = correlated_path_configs(trie, m, program, sol, trie.scenarios.sequences[i]);
    double avg = 0.0;
    for (const OffsetPiece& piece : offset_partition(configs, trie.k))
      avg += piece.weight * rounded_path_cost(m, configs, trie.k, piece.offset);
    total += trie.scenarios.probs[i] * avg;
  }
  return total;
}

CorrelatedRounding derandomize_correlated(const ScenarioTrie& trie, const Metric& m,
                                          const CorrelatedLp& program, const LpSolution& sol) {
  if (!m.ordered()) fail(ErrorKind::kDomain, "offset derandomization needs a line or circle metric");
  std::vector<std::vector<FractionalConfiguration>> per;
  std::vector<FractionalConfiguration> all;
  for (const auto& seq : trie.scenarios.sequences) {
    per.push_back(correlated_path_configs(trie, m, program, sol, seq));
    all.insert(all.end(), per.back().begin(), per.back().end());
  }
  CorrelatedRounding best;
  best.expected_cost = std::numeric_limits<double>::infinity();
  for (const OffsetPiece& piece : offset_partition(all, trie.k)) {
    double c = 0.0;
    for (std::size_t i = 0; i < per.size(); ++i)
      c += trie.scenarios.probs[i] * rounded_path_cost(m, per[i], trie.k, piece.offset);
    if (c < best.expected_cost) {
      best.expected_cost = c;
      best.offset = piece.offset;
    }
  }
  return best;
}

double best_online_bruteforce_correlated(const ScenarioTrie& trie, const Metric& m,
                                         const OracleOptions& options) {
  const std::size_t states = count_configurations(m.size(), trie.k);
  const unsigned __int128 work = static_cast<unsigned __int128>(trie.nodes.size()) * states * states;
  if (work > options.budget)
    fail(ErrorKind::kResource, "correlated enumeration exceeds the state-transition budget");
  const ConfigSpace space(m.size(), trie.k);
  const std::size_t S = space.size();
  const auto dist = config_distance_table(m, space, options.policy);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> value(trie.nodes.size());
  for (std::size_t v = trie.nodes.size(); v-- > static_cast<std::size_t>(trie.root());) {
    const TrieNode& node = trie.nodes[v];
    std::vector<double>& out = value[v];
    out.assign(S, 0.0);
    for (int c : node.children) {
      const TrieNode& child = trie.nodes[static_cast<std::size_t>(c)];
      const double w = child.prob / node.prob;
      const auto& later = value[static_cast<std::size_t>(c)];
      for (std::size_t a = 0; a < S; ++a) {
        double best = kInf;
        for (std::size_t b = 0; b < S; ++b)
          if (space.at(b).contains(child.point)) best = std::min(best, dist[a * S + b] + later[b]);
        out[a] += w * best;
      }
    }
  }
  std::vector<PointId> start;
  for (int j = 0; j < trie.k; ++j) start.push_back(trie.nodes[static_cast<std::size_t>(j)].point);
  return value[static_cast<std::size_t>(trie.root())][space.index(Configuration(std::move(start)))];
}

}  // namespace sks
