#pragma once

#include <cstdint>
#include <vector>

#include "sks/lp.hpp"
#include "sks/metric.hpp"
#include "sks/oracles.hpp"
#include "sks/planner.hpp"
#include "sks/rounding.hpp"

namespace sks {

/// Finitely many request sequences of a common length with probabilities.
struct ScenarioSet {
  std::vector<std::vector<PointId>> sequences;
  std::vector<double> probs;

  std::size_t size() const { return sequences.size(); }
  std::size_t t() const { return sequences.empty() ? 0 : sequences.front().size(); }
};

/// Validates lengths, points and probabilities (sum within 1e-9) and merges
/// repeated sequences by summing their probabilities. Zero-probability
/// scenarios are dropped.
ScenarioSet make_scenario_set(const Metric& m, std::vector<std::vector<PointId>> sequences,
                              std::vector<double> probs);

struct TrieNode {
  int parent = -1;
  int depth = 0;  // initial chain: 1-k .. 0, requests: 1 .. t
  PointId point = 0;
  double prob = 1.0;
  bool initial = false;
  std::vector<int> children;
  std::vector<std::size_t> scenarios;  // scenario indices below this node
};

/// Prefix tree of the scenarios under a chain of k initial nodes, one per
/// initial server. Nodes 0..k-1 form the chain; node k-1 is the root whose
/// children are the first requests.
struct ScenarioTrie {
  int k = 0;
  ScenarioSet scenarios;
  std::vector<TrieNode> nodes;

  int root() const { return k - 1; }
  /// Node ids along scenario i, excluding the initial chain.
  std::vector<int> path(std::size_t scenario) const;
  /// Node ids along a realized sequence; throws kUnknownScenario off the trie.
  std::vector<int> locate(const std::vector<PointId>& requests) const;
  /// Proper ancestors of v, nearest first, including the initial chain.
  std::vector<int> ancestors(int v) const;
};

ScenarioTrie build_trie(const ScenarioSet& s, int k, const Configuration& initial);

/// The link program: x[u,v] for every request node v and proper ancestor u,
/// cost Pr(v) d(u,v), one serving equality per request node and one path
/// row per (node, scenario below it).
struct CorrelatedLp {
  LinearProgram lp;
  std::vector<std::pair<int, int>> links;  // variable -> (u, v)
};

CorrelatedLp build_correlated_lp(const ScenarioTrie& trie, const Metric& m);

/// Fractional configurations B_0..B_t along a realized path: every node u on
/// the path holds mass 1 - sum of links out of u already used.
std::vector<FractionalConfiguration> correlated_path_configs(const ScenarioTrie& trie, const Metric& m,
                                                             const CorrelatedLp& program,
                                                             const LpSolution& sol,
                                                             const std::vector<PointId>& requests);

/// Movement cost of the online algorithm on `requests`. Ordered metrics use
/// shared-offset line rounding; other metrics use HST rounding with `seed`.
double execute_correlated(const ScenarioTrie& trie, const Metric& m, const CorrelatedLp& program,
                          const LpSolution& sol, const std::vector<PointId>& requests,
                          RoundingOffset offset, std::uint64_t seed = 0, double sigma = 6.0);

/// Exact expectation over scenarios and uniformly random offset (ordered
/// metrics only).
double expected_correlated_cost(const ScenarioTrie& trie, const Metric& m, const CorrelatedLp& program,
                                const LpSolution& sol);

struct CorrelatedRounding {
  RoundingOffset offset;
  double expected_cost = 0.0;
};

/// Best single offset over the breakpoint partition of all scenario paths.
CorrelatedRounding derandomize_correlated(const ScenarioTrie& trie, const Metric& m,
                                          const CorrelatedLp& program, const LpSolution& sol);

/// Minimum expected movement over all deterministic online algorithms, by
/// backward induction over (trie node, configuration).
double best_online_bruteforce_correlated(const ScenarioTrie& trie, const Metric& m,
                                         const OracleOptions& options = {});

}  // namespace sks
