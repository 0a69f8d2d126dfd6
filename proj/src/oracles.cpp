#include "sks/oracles.hpp"

#include <algorithm>
#include <limits>

#include "sks/error.hpp"

namespace sks {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t binomial(std::size_t n, std::size_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc > std::numeric_limits<std::size_t>::max()) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(acc);
}

std::uint64_t saturating_work(std::size_t layers, std::size_t states) {
  const unsigned __int128 w = static_cast<unsigned __int128>(std::max<std::size_t>(layers, 1)) * states * states;
  if (w > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(w);
}

void check_budget(std::size_t n, int k, std::size_t layers, std::uint64_t budget, const char* what) {
  if (k < 1) fail(ErrorKind::kValidation, "k must be at least 1");
  if (n == 0) fail(ErrorKind::kValidation, "metric has no points");
  const std::size_t states = count_configurations(n, k);
  const std::uint64_t work = saturating_work(layers, states);
  if (work > budget)
    fail(ErrorKind::kResource, std::string(what) + " needs " + std::to_string(work) +
                                   " state transitions, budget is " + std::to_string(budget));
}

std::size_t support_index(const std::vector<Outcome>& step, PointId r) {
  const auto it = std::lower_bound(step.begin(), step.end(), r,
                                   [](const Outcome& o, PointId p) { return o.point < p; });
  if (it == step.end() || it->point != r)
    fail(ErrorKind::kValidation, "request " + std::to_string(r) + " is outside the step's support");
  return static_cast<std::size_t>(it - step.begin());
}

// Cost of ending a step in each state given request r, excluding movement.
std::vector<double> service_row(const Metric& m, const ConfigSpace& space, CostMode mode, PointId r) {
  std::vector<double> w(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) {
    const Configuration& c = space.at(s);
    if (mode == CostMode::kCover)
      w[s] = c.contains(r) ? 0.0 : kInf;
    else
      w[s] = 2.0 * serve_distance(m, c, r);
  }
  return w;
}

struct LayeredPath {
  double value = 0.0;
  std::vector<std::size_t> states;  // one per layer 0..L
};

// Forward shortest path over L+1 copies of the state space. Layer 0 costs
// `start`; entering layer i in state b costs D[a][b] + service[i-1][b].
LayeredPath layered_shortest_path(const std::vector<double>& dist, std::size_t S,
                                  const std::vector<double>& start,
                                  const std::vector<std::vector<double>>& service, ExecPolicy policy) {
  const std::size_t L = service.size();
  std::vector<std::vector<std::uint32_t>> back(L, std::vector<std::uint32_t>(S, 0));
  std::vector<double> cur = start, nxt(S);
  for (std::size_t i = 0; i < L; ++i) {
    const auto& w = service[i];
    auto& bp = back[i];
    const auto body = [&](std::size_t b) {
      double best = kInf;
      std::uint32_t arg = 0;
      if (w[b] < kInf) {
        for (std::size_t a = 0; a < S; ++a) {
          const double v = cur[a] + dist[a * S + b];
          if (v < best) {
            best = v;
            arg = static_cast<std::uint32_t>(a);
          }
        }
      }
      nxt[b] = best + w[b];
      bp[b] = arg;
    };
    if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
      for (std::size_t b = 0; b < S; ++b) body(b);
    } else {
      for (std::size_t b = 0; b < S; ++b) body(b);
    }
    std::swap(cur, nxt);
  }
  LayeredPath out;
  std::size_t arg = 0;
  for (std::size_t s = 1; s < S; ++s)
    if (cur[s] < cur[arg]) arg = s;
  out.value = cur[arg];
  if (!(out.value < kInf)) fail(ErrorKind::kInfeasible, "no feasible configuration sequence");
  out.states.assign(L + 1, 0);
  out.states[L] = arg;
  for (std::size_t i = L; i-- > 0;) out.states[i] = back[i][out.states[i + 1]];
  return out;
}

std::vector<double> start_weights(const ConfigSpace& space, const std::optional<Configuration>& fixed) {
  if (!fixed) return std::vector<double>(space.size(), 0.0);
  if (fixed->k() != static_cast<std::size_t>(space.k()))
    fail(ErrorKind::kSizeMismatch, "fixed start does not hold k servers");
  std::vector<double> w(space.size(), kInf);
  w[space.index(*fixed)] = 0.0;
  return w;
}

}  // namespace

std::size_t count_configurations(std::size_t n, int k) {
  if (n == 0 || k < 0) return 0;
  return binomial(n + static_cast<std::size_t>(k) - 1, static_cast<std::size_t>(k));
}

ConfigSpace::ConfigSpace(std::size_t n, int k) : n_(n), k_(k) {
  if (k < 1 || n == 0) fail(ErrorKind::kValidation, "configuration space needs n >= 1 and k >= 1");
  const std::size_t universe = n + static_cast<std::size_t>(k) - 1;
  const std::size_t total = count_configurations(n, k);
  configs_.reserve(total);
  std::vector<std::size_t> c(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = i;
  while (true) {
    std::vector<PointId> pos(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) pos[i] = static_cast<PointId>(c[i] - i);
    configs_.emplace_back(std::move(pos));
    std::size_t i = 0;
    while (i < c.size() && c[i] + 1 == (i + 1 < c.size() ? c[i + 1] : universe)) ++i;
    if (i == c.size()) break;
    ++c[i];
    for (std::size_t j = 0; j < i; ++j) c[j] = j;
  }
}

std::size_t ConfigSpace::index(const Configuration& c) const {
  if (c.k() != static_cast<std::size_t>(k_))
    fail(ErrorKind::kSizeMismatch, "configuration does not hold k servers");
  std::size_t rank = 0;
  for (std::size_t i = 0; i < c.k(); ++i) {
    const PointId p = c.positions()[i];
    if (p < 0 || static_cast<std::size_t>(p) >= n_) fail(ErrorKind::kValidation, "configuration point out of range");
    rank += binomial(static_cast<std::size_t>(p) + i, i + 1);
  }
  return rank;
}

std::string to_string(CostMode mode) { return mode == CostMode::kCover ? "cover" : "serve-return"; }

CostMode parse_cost_mode(const std::string& text) {
  if (text == "cover") return CostMode::kCover;
  if (text == "serve-return") return CostMode::kServeReturn;
  fail(ErrorKind::kValidation, "unknown cost mode '" + text + "'");
}

std::vector<double> config_distance_table(const Metric& m, const ConfigSpace& space, ExecPolicy policy) {
  const std::size_t S = space.size();
  std::vector<double> dist(S * S, 0.0);
  const auto row = [&](std::size_t a) {
    for (std::size_t b = a + 1; b < S; ++b) {
      const double v = config_distance(m, space.at(a), space.at(b));
      dist[a * S + b] = v;
      dist[b * S + a] = v;
    }
  };
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t a = 0; a < S; ++a) row(a);
  } else {
    for (std::size_t a = 0; a < S; ++a) row(a);
  }
  return dist;
}

double step_cost(const Metric& m, CostMode mode, const Configuration& from, const Configuration& to,
                 PointId r) {
  const double move = config_distance(m, from, to);
  if (mode == CostMode::kCover) {
    if (!to.contains(r)) fail(ErrorKind::kValidation, "configuration does not cover the request");
    return move;
  }
  return move + 2.0 * serve_distance(m, to, r);
}

const Configuration& PolicyTable::respond(std::size_t step, const Configuration& current, PointId r) const {
  if (step < 1 || step > t()) fail(ErrorKind::kValidation, "step outside the horizon");
  const std::size_t j = support_index(dists.steps[step - 1], r);
  return space.at(next[step - 1][space.index(current)][j]);
}

PolicyTable optimal_online_dp(const Metric& m, const DistributionSequence& d, int k, CostMode mode,
                              const OracleOptions& options) {
  validate(m, d);
  check_budget(m.size(), k, d.t(), options.budget, "online dynamic program");
  PolicyTable table{ConfigSpace(m.size(), k), mode, d, {}, {}, 0, 0.0};
  const ConfigSpace& space = table.space;
  const std::size_t S = space.size();
  const std::size_t t = d.t();
  const std::vector<double> dist = config_distance_table(m, space, options.policy);

  table.cost_to_go.assign(t + 1, std::vector<double>(S, 0.0));
  table.next.assign(t, {});
  for (std::size_t i = t; i-- > 0;) {
    const auto& support = d.steps[i];
    const auto& later = table.cost_to_go[i + 1];
    std::vector<std::vector<double>> w;
    w.reserve(support.size());
    for (const Outcome& o : support) {
      auto row = service_row(m, space, mode, o.point);
      for (std::size_t b = 0; b < S; ++b) row[b] += later[b];
      w.push_back(std::move(row));
    }
    auto& value = table.cost_to_go[i];
    auto& choice = table.next[i];
    choice.assign(S, std::vector<std::uint32_t>(support.size(), 0));
    const auto body = [&](std::size_t a) {
      double expected = 0.0;
      for (std::size_t j = 0; j < support.size(); ++j) {
        double best = kInf;
        std::uint32_t arg = 0;
        const double* drow = dist.data() + a * S;
        for (std::size_t b = 0; b < S; ++b) {
          const double v = drow[b] + w[j][b];
          if (v < best) {
            best = v;
            arg = static_cast<std::uint32_t>(b);
          }
        }
        choice[a][j] = arg;
        expected += support[j].prob * best;
      }
      value[a] = expected;
    };
    if (options.policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
      for (std::size_t a = 0; a < S; ++a) body(a);
    } else {
      for (std::size_t a = 0; a < S; ++a) body(a);
    }
  }

  const auto& root = table.cost_to_go[0];
  if (options.fixed_start) {
    if (options.fixed_start->k() != static_cast<std::size_t>(k))
      fail(ErrorKind::kSizeMismatch, "fixed start does not hold k servers");
    table.initial = space.index(*options.fixed_start);
  } else {
    table.initial = static_cast<std::size_t>(std::min_element(root.begin(), root.end()) - root.begin());
  }
  table.value = root[table.initial];
  return table;
}

double evaluate_policy_exact(const Metric& m, const PolicyTable& policy) {
  const ConfigSpace& space = policy.space;
  std::vector<double> reach(space.size(), 0.0);
  reach[policy.initial] = 1.0;
  double total = 0.0;
  for (std::size_t i = 0; i < policy.t(); ++i) {
    const auto& support = policy.dists.steps[i];
    std::vector<double> after(space.size(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s) {
      if (reach[s] == 0.0) continue;
      for (std::size_t j = 0; j < support.size(); ++j) {
        const std::size_t to = policy.next[i][s][j];
        const double p = reach[s] * support[j].prob;
        total += p * step_cost(m, policy.mode, space.at(s), space.at(to), support[j].point);
        after[to] += p;
      }
    }
    reach = std::move(after);
  }
  return total;
}

CostStats simulate_policy(const Metric& m, const PolicyTable& policy, std::size_t trials,
                          std::uint64_t seed, ExecPolicy exec) {
  std::vector<double> samples(trials);
  const auto trial = [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    const std::vector<PointId> req = sample_requests(policy.dists, rng);
    std::size_t s = policy.initial;
    double cost = 0.0;
    for (std::size_t step = 0; step < req.size(); ++step) {
      const std::size_t j = support_index(policy.dists.steps[step], req[step]);
      const std::size_t to = policy.next[step][s][j];
      cost += step_cost(m, policy.mode, policy.space.at(s), policy.space.at(to), req[step]);
      s = to;
    }
    samples[i] = cost;
  };
  if (exec == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < trials; ++i) trial(i);
  } else {
    for (std::size_t i = 0; i < trials; ++i) trial(i);
  }
  return summarize(std::move(samples));
}

OfflineResult offline_opt(const Metric& m, const std::vector<PointId>& requests, int k, CostMode mode,
                          const OracleOptions& options) {
  for (PointId r : requests)
    if (!m.valid_point(r)) fail(ErrorKind::kValidation, "request " + std::to_string(r) + " is not a point");
  check_budget(m.size(), k, requests.size(), options.budget, "offline optimum");
  const ConfigSpace space(m.size(), k);
  const auto dist = config_distance_table(m, space, options.policy);
  std::vector<std::vector<double>> service;
  for (PointId r : requests) service.push_back(service_row(m, space, mode, r));
  const LayeredPath path =
      layered_shortest_path(dist, space.size(), start_weights(space, options.fixed_start), service, options.policy);
  OfflineResult out;
  out.value = path.value;
  for (std::size_t s : path.states) out.trace.push_back(space.at(s));
  return out;
}

NonAdaptiveOptimum best_nonadaptive_bruteforce(const Metric& m, const DistributionSequence& d, int k,
                                               const OracleOptions& options) {
  validate(m, d);
  check_budget(m.size(), k, d.t(), options.budget, "non-adaptive enumeration");
  const ConfigSpace space(m.size(), k);
  const auto dist = config_distance_table(m, space, options.policy);
  std::vector<std::vector<double>> service;
  for (const auto& step : d.steps) {
    std::vector<double> w(space.size(), 0.0);
    for (std::size_t s = 0; s < space.size(); ++s)
      for (const Outcome& o : step) w[s] += 2.0 * o.prob * serve_distance(m, space.at(s), o.point);
    service.push_back(std::move(w));
  }
  const LayeredPath path =
      layered_shortest_path(dist, space.size(), start_weights(space, options.fixed_start), service, options.policy);
  NonAdaptiveOptimum out;
  out.value = path.value;
  for (std::size_t s : path.states) out.plan.configs.push_back(space.at(s));
  return out;
}

}  // namespace sks
