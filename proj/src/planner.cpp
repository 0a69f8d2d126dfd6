#include "sks/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sks/error.hpp"

namespace sks {

namespace {
constexpr double kPlanTol = 1e-7;

std::string idx(std::initializer_list<std::size_t> parts) {
  std::string s = "[";
  bool first = true;
  for (std::size_t p : parts) {
    if (!first) s += ',';
    s += std::to_string(p);
    first = false;
  }
  return s + "]";
}
}  // namespace

DistributionSequence DistributionSequence::deterministic(const std::vector<PointId>& requests) {
  DistributionSequence d;
  for (PointId r : requests) d.steps.push_back({{r, 1.0}});
  return d;
}

DistributionSequence normalized(const Metric& m, DistributionSequence d) {
  for (std::size_t s = 0; s < d.steps.size(); ++s) {
    std::map<PointId, double> merged;
    for (const Outcome& o : d.steps[s]) {
      if (!m.valid_point(o.point))
        fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) + ": point " +
                                         std::to_string(o.point) + " not in metric");
      if (!(o.prob >= 0.0) || !std::isfinite(o.prob))
        fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) + ": negative probability");
      merged[o.point] += o.prob;
    }
    d.steps[s].clear();
    for (const auto& [p, q] : merged)
      if (q > 0.0) d.steps[s].push_back({p, q});
  }
  validate(m, d);
  return d;
}

void validate(const Metric& m, const DistributionSequence& d) {
  for (std::size_t s = 0; s < d.steps.size(); ++s) {
    if (d.steps[s].empty())
      fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) + " has empty support");
    double total = 0.0;
    for (const Outcome& o : d.steps[s]) {
      if (!m.valid_point(o.point))
        fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) + ": point " +
                                         std::to_string(o.point) + " not in metric");
      if (!(o.prob >= 0.0))
        fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) + ": negative probability");
      total += o.prob;
    }
    if (std::abs(total - 1.0) > kTol)
      fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) +
                                       " probabilities sum to " + std::to_string(total));
  }
}

std::vector<PointId> sample_requests(const DistributionSequence& d, Rng& rng) {
  std::vector<PointId> out;
  out.reserve(d.t());
  for (const auto& step : d.steps) {
    const double u = uniform01(rng);
    double acc = 0.0;
    PointId pick = step.back().point;
    for (const Outcome& o : step) {
      acc += o.prob;
      if (u < acc) {
        pick = o.point;
        break;
      }
    }
    out.push_back(pick);
  }
  return out;
}

NonAdaptiveLp build_nonadaptive_lp(const Metric& m, const DistributionSequence& d, int k,
                                   const std::optional<Configuration>& fixed_start) {
  if (k < 1) fail(ErrorKind::kValidation, "k must be at least 1");
  if (d.t() < 1) fail(ErrorKind::kValidation, "need at least one request step");
  for (std::size_t s = 0; s < d.t(); ++s)
    if (d.steps[s].empty())
      fail(ErrorKind::kValidation, "step " + std::to_string(s + 1) + " has empty support");
  validate(m, d);

  NonAdaptiveLp out;
  LinearProgram& lp = out.lp;
  LpLayout& L = out.layout;
  const std::size_t n = m.size(), t = d.t();
  L.n = n;
  L.t = t;
  L.k = k;

  L.b0 = 0;
  for (std::size_t tau = 0; tau <= t; ++tau)
    for (std::size_t v = 0; v < n; ++v) lp.add_variable("b" + idx({tau, v}), 0.0);
  L.f0 = static_cast<int>(lp.num_variables());
  for (std::size_t tau = 1; tau <= t; ++tau)
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        lp.add_variable("f" + idx({tau, u, v}),
                        m.dist(static_cast<PointId>(u), static_cast<PointId>(v)));
  for (std::size_t tau = 1; tau <= t; ++tau) {
    for (const Outcome& o : d.steps[tau - 1]) {
      LpLayout::XBlock blk{tau, o.point, o.prob, static_cast<int>(lp.num_variables())};
      for (std::size_t v = 0; v < n; ++v)
        lp.add_variable("x" + idx({tau, v, static_cast<std::size_t>(o.point)}),
                        2.0 * o.prob * m.dist(static_cast<PointId>(v), o.point));
      L.x.push_back(blk);
    }
  }

  for (std::size_t tau = 1; tau <= t; ++tau) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto pv = static_cast<PointId>(v);
      std::vector<Term> terms{{L.b(tau, pv), 1.0}, {L.b(tau - 1, pv), -1.0}};
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v) continue;
        const auto pu = static_cast<PointId>(u);
        terms.push_back({L.f(tau, pu, pv), -1.0});
        terms.push_back({L.f(tau, pv, pu), 1.0});
      }
      lp.add_constraint(std::move(terms), Relation::kEqual, 0.0, "flow" + idx({tau, v}));
    }
  }
  for (const auto& blk : L.x) {
    std::vector<Term> terms;
    for (std::size_t v = 0; v < n; ++v) terms.push_back({blk.first + static_cast<int>(v), 1.0});
    lp.add_constraint(std::move(terms), Relation::kGreaterEqual, 1.0,
                      "cover" + idx({blk.step, static_cast<std::size_t>(blk.request)}));
  }
  for (const auto& blk : L.x) {
    for (std::size_t v = 0; v < n; ++v) {
      lp.add_constraint({{blk.first + static_cast<int>(v), 1.0},
                         {L.b(blk.step, static_cast<PointId>(v)), -1.0}},
                        Relation::kLessEqual, 0.0,
                        "cap" + idx({blk.step, v, static_cast<std::size_t>(blk.request)}));
    }
  }
  for (std::size_t tau = 0; tau <= t; ++tau) {
    std::vector<Term> terms;
    for (std::size_t v = 0; v < n; ++v) terms.push_back({L.b(tau, static_cast<PointId>(v)), 1.0});
    lp.add_constraint(std::move(terms), Relation::kLessEqual, static_cast<double>(k),
                      "total" + idx({tau}));
  }
  if (fixed_start) {
    if (fixed_start->k() != static_cast<std::size_t>(k))
      fail(ErrorKind::kSizeMismatch, "fixed start does not hold k servers");
    validate(m, *fixed_start);
    const auto counts = fixed_start->counts(n);
    for (std::size_t v = 0; v < n; ++v)
      lp.add_constraint({{L.b(0, static_cast<PointId>(v)), 1.0}}, Relation::kEqual,
                        static_cast<double>(counts[v]), "start" + idx({v}));
  }
  return out;
}

void audit_fractional_plan(const FractionalPlan& plan, std::size_t n) {
  const std::size_t t = plan.flows.size();
  if (plan.configs.size() != t + 1 || plan.serving.size() != t)
    fail(ErrorKind::kExtraction, "plan has inconsistent step counts");
  for (std::size_t tau = 0; tau <= t; ++tau) {
    const auto& B = plan.configs[tau];
    for (double v : B.mass)
      if (v < -kPlanTol) fail(ErrorKind::kExtraction, "negative configuration mass at step " + std::to_string(tau));
    if (B.total() > plan.k + kPlanTol)
      fail(ErrorKind::kExtraction, "total-mass family violated at step " + std::to_string(tau));
  }
  for (std::size_t tau = 1; tau <= t; ++tau) {
    const auto& F = plan.flows[tau - 1];
    for (std::size_t v = 0; v < n; ++v) {
      double in = 0.0, out = 0.0;
      for (std::size_t u = 0; u < n; ++u) {
        if (u == v) continue;
        in += F[u * n + v];
        out += F[v * n + u];
      }
      const double expect = plan.configs[tau - 1].mass[v] + in - out;
      if (std::abs(plan.configs[tau].mass[v] - expect) > kPlanTol)
        fail(ErrorKind::kExtraction, "flow-conservation family violated at step " +
                                         std::to_string(tau) + ", point " + std::to_string(v));
    }
    for (const ServeAssignment& s : plan.serving[tau - 1]) {
      double covered = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        covered += s.share[v];
        if (s.share[v] > plan.configs[tau].mass[v] + kPlanTol)
          fail(ErrorKind::kExtraction, "serve-capacity family violated at step " +
                                           std::to_string(tau) + ", point " + std::to_string(v));
      }
      if (covered < 1.0 - kPlanTol)
        fail(ErrorKind::kExtraction, "covering family violated at step " + std::to_string(tau) +
                                         " for request " + std::to_string(s.request));
    }
  }
}

FractionalPlan extract_fractional_plan(const NonAdaptiveLp& program, const LpSolution& sol) {
  if (sol.status != LpStatus::kOptimal)
    fail(ErrorKind::kExtraction, "cannot extract a plan from a " + to_string(sol.status) + " solution");
  const LpLayout& L = program.layout;
  const auto& x = sol.values;
  if (x.size() != program.lp.num_variables())
    fail(ErrorKind::kExtraction, "solution dimension does not match program");
  const std::size_t n = L.n, t = L.t;
  auto val = [&](int i) { return std::max(0.0, x[static_cast<std::size_t>(i)]); };

  FractionalPlan plan;
  plan.k = L.k;
  plan.configs.resize(t + 1);
  for (std::size_t tau = 0; tau <= t; ++tau) {
    plan.configs[tau].mass.resize(n);
    for (std::size_t v = 0; v < n; ++v) plan.configs[tau].mass[v] = val(L.b(tau, static_cast<PointId>(v)));
  }
  plan.flows.assign(t, std::vector<double>(n * n, 0.0));
  for (std::size_t tau = 1; tau <= t; ++tau)
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        plan.flows[tau - 1][u * n + v] = val(L.f(tau, static_cast<PointId>(u), static_cast<PointId>(v)));
  plan.serving.resize(t);
  for (const auto& blk : L.x) {
    ServeAssignment s{blk.request, blk.prob, std::vector<double>(n)};
    for (std::size_t v = 0; v < n; ++v) s.share[v] = val(blk.first + static_cast<int>(v));
    plan.serving[blk.step - 1].push_back(std::move(s));
  }
  audit_fractional_plan(plan, n);

  const double deficit = plan.k - plan.configs[0].total();
  if (deficit > 0.0) {
    const auto& b0 = plan.configs[0].mass;
    const auto park = static_cast<std::size_t>(std::max_element(b0.begin(), b0.end()) - b0.begin());
    for (auto& B : plan.configs) B.mass[park] += deficit;
  }
  return plan;
}

double plan_cost_fractional(const Metric& m, const FractionalPlan& plan,
                            const DistributionSequence& d) {
  const std::size_t n = m.size();
  double cost = 0.0;
  for (const auto& F : plan.flows)
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v)
        cost += F[u * n + v] * m.dist(static_cast<PointId>(u), static_cast<PointId>(v));
  for (std::size_t tau = 0; tau < plan.serving.size(); ++tau) {
    for (const ServeAssignment& s : plan.serving[tau]) {
      double prob = s.prob;
      if (tau < d.t()) {
        prob = 0.0;
        for (const Outcome& o : d.steps[tau])
          if (o.point == s.request) prob = o.prob;
      }
      for (std::size_t v = 0; v < n; ++v)
        cost += 2.0 * s.share[v] * prob * m.dist(static_cast<PointId>(v), s.request);
    }
  }
  return cost;
}

PlannerResult plan_nonadaptive(const Metric& m, const DistributionSequence& d, int k,
                               const SolveOptions& options,
                               const std::optional<Configuration>& fixed_start) {
  PlannerResult res{build_nonadaptive_lp(m, d, k, fixed_start), {}, {}};
  res.solution = solve(res.program.lp, options);
  if (res.solution.status != LpStatus::kOptimal)
    fail(ErrorKind::kInfeasible, "non-adaptive program is " + to_string(res.solution.status));
  res.plan = extract_fractional_plan(res.program, res.solution);
  const double c = plan_cost_fractional(m, res.plan, d);
  if (std::abs(c - res.solution.objective_value) > 1e-6 * std::max(1.0, std::abs(c)))
    fail(ErrorKind::kExtraction, "plan cost does not reproduce the LP objective");
  return res;
}

IntegralPlan shift_plan(const std::vector<Configuration>& adaptive_trace) {
  IntegralPlan plan;
  if (adaptive_trace.empty()) return plan;
  plan.configs.reserve(adaptive_trace.size());
  plan.configs.push_back(adaptive_trace.front());
  for (std::size_t i = 1; i < adaptive_trace.size(); ++i) plan.configs.push_back(adaptive_trace[i - 1]);
  return plan;
}

double trace_cost(const Metric& m, const std::vector<Configuration>& trace) {
  double c = 0.0;
  for (std::size_t i = 1; i < trace.size(); ++i) c += config_distance(m, trace[i - 1], trace[i]);
  return c;
}

double plan_cost_integral(const Metric& m, const IntegralPlan& plan,
                          const std::vector<PointId>& requests) {
  if (plan.configs.size() != requests.size() + 1)
    fail(ErrorKind::kValidation, "plan covers " + std::to_string(plan.configs.size()) +
                                     " configurations for " + std::to_string(requests.size()) +
                                     " requests");
  double c = 0.0;
  for (std::size_t i = 1; i < plan.configs.size(); ++i) {
    c += config_distance(m, plan.configs[i - 1], plan.configs[i]);
    c += 2.0 * serve_distance(m, plan.configs[i], requests[i - 1]);
  }
  return c;
}

double expected_plan_cost(const Metric& m, const IntegralPlan& plan, const DistributionSequence& d) {
  if (plan.configs.size() != d.t() + 1)
    fail(ErrorKind::kValidation, "plan length does not match the distribution sequence");
  double c = 0.0;
  for (std::size_t i = 1; i < plan.configs.size(); ++i) {
    c += config_distance(m, plan.configs[i - 1], plan.configs[i]);
    for (const Outcome& o : d.steps[i - 1]) c += 2.0 * o.prob * serve_distance(m, plan.configs[i], o.point);
  }
  return c;
}

CostStats summarize(std::vector<double> samples) {
  CostStats s;
  s.samples = std::move(samples);
  const double n = static_cast<double>(s.samples.size());
  if (s.samples.empty()) return s;
  s.mean = std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / n;
  if (s.samples.size() > 1) {
    double ss = 0.0;
    for (double v : s.samples) ss += (v - s.mean) * (v - s.mean);
    s.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

CostStats simulate_plan(const Metric& m, const IntegralPlan& plan, const DistributionSequence& d,
                        std::size_t trials, std::uint64_t seed, ExecPolicy policy) {
  if (trials < 1) fail(ErrorKind::kValidation, "trials must be at least 1");
  if (plan.configs.size() != d.t() + 1)
    fail(ErrorKind::kValidation, "plan length does not match the distribution sequence");
  std::vector<double> movement(plan.configs.size(), 0.0);
  for (std::size_t i = 1; i < plan.configs.size(); ++i)
    movement[i] = config_distance(m, plan.configs[i - 1], plan.configs[i]);
  std::vector<double> costs(trials);
  const long nt = static_cast<long>(trials);
  auto one = [&](long i) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(i));
    const auto rho = sample_requests(d, rng);
    double c = 0.0;
    for (std::size_t s = 1; s < plan.configs.size(); ++s)
      c += movement[s] + 2.0 * serve_distance(m, plan.configs[s], rho[s - 1]);
    costs[static_cast<std::size_t>(i)] = c;
  };
  if (policy == ExecPolicy::kSerial) {
    for (long i = 0; i < nt; ++i) one(i);
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < nt; ++i) one(i);
  }
  return summarize(std::move(costs));
}

}  // namespace sks
