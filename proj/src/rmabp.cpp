#include "restless/rmabp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "restless/rng.hpp"

namespace restless {

void RMABPInstance::validate() const {
  if (projects.empty()) throw input_error("instance has no projects");
  if (!(beta >= 0.0 && beta < 1.0))
    throw input_error("instance beta must be in [0,1)");
  double passive_cost = 0.0;
  for (const auto& p : projects) {
    if (p.model.discount != beta)
      throw input_error("all projects must share the instance discount");
    if (!p.model.states.contains(p.x0))
      throw domain_error("initial state outside a project's state interval");
    passive_cost += p.model.cost(p.x0, 0);
  }
  if (passive_cost > budget + 1e-12)
    throw infeasibility_error(
        "budget cannot cover the all-passive action at the initial state");
}

double generalized_inverse(const IndexTable& table, double lambda,
                           const StateInterval& states) {
  if (!table.all_certified())
    throw input_error("generalized inverse needs a fully certified table");
  if (table.entries.empty()) throw input_error("empty index table");

  const auto& es = table.entries;
  if (lambda < es.front().value.m)
    return std::isfinite(states.lower) ? states.lower - 1.0 : kMinusInf;
  if (lambda > es.back().value.m)
    return std::isfinite(states.upper) ? states.upper + 1.0 : kPlusInf;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const double mi = es[i].value.m;
    if (mi == lambda) return es[i].x;
    if (mi > lambda) {
      const double m0 = es[i - 1].value.m;
      return es[i - 1].x +
             (lambda - m0) * (es[i].x - es[i - 1].x) / (mi - m0);
    }
  }
  return es.back().x;
}

DualSolution lagrangian_value(const RMABPInstance& inst, double lambda,
                              double metric_tol, EngineConfig cfg) {
  inst.validate();
  if (lambda < 0.0) throw input_error("lambda must be >= 0");
  DualSolution sol;
  sol.lambda_opt = lambda;
  sol.bound = inst.budget * lambda / (1.0 - inst.beta);
  for (const auto& p : inst.projects) {
    if (!p.report.passed())
      throw input_error(
          "project '" + p.model.name +
          "' is not certified; the dual bound would be unproven");
    DualProjectValue v;
    v.threshold = generalized_inverse(p.table, lambda, p.model.states);
    auto b = metrics_to_tolerance(p.model, p.x0,
                                  ThresholdSpec::z_policy(v.threshold),
                                  metric_tol, cfg);
    v.value = b.F - lambda * b.G;
    sol.bound += v.value;
    sol.per_project.push_back(v);
  }
  return sol;
}

DualSolution solve_dual(const RMABPInstance& inst, double tol,
                        double metric_tol, EngineConfig cfg) {
  inst.validate();
  double lambda_max = 0.0;
  for (const auto& p : inst.projects) {
    if (!p.table.all_certified())
      throw input_error("solve_dual needs certified index tables");
    for (const auto& e : p.table.entries)
      lambda_max = std::max(lambda_max, e.value.m);
  }
  lambda_max += 1.0;  // beyond this every project is priced passive

  auto L = [&](double lam) {
    return lagrangian_value(inst, lam, metric_tol, cfg).bound;
  };

  // coarse unimodality probe; the dual of a certified instance is convex
  {
    std::vector<double> ls, vs;
    for (int i = 0; i <= 8; ++i) {
      ls.push_back(lambda_max * i / 8.0);
      vs.push_back(L(ls.back()));
    }
    for (int i = 1; i + 1 < static_cast<int>(vs.size()); ++i) {
      const double d2 = vs[i - 1] - 2.0 * vs[i] + vs[i + 1];
      if (d2 < -1e-6 * (1.0 + std::abs(vs[i]))) {
        std::string trace;
        for (std::size_t j = 0; j < ls.size(); ++j)
          trace += " (" + std::to_string(ls[j]) + ", " +
                   std::to_string(vs[j]) + ")";
        throw numeric_error("dual appears non-convex beyond tolerance:" +
                            trace);
      }
    }
  }

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = lambda_max;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = L(c), fd = L(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = L(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = L(d);
    }
  }
  double best = 0.5 * (a + b);
  // boundary lambda = 0 is a common minimizer under slack budgets
  if (L(0.0) <= L(best)) best = 0.0;
  return lagrangian_value(inst, best, metric_tol, cfg);
}

std::vector<int> index_policy_step(const std::vector<double>& indices,
                                   const std::vector<double>& costs_active,
                                   const std::vector<double>& costs_passive,
                                   double budget) {
  const std::size_t n = indices.size();
  if (costs_active.size() != n || costs_passive.size() != n)
    throw input_error("index_policy_step needs equal-length inputs");
  double total = std::accumulate(costs_passive.begin(), costs_passive.end(), 0.0);
  if (total > budget + 1e-12)
    throw infeasibility_error("all-passive cost exceeds the budget");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (indices[i] != indices[j]) return indices[i] > indices[j];
    return i < j;
  });

  std::vector<int> actions(n, 0);
  for (std::size_t i : order) {
    const double delta = costs_active[i] - costs_passive[i];
    if (total + delta <= budget + 1e-12) {
      actions[i] = 1;
      total += delta;
    }
  }
  return actions;
}

int horizon_for_tolerance(const RMABPInstance& inst, double tol) {
  double mg = 0.0;
  for (const auto& p : inst.projects)
    mg = std::max(mg, p.model.weight_bound.M_gamma());
  const double scale = static_cast<double>(inst.projects.size()) * mg;
  if (scale <= tol || inst.beta <= 0.0) return 1;
  return std::max(
      1, static_cast<int>(std::ceil(std::log(tol / scale) / std::log(inst.beta))));
}

SimResult simulate_index_policy(const RMABPInstance& inst,
                                std::int64_t episodes, int horizon,
                                std::uint64_t seed, double index_tol,
                                EngineConfig cfg) {
  inst.validate();
  const std::size_t n = inst.projects.size();
  for (const auto& p : inst.projects)
    if (!p.report.passed())
      throw input_error("project '" + p.model.name +
                        "' is not certified; refusing to index it");

  // per-project index cache; the reachable state sets are small
  std::vector<std::unordered_map<double, double>> cache(n);
  const int k_index = [&] {
    int k = 0;
    for (const auto& p : inst.projects)
      k = std::max(k, k_for_tolerance(p.model, index_tol));
    return k;
  }();
  auto index_of = [&](std::size_t i, double x) {
    auto& c = cache[i];
    auto it = c.find(x);
    if (it != c.end()) return it->second;
    const double m = mp_index_at(inst.projects[i].model, x, k_index, cfg).m;
    c.emplace(x, m);
    return m;
  };

  std::vector<double> values(static_cast<std::size_t>(episodes));
  std::int64_t violations = 0;

  std::vector<double> x(n), idx(n), ca(n), cp(n);
  for (std::int64_t ep = 0; ep < episodes; ++ep) {
    CounterRng rng(seed, static_cast<std::uint64_t>(ep));
    for (std::size_t i = 0; i < n; ++i) x[i] = inst.projects[i].x0;
    double value = 0.0;
    double disc = 1.0;
    for (int t = 0; t < horizon; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        idx[i] = index_of(i, x[i]);
        ca[i] = inst.projects[i].model.cost(x[i], 1);
        cp[i] = inst.projects[i].model.cost(x[i], 0);
      }
      const auto actions = index_policy_step(idx, ca, cp, inst.budget);
      double spent = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        spent += inst.projects[i].model.cost(x[i], actions[i]);
      if (spent > inst.budget + 1e-9) {
        ++violations;
        throw numeric_error(
            "sample-path budget violation; this indicates a bug in the "
            "policy step");
      }
      for (std::size_t i = 0; i < n; ++i)
        value += disc * inst.projects[i].model.reward(x[i], actions[i]);
      // advance states in project-id order for a deterministic draw order
      for (std::size_t i = 0; i < n; ++i) {
        auto branches = kernel_at(inst.projects[i].model, x[i], actions[i]);
        if (branches.size() == 1) {
          x[i] = branches[0].next;
        } else {
          const double u = rng.uniform();
          double acc = 0.0;
          double next = branches.back().next;
          for (const auto& br : branches) {
            acc += br.prob;
            if (u < acc) {
              next = br.next;
              break;
            }
          }
          x[i] = next;
        }
      }
      disc *= inst.beta;
    }
    values[static_cast<std::size_t>(ep)] = value;
  }

  SimResult res;
  res.episodes = episodes;
  res.horizon = horizon;
  res.seed = seed;
  res.violations = violations;
  double sum = 0.0;
  bool all_same = true;
  for (double v : values) {
    sum += v;
    all_same = all_same && v == values.front();
  }
  res.mean_value = sum / static_cast<double>(episodes);
  if (episodes > 1 && !all_same) {
    double ss = 0.0;
    for (double v : values) ss += (v - res.mean_value) * (v - res.mean_value);
    const double sd = std::sqrt(ss / static_cast<double>(episodes - 1));
    res.half_width = 1.96 * sd / std::sqrt(static_cast<double>(episodes));
  }
  return res;
}

}  // namespace restless
