#include "restless/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <mutex>
#include <thread>

namespace restless {

void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

ThresholdEvaluator::ThresholdEvaluator(const BanditModel& model,
                                       ThresholdPolicy policy,
                                       EngineConfig cfg)
    : model_(model), policy_(policy), cfg_(cfg) {
  quantum_ = cfg_.dedup_tol * model_.state_scale();
}

std::uint32_t ThresholdEvaluator::intern(double x) {
  if (!std::isfinite(x)) throw domain_error("non-finite state reached");
  // heal tiny float drift past the interval endpoints
  const double slack = 1e-9 * model_.state_scale();
  if (x < model_.states.lower) {
    if (x < model_.states.lower - slack)
      throw domain_error("kernel map left the state interval (x=" +
                         std::to_string(x) + ")");
    x = model_.states.lower;
  } else if (x > model_.states.upper) {
    if (x > model_.states.upper + slack)
      throw domain_error("kernel map left the state interval (x=" +
                         std::to_string(x) + ")");
    x = model_.states.upper;
  }

  const long long key = std::llround(x / quantum_);
  for (long long k = key - 1; k <= key + 1; ++k) {
    auto it = buckets_.find(k);
    if (it == buckets_.end()) continue;
    for (std::uint32_t id : it->second)
      if (std::abs(states_[id] - x) <= quantum_) return id;
  }
  if (states_.size() >= cfg_.memo_cap)
    throw resource_error("reachable-state set exceeds the memo cap of " +
                         std::to_string(cfg_.memo_cap) + " entries");
  const auto id = static_cast<std::uint32_t>(states_.size());
  states_.push_back(x);
  buckets_[key].push_back(id);
  return id;
}

void ThresholdEvaluator::compile_pending() {
  // close the state set under the policy's own maps only; the off-policy
  // branches are attached on demand at query roots (ensure_action), which
  // keeps the closure finite whenever each single policy's orbit set is
  while (compiled_ < states_.size()) {
    const double x = states_[compiled_];
    Node n;
    n.r0 = model_.reward(x, 0);
    n.r1 = model_.reward(x, 1);
    n.c0 = model_.cost(x, 0);
    n.c1 = model_.cost(x, 1);
    n.action = policy_.action(x);
    nodes_.push_back(std::move(n));
    const auto id = static_cast<std::uint32_t>(compiled_);
    ++compiled_;
    attach_action(id, nodes_[id].action);
  }
}

void ThresholdEvaluator::attach_action(std::uint32_t id, int a) {
  if (nodes_[id].succ_done[a]) return;
  auto branches = kernel_at(model_, states_[id], a);
  auto& succ = nodes_[id].succ[a];
  succ.reserve(branches.size());
  for (const auto& b : branches) succ.emplace_back(b.prob, intern(b.next));
  nodes_[id].succ_done[a] = true;
}

void ThresholdEvaluator::ensure_both_actions(std::uint32_t id) {
  compile_pending();
  attach_action(id, 0);
  attach_action(id, 1);
  compile_pending();
}

void ThresholdEvaluator::run_dp(int k) {
  compile_pending();
  if (dp_k_ == k && dp_nodes_ == nodes_.size()) return;

  // the depth sweep keeps rolling layers, so the live table is O(states);
  // the registry cap in intern() is the binding limit and is re-checked here
  const std::size_t n = nodes_.size();
  if (n > cfg_.memo_cap)
    throw resource_error("memo table needs " + std::to_string(n) +
                         " states, exceeding the cap of " +
                         std::to_string(cfg_.memo_cap));

  const double beta = model_.discount;
  std::vector<double> F(n), G(n), Fn(n), Gn(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Node& nd = nodes_[i];
    F[i] = nd.action ? nd.r1 : nd.r0;
    G[i] = nd.action ? nd.c1 : nd.c0;
  }
  Fkm1_.assign(n, 0.0);
  Gkm1_.assign(n, 0.0);
  if (k == 0) {
    Fkm1_.clear();
    Gkm1_.clear();
  }

  for (int d = 1; d <= k; ++d) {
    if (d == k) {
      Fkm1_ = F;
      Gkm1_ = G;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Node& nd = nodes_[i];
      double sf = 0.0, sg = 0.0;
      for (const auto& [p, c] : nd.succ[nd.action]) {
        sf += p * F[c];
        sg += p * G[c];
      }
      Fn[i] = (nd.action ? nd.r1 : nd.r0) + beta * sf;
      Gn[i] = (nd.action ? nd.c1 : nd.c0) + beta * sg;
    }
    F.swap(Fn);
    G.swap(Gn);
  }
  Fk_ = std::move(F);
  Gk_ = std::move(G);
  dp_k_ = k;
  dp_nodes_ = n;
}

MetricBundle ThresholdEvaluator::bundle(double x, int k) {
  return bundles({x}, k)[0];
}

std::vector<MetricBundle> ThresholdEvaluator::bundles(
    const std::vector<double>& xs, int k) {
  if (k < 0) throw input_error("horizon k must be >= 0");
  std::vector<std::uint32_t> ids;
  ids.reserve(xs.size());
  for (double x : xs) {
    if (!model_.states.contains(x))
      throw domain_error("query state outside the state interval");
    ids.push_back(intern(x));
  }
  compile_pending();
  for (std::uint32_t id : ids) ensure_both_actions(id);
  run_dp(k);

  const double beta = model_.discount;
  const auto& wb = model_.weight_bound;
  // with zero discount every horizon is exact
  const double rate =
      beta == 0.0 ? 0.0 : wb.M_gamma() * std::pow(wb.gamma, k);

  std::vector<MetricBundle> out;
  out.reserve(ids.size());
  for (std::size_t q = 0; q < ids.size(); ++q) {
    const std::uint32_t i = ids[q];
    const Node& nd = nodes_[i];
    MetricBundle b;
    b.horizon = k;
    b.F = Fk_[i];
    b.G = Gk_[i];
    if (k == 0) {
      b.f = nd.r1 - nd.r0;
      b.g = nd.c1 - nd.c0;
    } else {
      double s[2][2] = {{0, 0}, {0, 0}};  // [action][0=F,1=G]
      for (int a = 0; a < 2; ++a)
        for (const auto& [p, c] : nd.succ[a]) {
          s[a][0] += p * Fkm1_[c];
          s[a][1] += p * Gkm1_[c];
        }
      b.f = (nd.r1 + beta * s[1][0]) - (nd.r0 + beta * s[0][0]);
      b.g = (nd.c1 + beta * s[1][1]) - (nd.c0 + beta * s[0][1]);
    }
    const double wx = wb.w(xs[q]);
    b.F_err = b.G_err = rate * wx;
    b.fg_err = 2.0 * rate * wx;
    out.push_back(b);
  }
  return out;
}

std::pair<double, double> ThresholdEvaluator::forced(double x, int a, int k) {
  if (k < 0) throw input_error("horizon k must be >= 0");
  const std::uint32_t i = intern(x);
  ensure_both_actions(i);
  run_dp(k);
  const Node& nd = nodes_[i];
  const double r = a ? nd.r1 : nd.r0;
  const double c = a ? nd.c1 : nd.c0;
  if (k == 0) return {r, c};
  double sf = 0.0, sg = 0.0;
  for (const auto& [p, ch] : nd.succ[a]) {
    sf += p * Fkm1_[ch];
    sg += p * Gkm1_[ch];
  }
  return {r + model_.discount * sf, c + model_.discount * sg};
}

// --- free functions ----------------------------------------------------------

int k_for_tolerance(const BanditModel& model, double tol) {
  if (tol <= 0.0) throw input_error("tolerance must be > 0");
  const auto& wb = model.weight_bound;
  if (tol >= wb.M_gamma()) return 0;
  if (wb.gamma <= 0.0) return 1;
  const double k =
      std::log(tol * (1.0 - wb.gamma) / wb.M) / std::log(wb.gamma);
  return std::max(0, static_cast<int>(std::ceil(k)));
}

MetricBundle k_horizon_metrics(const BanditModel& model, double x,
                               const ThresholdSpec& policy, int k,
                               EngineConfig cfg) {
  if (policy.alpha.has_value())
    return randomized_threshold_metrics(
        model, InitialDistribution::point_mass(x), policy.z, *policy.alpha, k,
        cfg);
  ThresholdEvaluator ev(model, policy.deterministic(), cfg);
  return ev.bundle(x, k);
}

MetricBundle metrics_to_tolerance(const BanditModel& model, double x,
                                  const ThresholdSpec& policy, double tol,
                                  EngineConfig cfg) {
  return k_horizon_metrics(model, x, policy, k_for_tolerance(model, tol), cfg);
}

static MetricBundle combine(const MetricBundle& a, const MetricBundle& b,
                            double wa, double wb) {
  MetricBundle r;
  r.F = wa * a.F + wb * b.F;
  r.G = wa * a.G + wb * b.G;
  r.f = wa * a.f + wb * b.f;
  r.g = wa * a.g + wb * b.g;
  r.horizon = std::min(a.horizon, b.horizon);
  r.F_err = wa * a.F_err + wb * b.F_err;
  r.G_err = wa * a.G_err + wb * b.G_err;
  r.fg_err = wa * a.fg_err + wb * b.fg_err;
  return r;
}

MetricBundle distribution_metrics(const BanditModel& model,
                                  const InitialDistribution& nu0,
                                  const ThresholdSpec& policy, int k,
                                  EngineConfig cfg) {
  nu0.validate();
  if (policy.alpha.has_value())
    return randomized_threshold_metrics(model, nu0, policy.z, *policy.alpha, k,
                                        cfg);
  ThresholdEvaluator ev(model, policy.deterministic(), cfg);
  auto per_node = ev.bundles(nu0.nodes, k);
  MetricBundle acc;
  acc.horizon = k;
  for (std::size_t i = 0; i < per_node.size(); ++i)
    acc = combine(acc, per_node[i], 1.0, nu0.weights[i]);
  acc.horizon = k;
  return acc;
}

MetricBundle randomized_threshold_metrics(const BanditModel& model,
                                          const InitialDistribution& nu0,
                                          double z, double alpha, int k,
                                          EngineConfig cfg) {
  if (!std::isfinite(z))
    throw domain_error("randomized threshold needs a finite z");
  if (alpha < 0.0 || alpha > 1.0) throw domain_error("alpha must be in [0,1]");
  auto bz = distribution_metrics(model, nu0, ThresholdSpec::z_policy(z), k, cfg);
  auto bzm =
      distribution_metrics(model, nu0, ThresholdSpec::z_minus_policy(z), k, cfg);
  return combine(bz, bzm, alpha, 1.0 - alpha);
}

MPIndexValue mp_index_at(const BanditModel& model, double x, int k,
                         EngineConfig cfg) {
  ThresholdEvaluator ev(model, ThresholdPolicy{x, Side::passive_at_threshold},
                        cfg);
  MetricBundle b = ev.bundle(x, k);
  if (!(b.g > 0.0))
    throw numeric_error("marginal resource g_k(x,x) = " + std::to_string(b.g) +
                        " is not positive at x = " + std::to_string(x));
  const double floor = b.g - b.fg_err;
  if (!(floor > 0.0))
    throw numeric_error(
        "PCLI1 not certifiable at x = " + std::to_string(x) +
        ": g_k = " + std::to_string(b.g) +
        ", truncation bound = " + std::to_string(b.fg_err));
  MPIndexValue v;
  v.x = x;
  v.m = b.f / b.g;
  v.g_floor = floor;
  v.horizon = k;
  v.err = b.fg_err * (1.0 + std::abs(v.m)) / floor;
  return v;
}

MPIndexValue mp_index_at_tol(const BanditModel& model, double x, double tol,
                             EngineConfig cfg) {
  return mp_index_at(model, x, k_for_tolerance(model, tol), cfg);
}

IndexTable mp_index_table(const BanditModel& model,
                          const std::vector<double>& grid, double tol,
                          EngineConfig cfg) {
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw input_error("index grid must be sorted ascending");
  IndexTable table;
  table.tol = tol;
  const int k = k_for_tolerance(model, tol);
  table.entries.resize(grid.size());
  parallel_for(grid.size(), cfg.jobs, [&](std::size_t i) {
    IndexEntry e;
    e.x = grid[i];
    try {
      e.value = mp_index_at(model, grid[i], k, cfg);
      e.certified = true;
    } catch (const std::runtime_error& err) {
      e.error = err.what();
    }
    table.entries[i] = std::move(e);
  });
  return table;
}

std::vector<double> reachable_set(const BanditModel& model, double root,
                                  int max_depth, EngineConfig cfg) {
  if (!model.states.contains(root))
    throw domain_error("root state outside the state interval");
  const double quantum = cfg.dedup_tol * model.state_scale();
  std::unordered_map<long long, std::vector<std::size_t>> buckets;
  std::vector<double> states;
  auto intern = [&](double x) -> std::pair<std::size_t, bool> {
    const long long key = std::llround(x / quantum);
    for (long long k = key - 1; k <= key + 1; ++k) {
      auto it = buckets.find(k);
      if (it == buckets.end()) continue;
      for (std::size_t id : it->second)
        if (std::abs(states[id] - x) <= quantum) return {id, false};
    }
    if (states.size() >= cfg.memo_cap)
      throw resource_error("reachable-state set exceeds the memo cap of " +
                           std::to_string(cfg.memo_cap) + " entries");
    states.push_back(x);
    buckets[key].push_back(states.size() - 1);
    return {states.size() - 1, true};
  };

  std::deque<std::pair<std::size_t, int>> work;
  work.push_back({intern(root).first, 0});
  while (!work.empty()) {
    auto [id, depth] = work.front();
    work.pop_front();
    if (max_depth >= 0 && depth >= max_depth) continue;
    const double x = states[id];
    for (int a = 0; a < 2; ++a)
      for (const auto& b : kernel_at(model, x, a)) {
        auto [cid, fresh] = intern(b.next);
        if (fresh) work.push_back({cid, depth + 1});
      }
  }
  std::sort(states.begin(), states.end());
  return states;
}

}  // namespace restless
