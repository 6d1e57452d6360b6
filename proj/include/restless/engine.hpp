#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "restless/model.hpp"

namespace restless {

// Reward/resource metrics of a threshold policy at one state, together with
// the marginal metrics and certified truncation bounds.  F_err and G_err
// bound |F_k - F| and |G_k - G|; fg_err bounds both |f_k - f| and |g_k - g|.
// Closed-form backends report horizon = kExactHorizon with zero bounds.
struct MetricBundle {
  double F = 0.0;
  double G = 0.0;
  double f = 0.0;
  double g = 0.0;
  int horizon = 0;
  double F_err = 0.0;
  double G_err = 0.0;
  double fg_err = 0.0;
};

inline constexpr int kExactHorizon = std::numeric_limits<int>::max();

struct MPIndexValue {
  double x = 0.0;
  double m = 0.0;
  double err = 0.0;      // certified |m_k - m| bound
  double g_floor = 0.0;  // certified lower bound on g(x,x) used in err
  int horizon = 0;
};

struct IndexEntry {
  double x = 0.0;
  bool certified = false;
  MPIndexValue value;  // valid when certified
  std::string error;   // set when not certified
};

struct IndexTable {
  std::vector<IndexEntry> entries;
  double tol = 0.0;

  bool all_certified() const {
    for (const auto& e : entries)
      if (!e.certified) return false;
    return true;
  }
};

struct EngineConfig {
  std::size_t memo_cap = 10'000'000;  // max (state, depth) memo entries
  double dedup_tol = 1e-14;           // relative state dedup tolerance
  int jobs = 0;                       // worker threads; 0 = available cores
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads.  Tasks must write to
// disjoint slots; results are then independent of the degree.
void parallel_for(std::size_t n, int jobs,
                  const std::function<void(std::size_t)>& fn);

// Evaluates the k-horizon value-iteration recursion for one deterministic
// threshold policy, exactly (up to round-off) over the reachable-state set.
// States are deduplicated to dedup_tol * state_scale; the recursion is a
// depth-synchronous sweep over the closed state set, so the cost is
// O(|reachable| * k).  Queries made in one bundles() call share the sweep.
//
// Not thread-safe per instance; build one evaluator per thread.
class ThresholdEvaluator {
 public:
  ThresholdEvaluator(const BanditModel& model, ThresholdPolicy policy,
                     EngineConfig cfg = {});

  MetricBundle bundle(double x, int k);
  std::vector<MetricBundle> bundles(const std::vector<double>& xs, int k);

  // Metrics of the policy <a, policy> that forces the first action.
  // Returned pair is (F_k, G_k) of the forced policy.
  std::pair<double, double> forced(double x, int a, int k);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    double r0, r1, c0, c1;
    int action;
    bool succ_done[2] = {false, false};
    std::vector<std::pair<double, std::uint32_t>> succ[2];
  };

  std::uint32_t intern(double x);
  void compile_pending();
  void attach_action(std::uint32_t id, int a);
  void ensure_both_actions(std::uint32_t id);
  void run_dp(int k);

  const BanditModel& model_;
  ThresholdPolicy policy_;
  EngineConfig cfg_;
  double quantum_;

  std::unordered_map<long long, std::vector<std::uint32_t>> buckets_;
  std::vector<double> states_;
  std::vector<Node> nodes_;
  std::size_t compiled_ = 0;

  int dp_k_ = -1;
  std::size_t dp_nodes_ = 0;
  std::vector<double> Fk_, Gk_, Fkm1_, Gkm1_;
};

// --- module operations ------------------------------------------------------

// Smallest k with M_gamma * gamma^k <= tol (0 if already satisfied).
int k_for_tolerance(const BanditModel& model, double tol);

MetricBundle k_horizon_metrics(const BanditModel& model, double x,
                               const ThresholdSpec& policy, int k,
                               EngineConfig cfg = {});

MetricBundle metrics_to_tolerance(const BanditModel& model, double x,
                                  const ThresholdSpec& policy, double tol,
                                  EngineConfig cfg = {});

MetricBundle distribution_metrics(const BanditModel& model,
                                  const InitialDistribution& nu0,
                                  const ThresholdSpec& policy, int k,
                                  EngineConfig cfg = {});

// Randomized threshold policy metrics: the alpha-mix of the z-policy and
// the z-minus policy bundles.
MetricBundle randomized_threshold_metrics(const BanditModel& model,
                                          const InitialDistribution& nu0,
                                          double z, double alpha, int k,
                                          EngineConfig cfg = {});

MPIndexValue mp_index_at(const BanditModel& model, double x, int k,
                         EngineConfig cfg = {});
MPIndexValue mp_index_at_tol(const BanditModel& model, double x, double tol,
                             EngineConfig cfg = {});

// One certified index value per grid point; per-point failures are collected
// in the table rather than thrown.
IndexTable mp_index_table(const BanditModel& model,
                          const std::vector<double>& grid, double tol,
                          EngineConfig cfg = {});

// Set of states reachable from root under any action sequence, closed under
// the one-step maps (to max_depth if >= 0, else to closure), sorted.
std::vector<double> reachable_set(const BanditModel& model, double root,
                                  int max_depth = -1, EngineConfig cfg = {});

}  // namespace restless
