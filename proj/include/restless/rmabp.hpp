#pragma once

#include <cstdint>
#include <vector>

#include "restless/frontier.hpp"

namespace restless {

struct RMABPProject {
  BanditModel model;
  double x0 = 0.0;
  IndexTable table;   // certified index table over the project grid
  PCLReport report;   // certification; non-passing projects are refused
};

struct RMABPInstance {
  std::vector<RMABPProject> projects;
  double budget = 0.0;
  double beta = 0.0;  // shared discount

  void validate() const;
};

struct DualProjectValue {
  double threshold = 0.0;  // generalized-inverse threshold at lambda
  double value = 0.0;      // F - lambda * G at the project's initial state
};

struct DualSolution {
  double lambda_opt = 0.0;
  double bound = 0.0;  // budget * lambda / (1 - beta) + sum of values
  std::vector<DualProjectValue> per_project;
};

struct SimResult {
  double mean_value = 0.0;
  double half_width = 0.0;  // 1.96 * sample sd / sqrt(episodes)
  std::int64_t episodes = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
  std::int64_t violations = 0;  // a nonzero count aborts the run
};

// A threshold in the level/overflow set of the (certified nondecreasing)
// index at price lambda: the leftmost grid root with linear interpolation,
// or the canonical below-range / above-range threshold.
double generalized_inverse(const IndexTable& table, double lambda,
                           const StateInterval& states);

// Price the resource at lambda and evaluate the decomposed relaxation:
// per project the optimal threshold policy value F - lambda G, plus the
// budget term.  Upper-bounds every budget-feasible policy's value.
DualSolution lagrangian_value(const RMABPInstance& inst, double lambda,
                              double metric_tol = 1e-9, EngineConfig cfg = {});

// Minimizes the convex dual over lambda >= 0 by golden-section search.
DualSolution solve_dual(const RMABPInstance& inst, double tol = 1e-6,
                        double metric_tol = 1e-9, EngineConfig cfg = {});

// Greedy activation in nonincreasing index order (ties to the lower project
// id), skipping projects whose activation would break the budget.
std::vector<int> index_policy_step(const std::vector<double>& indices,
                                   const std::vector<double>& costs_active,
                                   const std::vector<double>& costs_passive,
                                   double budget);

SimResult simulate_index_policy(const RMABPInstance& inst,
                                std::int64_t episodes, int horizon,
                                std::uint64_t seed, double index_tol = 1e-6,
                                EngineConfig cfg = {});

// Smallest horizon T with n * max M_gamma * beta^T <= tol.
int horizon_for_tolerance(const RMABPInstance& inst, double tol);

}  // namespace restless
