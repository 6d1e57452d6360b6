#pragma once

#include <functional>
#include <string>
#include <vector>

#include "restless/types.hpp"

namespace restless {

using StateFn = std::function<double(double)>;
using StateActionFn = std::function<double(double, int)>;

// One branch of a finite-mixture transition kernel: with probability
// prob(x) the next state is map(x).
struct KernelBranch {
  StateFn prob;
  StateFn map;
};

// Transition kernel represented as a finite mixture of deterministic maps,
// one branch list per action.  Branch probabilities must sum to 1 at every
// state (checked to 1e-12 wherever the kernel is evaluated).
struct FiniteMixtureKernel {
  std::vector<KernelBranch> action[2];

  const std::vector<KernelBranch>& branches(int a) const { return action[a]; }
};

// Weighted sup-norm data: |r|, c <= M*w and beta * E[w(next)] <= gamma * w.
// Both bundled models are bounded, so the default is w == 1, gamma = beta.
struct WeightBound {
  double M = 1.0;
  double gamma = 0.0;
  StateFn w = [](double) { return 1.0; };

  double M_gamma() const { return M / (1.0 - gamma); }
};

// A single restless project.  Immutable after construction; safe to share
// read-only across threads.
struct BanditModel {
  StateInterval states;
  StateActionFn reward;  // r(x, a)
  StateActionFn cost;    // c(x, a)
  FiniteMixtureKernel kernel;
  double discount = 0.0;  // beta in [0, 1)
  WeightBound weight_bound;
  std::string name;  // registry name, informational

  double state_scale() const {
    double s = 1.0;
    if (std::isfinite(states.lower)) s = std::max(s, std::abs(states.lower));
    if (std::isfinite(states.upper)) s = std::max(s, std::abs(states.upper));
    return s;
  }
};

// Populates weight_bound with w == 1, gamma = beta and M = sup of |r|, c
// over a sampling grid.
void fit_default_weight_bound(BanditModel& model, int grid_points = 1001);

// Initial-state distribution as a finite list of weighted nodes.
struct InitialDistribution {
  std::vector<double> nodes;
  std::vector<double> weights;  // nonnegative, sum to 1 within 1e-12
  bool full_support = false;    // true for quadrature of a full-support law

  static InitialDistribution point_mass(double x);
  // Midpoint-rule quadrature of Uniform[a, b] with n nodes.
  static InitialDistribution uniform(double a, double b, int n);
  static InitialDistribution weighted(std::vector<double> nodes,
                                      std::vector<double> weights);

  void validate() const;
  double w_norm(const StateFn& w) const;
};

// Policy action at state x.  coin must be supplied iff the policy is
// randomized (alpha present) and x sits exactly at the threshold.
int action_of(const BanditModel& model, const ThresholdSpec& policy, double x,
              std::optional<double> coin = std::nullopt);

struct ValidationClause {
  std::string name;
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double witness_x = 0.0;
  int witness_action = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationClause> clauses;
  std::vector<std::string> warnings;

  bool ok() const {
    for (const auto& c : clauses)
      if (!c.pass) return false;
    return true;
  }
};

// Checks the standing model assumptions on a sample grid: continuity is not
// checked (not finitely checkable); cost ordering, the weight bounds and
// kernel sanity are.
ValidationReport validate_model(const BanditModel& model,
                                const std::vector<double>& sample_grid);

// Evaluates the branches of kernel[a] at x, checking the probability sum.
struct BranchValue {
  double prob;
  double next;
};
std::vector<BranchValue> kernel_at(const BanditModel& model, double x, int a);

// Uniform inclusive grid helper.
std::vector<double> linspace(double a, double b, int n);

}  // namespace restless
