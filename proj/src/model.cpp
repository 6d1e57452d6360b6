#include "restless/model.hpp"

#include <algorithm>
#include <cmath>

namespace restless {

std::vector<double> linspace(double a, double b, int n) {
  if (n <= 0) return {};
  if (n == 1) return {a};
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i)
    xs[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  xs.back() = b;
  return xs;
}

std::vector<BranchValue> kernel_at(const BanditModel& model, double x, int a) {
  const auto& branches = model.kernel.branches(a);
  if (branches.empty())
    throw domain_error("kernel has no branches for action " +
                       std::to_string(a));
  std::vector<BranchValue> out;
  out.reserve(branches.size());
  double sum = 0.0;
  for (const auto& br : branches) {
    double p = br.prob(x);
    if (p < -1e-12 || p > 1.0 + 1e-12)
      throw domain_error("kernel branch probability outside [0,1]");
    sum += p;
    out.push_back({p, br.map(x)});
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw domain_error("kernel branch probabilities sum to " +
                       std::to_string(sum) + " at x=" + std::to_string(x));
  return out;
}

void fit_default_weight_bound(BanditModel& model, int grid_points) {
  double M = 0.0;
  if (!model.states.bounded()) {
    // Unbounded intervals with the default w == 1 are untested territory;
    // validate_model surfaces this as a warning.
    M = 1.0;
  } else {
    for (double x :
         linspace(model.states.lower, model.states.upper, grid_points)) {
      for (int a = 0; a < 2; ++a) {
        M = std::max(M, std::abs(model.reward(x, a)));
        M = std::max(M, model.cost(x, a));
      }
    }
  }
  model.weight_bound.M = std::max(M, 1e-300);
  model.weight_bound.gamma = model.discount;
  model.weight_bound.w = [](double) { return 1.0; };
}

InitialDistribution InitialDistribution::point_mass(double x) {
  InitialDistribution d;
  d.nodes = {x};
  d.weights = {1.0};
  return d;
}

InitialDistribution InitialDistribution::uniform(double a, double b, int n) {
  if (!(a < b) || n <= 0)
    throw domain_error("uniform distribution needs a < b and n > 0");
  InitialDistribution d;
  d.nodes.resize(n);
  d.weights.assign(n, 1.0 / n);
  for (int i = 0; i < n; ++i)
    d.nodes[i] = a + (b - a) * (i + 0.5) / n;
  d.full_support = true;
  return d;
}

InitialDistribution InitialDistribution::weighted(std::vector<double> nodes,
                                                  std::vector<double> weights) {
  InitialDistribution d;
  d.nodes = std::move(nodes);
  d.weights = std::move(weights);
  d.validate();
  return d;
}

void InitialDistribution::validate() const {
  if (nodes.empty() || nodes.size() != weights.size())
    throw input_error("initial distribution needs matching nodes/weights");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw input_error("initial distribution weight < 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw input_error("initial distribution weights sum to " +
                      std::to_string(sum));
}

double InitialDistribution::w_norm(const StateFn& w) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * w(nodes[i]);
  return s;
}

int action_of(const BanditModel& model, const ThresholdSpec& policy, double x,
              std::optional<double> coin) {
  if (!model.states.contains(x))
    throw domain_error("state " + std::to_string(x) +
                       " outside the state interval");
  const bool at_threshold = policy.alpha.has_value() && x == policy.z;
  if (at_threshold != coin.has_value())
    throw domain_error(
        at_threshold
            ? "randomized policy at the threshold state needs a coin"
            : "coin supplied where the action is deterministic");
  if (at_threshold) return *coin < *policy.alpha ? 0 : 1;
  if (policy.alpha.has_value()) return x > policy.z ? 1 : 0;
  return policy.deterministic().action(x);
}

ValidationReport validate_model(const BanditModel& model,
                                const std::vector<double>& sample_grid) {
  if (sample_grid.empty())
    throw input_error("validate_model needs a nonempty sample grid");
  for (double x : sample_grid)
    if (!model.states.contains(x))
      throw domain_error("sample grid point outside the state interval");

  ValidationReport rep;
  const auto& wb = model.weight_bound;

  ValidationClause disc;
  disc.name = "discount_and_gamma";
  disc.pass = model.discount >= 0.0 && model.discount < 1.0 &&
              model.discount <= wb.gamma && wb.gamma < 1.0;
  if (!disc.pass) disc.message = "needs 0 <= beta <= gamma < 1";
  rep.clauses.push_back(disc);

  ValidationClause cost;   // 0 <= c(x,0) < c(x,1)
  cost.name = "cost_ordering";
  ValidationClause bound;  // max(|r|, c) <= M w
  bound.name = "primitive_bound";
  ValidationClause drift;  // beta * E[w(next)] <= gamma * w
  drift.name = "weight_drift";
  ValidationClause kern;   // probs sum to 1, maps stay inside
  kern.name = "kernel";

  for (double x : sample_grid) {
    double c0 = model.cost(x, 0), c1 = model.cost(x, 1);
    double margin = std::min(c0, c1 - c0);
    if (margin < cost.worst_margin) {
      cost.worst_margin = margin;
      cost.witness_x = x;
    }
    if (!(c0 >= 0.0 && c0 < c1)) {
      cost.pass = false;
      cost.message = "cost ordering 0 <= c(x,0) < c(x,1) violated";
    }

    double wx = wb.w(x);
    for (int a = 0; a < 2; ++a) {
      double lhs = std::max(std::abs(model.reward(x, a)), model.cost(x, a));
      double m = wb.M * wx - lhs;
      if (m < bound.worst_margin) {
        bound.worst_margin = m;
        bound.witness_x = x;
        bound.witness_action = a;
      }
      if (m < -1e-9 * std::max(1.0, wb.M * wx)) {
        bound.pass = false;
        bound.message = "max(|r|, c) <= M w violated";
      }

      try {
        auto branches = kernel_at(model, x, a);
        double wtilde = 0.0;
        for (const auto& b : branches) {
          if (!model.states.contains(b.next) &&
              std::abs(b.prob) > 0.0) {
            kern.pass = false;
            kern.witness_x = x;
            kern.witness_action = a;
            kern.message = "kernel map leaves the state interval";
          }
          wtilde += b.prob * wb.w(b.next);
        }
        double dm = wb.gamma * wx - model.discount * wtilde;
        if (dm < drift.worst_margin) {
          drift.worst_margin = dm;
          drift.witness_x = x;
          drift.witness_action = a;
        }
        if (dm < -1e-9 * std::max(1.0, wx)) {
          drift.pass = false;
          drift.message = "beta * E[w(next)] <= gamma * w violated";
        }
      } catch (const domain_error& e) {
        kern.pass = false;
        kern.witness_x = x;
        kern.witness_action = a;
        kern.message = e.what();
      }
    }
  }

  rep.clauses.push_back(cost);
  rep.clauses.push_back(bound);
  rep.clauses.push_back(drift);
  rep.clauses.push_back(kern);

  if (!model.states.bounded())
    rep.warnings.push_back(
        "unbounded state interval: the numeric engine is untested for "
        "genuinely unbounded states with nontrivial w");
  return rep;
}

}  // namespace restless
