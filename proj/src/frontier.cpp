#include "restless/frontier.hpp"

#include <algorithm>
#include <cmath>

namespace restless {

std::vector<double> default_threshold_grid(const BanditModel& model,
                                           EngineConfig cfg) {
  if (!model.states.bounded())
    throw input_error("default threshold grid needs a bounded interval");
  std::vector<double> lo, hi;
  try {
    lo = reachable_set(model, model.states.lower, -1, cfg);
    hi = reachable_set(model, model.states.upper, -1, cfg);
  } catch (const resource_error&) {
    // no tractable jump-point ladder; fall back to a uniform grid
    return linspace(model.states.lower, model.states.upper, 401);
  }
  lo.insert(lo.end(), hi.begin(), hi.end());
  std::sort(lo.begin(), lo.end());
  lo.erase(std::unique(lo.begin(), lo.end(),
                       [&](double a, double b) {
                         return std::abs(a - b) <=
                                1e-12 * model.state_scale();
                       }),
           lo.end());
  return lo;
}

FrontierCurve sweep_frontier(const BanditModel& model,
                             const InitialDistribution& nu0,
                             const std::vector<double>& threshold_grid,
                             double tol, const PCLReport& cert,
                             EngineConfig cfg) {
  if (!cert.passed())
    throw input_error(
        "frontier sweep refused: the model's certification report did not "
        "pass");
  nu0.validate();
  const int k = k_for_tolerance(model, tol);

  std::vector<double> grid = threshold_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // sweep tasks write disjoint slots, so the point list does not depend on
  // the parallel degree; hull construction below is a serial reduction
  std::vector<std::pair<double, Side>> policies;
  policies.emplace_back(kPlusInf, Side::passive_at_threshold);   // never active
  policies.emplace_back(kMinusInf, Side::passive_at_threshold);  // always
  for (double z : grid) {
    if (!std::isfinite(z)) continue;
    policies.emplace_back(z, Side::passive_at_threshold);
    policies.emplace_back(z, Side::active_at_threshold);
  }
  std::vector<FrontierPoint> pts(policies.size());
  parallel_for(policies.size(), cfg.jobs, [&](std::size_t i) {
    const auto [z, side] = policies[i];
    auto b = distribution_metrics(model, nu0,
                                  ThresholdSpec{z, side, std::nullopt}, k, cfg);
    pts[i] = {b.G, b.F, z, side, std::nullopt};
  });

  // sort by gamma, tie-break on phi descending so dominated twins drop out
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    if (a.gamma != b.gamma) return a.gamma < b.gamma;
    return a.phi > b.phi;
  });

  // upper hull, monotone chain
  const double scale = 1e-12 * (1.0 + std::abs(pts.back().gamma));
  std::vector<FrontierPoint> hull;
  for (const auto& p : pts) {
    if (!hull.empty() && std::abs(p.gamma - hull.back().gamma) <= scale)
      continue;  // same gamma; the phi-descending sort kept the best first
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.gamma - a.gamma) * (p.phi - a.phi) -
                           (p.gamma - a.gamma) * (b.phi - a.phi);
      if (cross >= -1e-12 * std::max(1.0, std::abs(p.phi)))
        hull.pop_back();  // b is below (or on) chord a-p
      else
        break;
    }
    hull.push_back(p);
  }

  FrontierCurve curve;
  curve.points = std::move(hull);
  curve.tol = tol;
  curve.horizon = k;
  curve.slopes.reserve(curve.points.size() - 1);
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& a = curve.points[i];
    const auto& b = curve.points[i + 1];
    curve.slopes.push_back((b.phi - a.phi) / (b.gamma - a.gamma));
  }
  return curve;
}

ResourcePoint value_at_resource(const FrontierCurve& curve, double gamma) {
  if (curve.points.empty()) throw input_error("empty frontier curve");
  const double lo = curve.points.front().gamma;
  const double hi = curve.points.back().gamma;
  if (gamma < lo || gamma > hi)
    throw domain_error("resource level " + std::to_string(gamma) +
                       " outside the achievable range [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  auto it = std::lower_bound(
      curve.points.begin(), curve.points.end(), gamma,
      [](const FrontierPoint& p, double g) { return p.gamma < g; });
  ResourcePoint out;
  if (it->gamma == gamma || it == curve.points.begin()) {
    out.phi = it->phi;
    out.z = it->z;
    out.side = it->side;
    out.alpha = 1.0;
    out.lo = out.hi = *it;
    out.same_threshold = true;
    return out;
  }
  const FrontierPoint& a = *(it - 1);
  const FrontierPoint& b = *it;
  const double t = (gamma - a.gamma) / (b.gamma - a.gamma);
  out.phi = a.phi + t * (b.phi - a.phi);
  out.lo = a;
  out.hi = b;
  out.alpha = 1.0 - t;
  out.same_threshold = a.z == b.z;
  out.z = a.z;
  out.side = a.side;
  return out;
}

ShadowPriceCheck shadow_price_check(const BanditModel& model,
                                    const InitialDistribution& nu0,
                                    double z_probe, double tol,
                                    EngineConfig cfg) {
  if (!nu0.full_support)
    throw input_error(
        "shadow price check needs a full-support initial distribution");
  ShadowPriceCheck out;
  out.z = z_probe;
  const int k = k_for_tolerance(model, std::min(tol / 10.0, 1e-9));
  auto right = distribution_metrics(model, nu0,
                                    ThresholdSpec::z_policy(z_probe), k, cfg);
  auto left = distribution_metrics(
      model, nu0, ThresholdSpec::z_minus_policy(z_probe), k, cfg);
  out.gap = left.G - right.G;
  const double g_noise = left.G_err + right.G_err;
  if (out.gap < 10.0 * g_noise) {
    out.status = ShadowStatus::degenerate;
    return out;
  }
  out.slope = (left.F - right.F) / out.gap;
  const auto mi = mp_index_at(model, z_probe, k, cfg);
  out.index = mi.m;
  out.diff = std::abs(out.slope - out.index);
  out.allowed = tol + mi.err +
                (left.F_err + right.F_err +
                 std::abs(out.slope) * g_noise) /
                    out.gap;
  out.status = out.diff <= out.allowed ? ShadowStatus::pass : ShadowStatus::fail;
  return out;
}

}  // namespace restless
