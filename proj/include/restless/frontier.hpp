#pragma once

#include <optional>
#include <vector>

#include "restless/verifier.hpp"

namespace restless {

struct FrontierPoint {
  double gamma = 0.0;  // resource usage G(nu0, .)
  double phi = 0.0;    // reward F(nu0, .)
  double z = 0.0;
  Side side = Side::passive_at_threshold;
  std::optional<double> alpha;
};

struct FrontierCurve {
  std::vector<FrontierPoint> points;  // gamma strictly increasing
  std::vector<double> slopes;         // per segment, nonincreasing
  double tol = 0.0;
  int horizon = 0;
};

// Threshold grid for sweeping: the reachable ladders from both interval
// endpoints (the thresholds where the resource metric can jump).
std::vector<double> default_threshold_grid(const BanditModel& model,
                                           EngineConfig cfg = {});

// Sweeps z- and z-minus policies over the grid plus the +/-inf sentinels and
// returns the upper hull of the achieved (resource, reward) points.  Refuses
// models without a passing certification report, since frontier optimality
// rests on the certified index.
FrontierCurve sweep_frontier(const BanditModel& model,
                             const InitialDistribution& nu0,
                             const std::vector<double>& threshold_grid,
                             double tol, const PCLReport& cert,
                             EngineConfig cfg = {});

struct ResourcePoint {
  double phi = 0.0;
  double z = 0.0;
  Side side = Side::passive_at_threshold;
  double alpha = 1.0;        // weight on the lower curve point
  bool same_threshold = true;  // segment joins the z- and z-minus policies
  FrontierPoint lo, hi;
};

// Optimal reward at resource level gamma, with the achieving policy mix.
ResourcePoint value_at_resource(const FrontierCurve& curve, double gamma);

enum class ShadowStatus { pass, fail, degenerate };

struct ShadowPriceCheck {
  ShadowStatus status = ShadowStatus::degenerate;
  double z = 0.0;
  double slope = 0.0;   // (F(nu0,z-) - F(nu0,z)) / (G(nu0,z-) - G(nu0,z))
  double index = 0.0;   // m(z)
  double diff = 0.0;
  double allowed = 0.0;
  double gap = 0.0;     // G(nu0,z-) - G(nu0,z)
};

// Compares the frontier segment slope at the resource jump of threshold z
// against the MP index m(z).  Requires a full-support nu0; probes whose
// G-jump sits below 10x the certified noise are reported degenerate.
ShadowPriceCheck shadow_price_check(const BanditModel& model,
                                    const InitialDistribution& nu0,
                                    double z_probe, double tol,
                                    EngineConfig cfg = {});

}  // namespace restless
