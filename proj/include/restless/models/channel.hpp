#pragma once

#include "restless/engine.hpp"
#include "restless/models/ladder.hpp"

namespace restless {

// Belief-state model of transmission over a two-state Markov channel with
// flip probabilities p (good->bad) and q (bad->good), rho = 1-p-q > 0.
// Active: reward x, cost 1, next belief q+rho w.p. x and q w.p. 1-x.
// Passive: next belief q + rho*x.  States live in [0, 1].
struct ChannelParams {
  double p = 0.3;
  double q = 0.2;
  double beta = 0.9;

  double rho() const { return 1.0 - p - q; }
  double h_inf() const { return q / (p + q); }
  IterateLadder ladder() const { return {q, rho()}; }
  void validate() const;
};

BanditModel make_channel_model(const ChannelParams& p);

// Exact threshold-policy metrics.  The reset-state values F(q,.), F(q+rho,.)
// (and the G analogues) are obtained from the 2x2 linear fixed-point system
// the policy induces on the ladder.
MetricBundle channel_metrics(const ChannelParams& p, double x, double z,
                             Side side = Side::passive_at_threshold);

// Exact MP index; equal to x below q and above q+rho, x/(1-beta(q+rho-x))
// on [h_inf, q+rho), and the ladder fixed-point form in between.
double channel_index(const ChannelParams& p, double x);

}  // namespace restless
