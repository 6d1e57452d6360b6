#include "restless/models/channel.hpp"

#include <cmath>

namespace restless {

void ChannelParams::validate() const {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("channel: p must be in (0,1)");
  if (!(q > 0.0 && q < 1.0)) throw domain_error("channel: q must be in (0,1)");
  if (!(rho() > 0.0)) throw domain_error("channel: needs 1 - p - q > 0");
  if (!(beta >= 0.0 && beta < 1.0))
    throw domain_error("channel: beta must be in [0,1)");
}

BanditModel make_channel_model(const ChannelParams& p) {
  p.validate();
  const double q = p.q, rho = p.rho();
  BanditModel m{
      StateInterval(0.0, 1.0),
      [](double x, int a) { return a ? x : 0.0; },
      [](double, int a) { return a ? 1.0 : 0.0; },
      {},
      p.beta,
      {},
      "channel"};
  m.kernel.action[0] = {{[](double) { return 1.0; },
                         [q, rho](double x) { return q + rho * x; }}};
  m.kernel.action[1] = {
      {[](double x) { return x; }, [q, rho](double) { return q + rho; }},
      {[](double x) { return 1.0 - x; }, [q](double) { return q; }}};
  m.weight_bound.M = 1.0;
  m.weight_bound.gamma = p.beta;
  return m;
}

namespace {

struct ResetValues {
  double at_q, at_qr;  // metric values at the reset states q and q+rho
};

// Per-state value under the fixed threshold policy given the reset values:
// climb sigma steps passively, then activate at y = h_sigma(x) collecting
// `top(y)` and branching to q+rho w.p. y, q w.p. 1-y.
double state_value(const ChannelParams& p, const IterateLadder& lad, double x,
                   double z, bool strict, const ResetValues& rv,
                   bool resource) {
  auto sigma = lad.hit_time(x, z, strict);
  if (!sigma) return 0.0;
  const double pw = std::pow(p.beta, double(*sigma));
  const double y = lad.iterate(x, *sigma);
  const double top = resource ? 1.0 : y;
  return pw * (top + p.beta * (y * rv.at_qr + (1.0 - y) * rv.at_q));
}

// Solves the linear fixed-point system for the reset-state values.
ResetValues reset_values(const ChannelParams& p, const IterateLadder& lad,
                         double z, bool strict, bool resource) {
  const double q = p.q, qr = p.q + p.rho(), beta = p.beta;
  auto sq = lad.hit_time(q, z, strict);
  auto sr = lad.hit_time(qr, z, strict);
  if (!sr) return {0.0, 0.0};  // neither reset state ever activates
  const double Ar = std::pow(beta, double(*sr));
  const double yr = lad.iterate(qr, *sr);
  const double tr = resource ? 1.0 : yr;
  if (!sq) {
    // value at q is 0; one unknown remains
    const double vqr = Ar * tr / (1.0 - Ar * beta * yr);
    return {0.0, vqr};
  }
  const double Aq = std::pow(beta, double(*sq));
  const double yq = lad.iterate(q, *sq);
  const double tq = resource ? 1.0 : yq;
  // [1 - Aq b (1-yq)] vq - [Aq b yq] vqr = Aq tq
  // [-Ar b (1-yr)] vq + [1 - Ar b yr] vqr = Ar tr
  const double a11 = 1.0 - Aq * beta * (1.0 - yq), a12 = -Aq * beta * yq;
  const double a21 = -Ar * beta * (1.0 - yr), a22 = 1.0 - Ar * beta * yr;
  const double b1 = Aq * tq, b2 = Ar * tr;
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-300)
    throw numeric_error("channel reset-value system is singular");
  return {(b1 * a22 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det};
}

}  // namespace

MetricBundle channel_metrics(const ChannelParams& p, double x, double z,
                             Side side) {
  p.validate();
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("channel: x outside [0,1]");
  const bool strict = side == Side::passive_at_threshold;
  const IterateLadder lad = p.ladder();
  const ResetValues rF = reset_values(p, lad, z, strict, false);
  const ResetValues rG = reset_values(p, lad, z, strict, true);

  MetricBundle b;
  b.horizon = kExactHorizon;
  b.F = state_value(p, lad, x, z, strict, rF, false);
  b.G = state_value(p, lad, x, z, strict, rG, true);
  const double hx = lad.iterate(x, 1);
  b.f = x - p.beta * (state_value(p, lad, hx, z, strict, rF, false) -
                      x * rF.at_qr - (1.0 - x) * rF.at_q);
  b.g = 1.0 - p.beta * (state_value(p, lad, hx, z, strict, rG, true) -
                        x * rG.at_qr - (1.0 - x) * rG.at_q);
  return b;
}

double channel_index(const ChannelParams& p, double x) {
  p.validate();
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("channel: x outside [0,1]");
  const double qr = p.q + p.rho();
  if (x < p.q || x >= qr) return x;
  if (x >= p.h_inf()) return x / (1.0 - p.beta * (qr - x));
  const MetricBundle b = channel_metrics(p, x, x, Side::passive_at_threshold);
  return b.f / b.g;
}

}  // namespace restless
