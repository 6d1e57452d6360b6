#include "restless/models/webcrawl.hpp"

#include <cmath>

namespace restless {

void WebCrawlParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw domain_error("webcrawl: alpha must be in (0,1)");
  if (!(b > 0.0)) throw domain_error("webcrawl: b must be > 0");
  if (!(C > 0.0)) throw domain_error("webcrawl: C must be > 0");
  if (!(beta >= 0.0 && beta < 1.0))
    throw domain_error("webcrawl: beta must be in [0,1)");
}

BanditModel make_webcrawl_model(const WebCrawlParams& p) {
  p.validate();
  const double l = p.lower(), u = p.upper(), alpha = p.alpha, C = p.C;
  BanditModel m{
      StateInterval(l, u),
      [](double x, int a) { return a ? x : 0.0; },
      [C](double, int a) { return a ? C : 0.0; },
      {},
      p.beta,
      {},
      "webcrawl"};
  m.kernel.action[0] = {{[](double) { return 1.0; },
                         [l, alpha](double x) { return l + alpha * x; }}};
  m.kernel.action[1] = {
      {[](double) { return 1.0; }, [l](double) { return l; }}};
  m.weight_bound.M = std::max(u, C);
  m.weight_bound.gamma = p.beta;
  return m;
}

namespace {

struct ResetValues {
  double F, G;  // metrics at the reset state l
};

// Metrics at one state under the fixed threshold policy, given the
// reset-state values: climb sigma steps, then collect at h_sigma and
// restart from l.
double state_value(const WebCrawlParams& p, const IterateLadder& lad,
                   double x, double z, bool strict, double reset_value,
                   bool resource) {
  auto sigma = lad.hit_time(x, z, strict);
  if (!sigma) return 0.0;
  const double pw = std::pow(p.beta, double(*sigma));
  const double top = resource ? p.C : lad.iterate(x, *sigma);
  return pw * (top + p.beta * reset_value);
}

ResetValues reset_values(const WebCrawlParams& p, const IterateLadder& lad,
                         double z, bool strict) {
  auto tau = lad.hit_time(p.lower(), z, strict);
  if (!tau) return {0.0, 0.0};
  const double pw = std::pow(p.beta, double(*tau));
  const double denom = 1.0 - pw * p.beta;
  return {pw * lad.iterate(p.lower(), *tau) / denom, pw * p.C / denom};
}

}  // namespace

MetricBundle webcrawl_metrics(const WebCrawlParams& p, double x, double z,
                              Side side) {
  p.validate();
  if (!(x >= p.lower() && x <= p.upper()))
    throw domain_error("webcrawl: x outside [l, u]");
  const bool strict = side == Side::passive_at_threshold;
  const IterateLadder lad = p.ladder();
  const ResetValues rv = reset_values(p, lad, z, strict);

  MetricBundle b;
  b.horizon = kExactHorizon;
  b.F = state_value(p, lad, x, z, strict, rv.F, false);
  b.G = state_value(p, lad, x, z, strict, rv.G, true);
  const double hx = lad.iterate(x, 1);
  b.f = x + p.beta * rv.F - p.beta * state_value(p, lad, hx, z, strict, rv.F, false);
  b.g = p.C + p.beta * rv.G - p.beta * state_value(p, lad, hx, z, strict, rv.G, true);
  return b;
}

double webcrawl_index(const WebCrawlParams& p, double x) {
  p.validate();
  const double l = p.lower(), u = p.upper();
  if (!(x >= l && x <= u)) throw domain_error("webcrawl: x outside [l, u]");
  const IterateLadder lad = p.ladder();
  auto piece = lad.hit_time(l, x, true);  // t with h_{t-1}(l) <= x < h_t(l)
  if (!piece) return u / p.C;             // limit piece at the top state
  const long t = *piece;
  const double pw = std::pow(p.beta, double(t));
  const double Ft = pw * lad.iterate(l, t) / (1.0 - pw * p.beta);
  const double Gt = pw * p.C / (1.0 - pw * p.beta);
  const double hx = lad.iterate(x, 1);
  return (x - p.beta * hx + p.beta * (1.0 - p.beta) * Ft) /
         ((1.0 - p.beta) * (p.C + p.beta * Gt));
}

double webcrawl_avg_index(const WebCrawlParams& p, double x) {
  p.validate();
  const double l = p.lower(), u = p.upper();
  if (!(x >= l && x <= u)) throw domain_error("webcrawl: x outside [l, u]");
  const IterateLadder lad = p.ladder();
  auto piece = lad.hit_time(l, x, true);
  if (!piece) return u / p.C;
  const long t = *piece;
  const double hx = lad.iterate(x, 1);
  return (double(t + 1) * (x - hx) + lad.iterate(l, t)) / p.C;
}

}  // namespace restless
