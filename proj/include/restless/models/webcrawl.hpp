#pragma once

#include "restless/engine.hpp"
#include "restless/models/ladder.hpp"

namespace restless {

// Web-crawling project: reward x*a, cost C*a, passive drift x -> l + alpha*x,
// active reset x -> l, on the interval [l, u] with l = (1-alpha)*b and
// u = l/(1-alpha) = b.
struct WebCrawlParams {
  double alpha = 0.5;
  double b = 1.0;
  double C = 1.0;
  double beta = 0.9;

  double lower() const { return (1.0 - alpha) * b; }
  double upper() const { return b; }
  IterateLadder ladder() const { return {lower(), alpha}; }
  void validate() const;
};

BanditModel make_webcrawl_model(const WebCrawlParams& p);

// Exact threshold-policy metrics (horizon = kExactHorizon, zero bounds).
MetricBundle webcrawl_metrics(const WebCrawlParams& p, double x, double z,
                              Side side = Side::passive_at_threshold);

// Exact MP index; piecewise affine in x with breakpoints on the l-ladder.
double webcrawl_index(const WebCrawlParams& p, double x);

// beta -> 1 limit of the index (the average-reward index).
double webcrawl_avg_index(const WebCrawlParams& p, double x);

}  // namespace restless
