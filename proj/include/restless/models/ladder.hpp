#pragma once

#include <cmath>
#include <optional>

#include "restless/types.hpp"

namespace restless {

// Iterate family of an affine contraction h(x) = a + r*x with r in (0,1),
// attracting fixed point a/(1-r).  Covers both bundled models (web crawl:
// h = l + alpha*x; channel: h = q + rho*x).
//
// Small iterate counts are evaluated by direct iteration with exactly the
// kernel's arithmetic, so orbit states compare against thresholds the same
// way in the closed forms and in the value-iteration engine; beyond
// kDirectSteps the geometric closed form takes over (by then the orbit is
// inside the fixed point's rounding neighborhood and r^t would underflow
// stepwise error anyway).
struct IterateLadder {
  double a;
  double r;

  static constexpr long kDirectSteps = 4096;

  double fixed_point() const { return a / (1.0 - r); }

  double iterate(double x, long t) const {
    if (t <= kDirectSteps) {
      for (long i = 0; i < t; ++i) x = a + r * x;
      return x;
    }
    const double fp = fixed_point();
    return fp - (fp - x) * std::pow(r, static_cast<double>(t));
  }

  double backward(double z, long t) const {
    const double fp = fixed_point();
    return fp - (fp - z) * std::pow(r, -static_cast<double>(t));
  }

  // Smallest t >= 0 with h_t(x) > z (strict) or h_t(x) >= z (non-strict);
  // nullopt if the orbit never qualifies.  A log-based candidate index is
  // verified and adjusted by direct comparison.
  std::optional<long> hit_time(double x, double z, bool strict) const {
    auto ok = [&](double y) { return strict ? y > z : y >= z; };
    if (ok(x)) return 0;
    const double fp = fixed_point();
    if (x >= fp) return std::nullopt;  // orbit never increases past x
    // climbing toward the fixed point from below
    if (strict ? z >= fp : z > fp) return std::nullopt;
    const double gap_z = fp - z;
    const double gap_x = fp - x;
    // gap_z == 0 only in the non-strict z == fixed-point case, where the
    // orbit approaches but never attains the target
    if (gap_z <= 0.0) return std::nullopt;
    long t = 1;
    if (gap_z < gap_x)
      t = std::max(1L, static_cast<long>(std::floor(
                           std::log(gap_z / gap_x) / std::log(r))) -
                           2);
    // walk forward from the candidate; stop if the float orbit stalls at
    // its own fixed point below the target
    double y = iterate(x, t);
    while (!ok(y)) {
      const double next = a + r * y;
      if (!(next > y)) return std::nullopt;
      y = next;
      ++t;
    }
    while (t > 0 && ok(iterate(x, t - 1))) --t;
    return t;
  }
};

}  // namespace restless
