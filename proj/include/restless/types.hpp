#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace restless {

// Thresholds live on the extended real line; +/-infinity are the
// "never active" / "always active" sentinels.
inline constexpr double kPlusInf = std::numeric_limits<double>::infinity();
inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct infeasibility_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed (possibly unbounded) state interval [lower, upper].
struct StateInterval {
  double lower;
  double upper;

  StateInterval(double lo, double hi) : lower(lo), upper(hi) {
    if (!(lower < upper))
      throw domain_error("state interval needs lower < upper");
  }
  bool contains(double x) const { return lower <= x && x <= upper; }
  bool bounded() const { return std::isfinite(lower) && std::isfinite(upper); }
};

// Which side of the threshold is active when x == z.
//   passive_at_threshold: active region {x > z}   (the "z" policy)
//   active_at_threshold:  active region {x >= z}  (the "z-minus" policy)
enum class Side { passive_at_threshold, active_at_threshold };

inline const char* side_name(Side s) {
  return s == Side::passive_at_threshold ? "right" : "left";
}

// Deterministic threshold policy: the piece of ThresholdSpec the
// evaluation engine consumes (no randomization).
struct ThresholdPolicy {
  double z = kMinusInf;
  Side side = Side::passive_at_threshold;

  int action(double x) const {
    return side == Side::passive_at_threshold ? (x > z ? 1 : 0)
                                              : (x >= z ? 1 : 0);
  }
};

// Threshold policy spec, optionally randomized at the threshold state:
// with alpha present, the policy at x == z is passive with probability
// alpha (alpha = 1 recovers the z-policy, alpha = 0 the z-minus policy).
struct ThresholdSpec {
  double z = kMinusInf;
  Side side = Side::passive_at_threshold;
  std::optional<double> alpha;

  static ThresholdSpec z_policy(double z) {
    return {z, Side::passive_at_threshold, std::nullopt};
  }
  static ThresholdSpec z_minus_policy(double z) {
    return {z, Side::active_at_threshold, std::nullopt};
  }
  static ThresholdSpec randomized(double z, double a) {
    if (!std::isfinite(z))
      throw domain_error("randomized threshold needs a finite z");
    if (a < 0.0 || a > 1.0) throw domain_error("alpha must be in [0,1]");
    return {z, Side::passive_at_threshold, a};
  }

  ThresholdPolicy deterministic() const { return {z, side}; }
};

}  // namespace restless
