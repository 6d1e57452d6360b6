#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "restless/models/channel.hpp"
#include "restless/models/reset.hpp"
#include "restless/models/webcrawl.hpp"

using namespace restless;

namespace {
const WebCrawlParams kWeb{0.5, 1.0, 1.0, 0.9};
const ChannelParams kChan{0.3, 0.2, 0.9};  // rho = 0.5, h_inf = 0.4
}  // namespace

TEST_CASE("iterate ladder") {
  IterateLadder lad{0.5, 0.5};  // h(x) = 0.5 + 0.5x, fixed point 1
  CHECK(lad.iterate(0.5, 0) == 0.5);
  CHECK(lad.iterate(0.5, 1) == doctest::Approx(0.75));
  CHECK(lad.backward(0.75, 1) == doctest::Approx(0.5));
  CHECK(*lad.hit_time(0.5, 0.7, true) == 1);
  CHECK(*lad.hit_time(0.8, 0.7, true) == 0);
  CHECK(!lad.hit_time(0.5, 1.0, true).has_value());
  // non-strict hits at the point itself
  CHECK(*lad.hit_time(0.7, 0.7, false) == 0);
  CHECK(*lad.hit_time(0.5, 0.75, false) == 1);
  // target extremely close to the fixed point still resolves
  auto t = lad.hit_time(0.5, 1.0 - 1e-13, true);
  CHECK(t.has_value());
  CHECK(lad.iterate(0.5, *t) > 1.0 - 1e-13);
  CHECK(lad.iterate(0.5, *t - 1) <= 1.0 - 1e-13);
}

TEST_CASE("fixed points of the drift maps") {
  const double u = kWeb.upper();
  CHECK(std::abs((kWeb.lower() + kWeb.alpha * u) - u) <= 1e-14);
  const double hinf = kChan.h_inf();
  CHECK(std::abs((kChan.q + kChan.rho() * hinf) - hinf) <= 1e-14);
}

TEST_CASE("webcrawl closed forms") {
  SUBCASE("never-active threshold zeroes both metrics") {
    for (double x : {0.5, 0.8, 1.0}) {
      auto b = webcrawl_metrics(kWeb, x, 1.0);
      CHECK(b.F == 0.0);
      CHECK(b.G == 0.0);
      CHECK(b.f == doctest::Approx(x));    // f(x, u) = x
      CHECK(b.g == doctest::Approx(1.0));  // g(x, u) = C
    }
  }
  SUBCASE("frozen reset-state value") {
    auto b = webcrawl_metrics(kWeb, 0.5, 0.7);
    CHECK(b.F == doctest::Approx(0.675 / 0.19).epsilon(1e-14));
    CHECK(b.G == doctest::Approx(0.9 / 0.19).epsilon(1e-14));
  }
  SUBCASE("active states collect now and restart") {
    for (double z : {0.55, 0.7, 0.9}) {
      auto at_l = webcrawl_metrics(kWeb, 0.5, z);
      for (double x : {0.71, 0.95}) {
        if (x <= z) continue;
        auto b = webcrawl_metrics(kWeb, x, z);
        CHECK(b.F == doctest::Approx(x + 0.9 * at_l.F).epsilon(1e-13));
        CHECK(b.G == doctest::Approx(1.0 + 0.9 * at_l.G).epsilon(1e-13));
      }
    }
  }
  SUBCASE("marginal resource is positive") {
    for (double z : linspace(0.45, 1.05, 31))
      for (double x : linspace(0.5, 1.0, 21)) {
        auto b = webcrawl_metrics(kWeb, x, z);
        CHECK(b.g > 0.0);
      }
  }
}

TEST_CASE("webcrawl index") {
  CHECK(webcrawl_index(kWeb, 1.0) == doctest::Approx(1.0));  // u / C
  CHECK(webcrawl_index(kWeb, 0.5) == doctest::Approx(0.275).epsilon(1e-12));

  SUBCASE("continuity at the ladder breakpoints") {
    const IterateLadder lad = kWeb.ladder();
    for (long t = 1; t <= 30; ++t) {
      const double bp = lad.iterate(0.5, t);
      if (bp >= 1.0) break;
      const double left = webcrawl_index(kWeb, std::nextafter(bp, 0.0));
      const double right = webcrawl_index(kWeb, bp);
      CHECK(std::abs(left - right) <= 1e-10);
    }
  }
  SUBCASE("breakpoint values approach the top-state index monotonically") {
    const IterateLadder lad = kWeb.ladder();
    const double mu = webcrawl_index(kWeb, 1.0);
    double prev = -1.0;
    for (long t = 1; t <= 60; ++t) {
      const double x = std::min(lad.iterate(0.5, t), 1.0);
      const double m = webcrawl_index(kWeb, x);
      CHECK(m >= prev - 1e-12);
      prev = m;
      if (t == 60) CHECK(std::abs(m - mu) <= 1e-8);
    }
  }
  SUBCASE("index is nondecreasing on a fine grid") {
    double prev = -1.0;
    for (double x : linspace(0.5, 1.0, 401)) {
      const double m = webcrawl_index(kWeb, x);
      CHECK(m >= prev - 1e-12);
      prev = m;
    }
  }
}

TEST_CASE("webcrawl average-reward limit") {
  CHECK(webcrawl_avg_index(kWeb, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  SUBCASE("C in the denominator") {
    WebCrawlParams doubled = kWeb;
    doubled.C = 2.0;
    for (double x : {0.5, 0.7, 0.9})
      CHECK(webcrawl_avg_index(doubled, x) ==
            doctest::Approx(0.5 * webcrawl_avg_index(kWeb, x)));
  }
  SUBCASE("discounted index approaches the limit as beta -> 1") {
    WebCrawlParams nearly = kWeb;
    nearly.beta = 0.999;
    for (double x : {0.5, 0.66, 0.8, 0.97}) {
      const double limit = webcrawl_avg_index(kWeb, x);
      CHECK(std::abs(webcrawl_index(nearly, x) - limit) <=
            1e-2 * std::abs(limit));
    }
  }
}

TEST_CASE("channel closed forms by case") {
  const double beta = kChan.beta;
  SUBCASE("below q every later period is active") {
    // z < q: G(x,z) = (beta + (1-beta) 1_{x>z}) / (1-beta)
    for (double x : {0.05, 0.3, 0.9}) {
      auto b = channel_metrics(kChan, x, 0.1);
      const double expect_G =
          (beta + (1 - beta) * (x > 0.1 ? 1.0 : 0.0)) / (1 - beta);
      CHECK(b.G == doctest::Approx(expect_G).epsilon(1e-12));
      const double rho = kChan.rho(), q = kChan.q;
      const double expect_F =
          (beta * (q + (1 - beta) * rho * x) +
           (1 - beta) * (1 - beta * rho) * x * (x > 0.1 ? 1.0 : 0.0)) /
          ((1 - beta) * (1 - beta * rho));
      CHECK(b.F == doctest::Approx(expect_F).epsilon(1e-12));
      CHECK(b.f == doctest::Approx(x).epsilon(1e-12));
      CHECK(b.g == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("between h_inf and q+rho the passive zone is absorbing") {
    // frozen: G(0.5, 0.45) = 0.82 / 0.37
    auto b = channel_metrics(kChan, 0.5, 0.45);
    CHECK(b.G == doctest::Approx(0.82 / 0.37).epsilon(1e-13));
    CHECK(b.F == doctest::Approx(0.5 / 0.37).epsilon(1e-13));
    auto passive = channel_metrics(kChan, 0.3, 0.45);
    CHECK(passive.F == 0.0);
    CHECK(passive.G == 0.0);
  }
  SUBCASE("above q+rho only the first step can be active") {
    for (double x : {0.2, 0.8}) {
      auto b = channel_metrics(kChan, x, 0.75);
      CHECK(b.F == doctest::Approx(x > 0.75 ? x : 0.0));
      CHECK(b.G == doctest::Approx(x > 0.75 ? 1.0 : 0.0));
      CHECK(b.f == doctest::Approx(x));
      CHECK(b.g == doctest::Approx(1.0));
    }
  }
  SUBCASE("marginal resource stays above 1 - beta") {
    for (double z : linspace(-0.05, 1.05, 45))
      for (double x : linspace(0.0, 1.0, 41)) {
        auto b = channel_metrics(kChan, x, z);
        CHECK(b.g >= (1 - beta) - 1e-12);
      }
  }
}

TEST_CASE("channel index") {
  CHECK(channel_index(kChan, 0.1) == doctest::Approx(0.1));
  CHECK(channel_index(kChan, 0.5) ==
        doctest::Approx(0.5 / 0.82).epsilon(1e-13));
  CHECK(channel_index(kChan, 0.9) == doctest::Approx(0.9));

  SUBCASE("continuity at the case boundaries") {
    for (double bp : {kChan.q, kChan.h_inf(), kChan.q + kChan.rho()}) {
      const double lo = channel_index(kChan, std::nextafter(bp, 0.0));
      const double hi = channel_index(kChan, bp);
      CHECK(std::abs(lo - hi) <= 1e-8);
    }
  }
  SUBCASE("index is nondecreasing on a fine grid") {
    double prev = -1.0;
    for (double x : linspace(0.0, 1.0, 401)) {
      const double m = channel_index(kChan, x);
      CHECK(m >= prev - 1e-10);
      prev = m;
    }
  }
}

TEST_CASE("oracle equivalence: closed forms vs the value-iteration engine") {
  SUBCASE("webcrawl") {
    auto m = make_webcrawl_model(kWeb);
    const double Mg = m.weight_bound.M_gamma();
    for (double z : {0.45, 0.62, 0.85, 1.0})
      for (double x : {0.5, 0.7, 1.0})
        for (int k : {10, 60, 200}) {
          auto exact = webcrawl_metrics(kWeb, x, z);
          auto num = k_horizon_metrics(m, x, ThresholdSpec::z_policy(z), k);
          const double tol = Mg * std::pow(0.9, k);
          CHECK(std::abs(exact.F - num.F) <= tol);
          CHECK(std::abs(exact.G - num.G) <= tol);
          CHECK(std::abs(exact.f - num.f) <= 2 * tol);
          CHECK(std::abs(exact.g - num.g) <= 2 * tol);
        }
  }
  SUBCASE("channel, all four case regions and both sides") {
    auto m = make_channel_model(kChan);
    const double Mg = m.weight_bound.M_gamma();
    for (double z : {0.1, 0.2, 0.3, 0.39, 0.45, 0.7, 0.9})
      for (Side side : {Side::passive_at_threshold, Side::active_at_threshold})
        for (double x : {0.0, 0.15, 0.2, 0.33, 0.5, 0.7, 1.0})
          for (int k : {40, 160}) {
            auto exact = channel_metrics(kChan, x, z, side);
            auto num =
                k_horizon_metrics(m, x, ThresholdSpec{z, side, std::nullopt}, k);
            const double tol = Mg * std::pow(0.9, k);
            CHECK(std::abs(exact.F - num.F) <= tol);
            CHECK(std::abs(exact.G - num.G) <= tol);
            CHECK(std::abs(exact.f - num.f) <= 2 * tol);
            CHECK(std::abs(exact.g - num.g) <= 2 * tol);
          }
  }
  SUBCASE("webcrawl index vs the numeric index") {
    auto m = make_webcrawl_model(kWeb);
    for (double x : linspace(0.5, 1.0, 21)) {
      auto v = mp_index_at_tol(m, x, 1e-9);
      CHECK(std::abs(v.m - webcrawl_index(kWeb, x)) <= v.err);
    }
  }
  SUBCASE("channel index vs the numeric index") {
    auto m = make_channel_model(kChan);
    for (double x : linspace(0.0, 1.0, 21)) {
      auto v = mp_index_at_tol(m, x, 1e-9);
      CHECK(std::abs(v.m - channel_index(kChan, x)) <= v.err + 1e-9);
    }
  }
}

TEST_CASE("jump-ratio characterization of the webcrawl index") {
  // (F(x,x) - F(x,x-)) / (G(x,x) - G(x,x-)) equals m(x)
  for (double x : linspace(0.52, 0.98, 17)) {
    auto right = webcrawl_metrics(kWeb, x, x, Side::passive_at_threshold);
    auto left = webcrawl_metrics(kWeb, x, x, Side::active_at_threshold);
    const double dG = right.G - left.G;
    REQUIRE(dG != 0.0);
    CHECK((right.F - left.F) / dG ==
          doctest::Approx(webcrawl_index(kWeb, x)).epsilon(1e-10));
  }
}

TEST_CASE("reset counterexample has a negative marginal resource") {
  auto m = make_reset_model({});
  // oracle: long-horizon recursion at the witness pair
  auto b = k_horizon_metrics(m, 0.6, ThresholdSpec::z_policy(0.5), 200);
  CHECK(b.g == doctest::Approx(-0.8).epsilon(1e-9));
  // the two forced continuations behind it
  ThresholdEvaluator ev(m, ThresholdPolicy{0.5, Side::passive_at_threshold});
  auto [F1, G1] = ev.forced(0.6, 1, 200);
  auto [F0, G0] = ev.forced(0.6, 0, 200);
  (void)F1;
  (void)F0;
  CHECK(G1 == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(G0 == doctest::Approx(0.9).epsilon(1e-9));
}

#include "restless/rng.hpp"

// Property check across the parameter space: the closed forms and the
// value-iteration engine must agree within the truncation bounds for
// generic parameters, states and thresholds, on both policy sides.
TEST_CASE("closed forms agree with the engine across random parameters") {
  SUBCASE("webcrawl") {
    CounterRng rng(77, 0);
    for (int trial = 0; trial < 10; ++trial) {
      WebCrawlParams wp;
      wp.alpha = 0.1 + 0.8 * rng.uniform();
      wp.b = 0.5 + 2.0 * rng.uniform();
      wp.C = 0.25 + 2.0 * rng.uniform();
      wp.beta = 0.3 + 0.62 * rng.uniform();
      auto m = make_webcrawl_model(wp);
      const int k = k_for_tolerance(m, 1e-9);
      const double tol = m.weight_bound.M_gamma() *
                         std::pow(m.weight_bound.gamma, k);
      for (int i = 0; i < 6; ++i) {
        const double span = wp.upper() - wp.lower();
        const double x = wp.lower() + span * rng.uniform();
        const double z = wp.lower() - 0.1 + (span + 0.2) * rng.uniform();
        for (Side side :
             {Side::passive_at_threshold, Side::active_at_threshold}) {
          auto exact = webcrawl_metrics(wp, x, z, side);
          auto num =
              k_horizon_metrics(m, x, ThresholdSpec{z, side, std::nullopt}, k);
          CHECK(std::abs(exact.F - num.F) <= tol);
          CHECK(std::abs(exact.G - num.G) <= tol);
          CHECK(std::abs(exact.f - num.f) <= 2 * tol);
          CHECK(std::abs(exact.g - num.g) <= 2 * tol);
        }
        auto v = mp_index_at(m, x, k);
        CHECK(std::abs(v.m - webcrawl_index(wp, x)) <= v.err);
      }
    }
  }
  SUBCASE("channel") {
    CounterRng rng(78, 0);
    for (int trial = 0; trial < 10; ++trial) {
      ChannelParams cp;
      cp.q = 0.05 + 0.5 * rng.uniform();
      cp.p = 0.05 + (1.0 - cp.q - 0.1) * rng.uniform();
      cp.beta = 0.3 + 0.62 * rng.uniform();
      auto m = make_channel_model(cp);
      const int k = k_for_tolerance(m, 1e-9);
      const double tol = m.weight_bound.M_gamma() *
                         std::pow(m.weight_bound.gamma, k);
      for (int i = 0; i < 6; ++i) {
        const double x = rng.uniform();
        const double z = -0.05 + 1.1 * rng.uniform();
        for (Side side :
             {Side::passive_at_threshold, Side::active_at_threshold}) {
          auto exact = channel_metrics(cp, x, z, side);
          auto num =
              k_horizon_metrics(m, x, ThresholdSpec{z, side, std::nullopt}, k);
          CHECK(std::abs(exact.F - num.F) <= tol);
          CHECK(std::abs(exact.G - num.G) <= tol);
          CHECK(std::abs(exact.f - num.f) <= 2 * tol);
          CHECK(std::abs(exact.g - num.g) <= 2 * tol);
        }
        auto v = mp_index_at(m, x, k);
        CHECK(std::abs(v.m - channel_index(cp, x)) <= v.err + 1e-9);
      }
    }
  }
}

// The resource metric is nonincreasing in the threshold.
TEST_CASE("resource metric falls as the threshold rises") {
  SUBCASE("webcrawl closed form") {
    CounterRng rng(79, 0);
    for (int trial = 0; trial < 5; ++trial) {
      const double x = 0.5 + 0.5 * rng.uniform();
      double prev = kPlusInf;
      for (double z : linspace(0.4, 1.1, 71)) {
        const double G = webcrawl_metrics(kWeb, x, z).G;
        CHECK(G <= prev + 1e-12);
        prev = G;
      }
    }
  }
  SUBCASE("channel closed form") {
    for (double x : {0.0, 0.37, 0.8}) {
      double prev = kPlusInf;
      for (double z : linspace(-0.05, 1.05, 111)) {
        const double G = channel_metrics(kChan, x, z).G;
        CHECK(G <= prev + 1e-12);
        prev = G;
      }
    }
  }
}
