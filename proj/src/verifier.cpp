#include "restless/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace restless {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

Pcli1Result check_pcli1(const BanditModel& model,
                        const std::vector<double>& state_grid,
                        const std::vector<double>& threshold_grid, double tol,
                        EngineConfig cfg) {
  if (state_grid.empty() || threshold_grid.empty())
    throw input_error("check_pcli1 needs nonempty grids");
  std::vector<double> thresholds = threshold_grid;
  if (std::find(thresholds.begin(), thresholds.end(), kMinusInf) ==
      thresholds.end())
    thresholds.insert(thresholds.begin(), kMinusInf);
  if (std::find(thresholds.begin(), thresholds.end(), kPlusInf) ==
      thresholds.end())
    thresholds.push_back(kPlusInf);

  const int k = k_for_tolerance(model, tol / 2.0);  // fg_err <= tol
  Pcli1Result res;
  res.horizon = k;
  res.min_certified_g = std::numeric_limits<double>::infinity();
  bool definite_fail = false;
  PairWitness fail_witness;
  double worst_upper = std::numeric_limits<double>::infinity();

  // one task per threshold; merged in grid order so the report does not
  // depend on the evaluation order
  struct PerZ {
    double min_cert = std::numeric_limits<double>::infinity();
    double min_gk = 0.0;
    PairWitness min_pair;
    double worst_upper = std::numeric_limits<double>::infinity();
    PairWitness fail_pair;
  };
  std::vector<PerZ> per_z(thresholds.size());
  parallel_for(thresholds.size(), cfg.jobs, [&](std::size_t zi) {
    const double z = thresholds[zi];
    ThresholdEvaluator ev(model, ThresholdPolicy{z, Side::passive_at_threshold},
                          cfg);
    auto bundles = ev.bundles(state_grid, k);
    PerZ& acc = per_z[zi];
    for (std::size_t i = 0; i < state_grid.size(); ++i) {
      const auto& b = bundles[i];
      const double cert = b.g - b.fg_err;
      if (cert < acc.min_cert) {
        acc.min_cert = cert;
        acc.min_gk = b.g;
        acc.min_pair = {state_grid[i], z, b.g};
      }
      const double upper = b.g + b.fg_err;
      if (upper <= 0.0 && upper < acc.worst_upper) {
        acc.worst_upper = upper;
        acc.fail_pair = {state_grid[i], z, b.g};
      }
    }
  });
  for (const PerZ& acc : per_z) {
    if (acc.min_cert < res.min_certified_g) {
      res.min_certified_g = acc.min_cert;
      res.min_gk = acc.min_gk;
      res.witness = acc.min_pair;
    }
    if (acc.worst_upper <= 0.0 && acc.worst_upper < worst_upper) {
      definite_fail = true;
      worst_upper = acc.worst_upper;
      fail_witness = acc.fail_pair;
    }
  }

  if (res.min_certified_g > 0.0) {
    res.verdict = Verdict::pass;
  } else if (definite_fail) {
    res.verdict = Verdict::fail;
    res.witness = fail_witness;
    res.note = "g provably nonpositive at the witness pair";
  } else {
    res.verdict = Verdict::inconclusive;
    res.note = "g within the truncation noise band of 0";
  }
  return res;
}

namespace {

struct TableView {
  std::vector<double> x, m, err;
};

TableView certified_view(const IndexTable& t) {
  TableView v;
  for (const auto& e : t.entries) {
    if (!e.certified)
      throw input_error("index table has uncertified entries (x = " +
                        std::to_string(e.x) + "): " + e.error);
    v.x.push_back(e.x);
    v.m.push_back(e.value.m);
    v.err.push_back(e.value.err);
  }
  return v;
}

std::vector<double> refine_grid(const std::vector<double>& grid, int factor) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    for (int j = 0; j < factor; ++j)
      out.push_back(grid[i] + (grid[i + 1] - grid[i]) * j / factor);
  }
  out.push_back(grid.back());
  return out;
}

}  // namespace

Pcli2Result check_pcli2(const BanditModel& model,
                        const std::vector<double>& state_grid,
                        double tol_mono, int refinement_factor,
                        double index_tol, EngineConfig cfg) {
  if (state_grid.size() < 2)
    throw input_error("check_pcli2 needs at least two grid points");
  if (refinement_factor < 2)
    throw input_error("refinement factor must be >= 2");

  const TableView base =
      certified_view(mp_index_table(model, state_grid, index_tol, cfg));

  Pcli2Result res;
  res.min_monotonicity_margin = std::numeric_limits<double>::infinity();
  bool mono_fail = false;
  for (std::size_t i = 0; i + 1 < base.x.size(); ++i) {
    const double margin =
        base.m[i + 1] - base.m[i] + base.err[i] + base.err[i + 1] + tol_mono;
    if (margin < res.min_monotonicity_margin) {
      res.min_monotonicity_margin = margin;
      if (margin < 0.0) {
        mono_fail = true;
        res.witness = {base.x[i], base.x[i + 1]};
      }
    }
  }
  if (mono_fail) {
    res.verdict = Verdict::fail;
    res.note = "index decreases beyond the certified tolerance";
    return res;
  }

  // Continuity proxy: a Lipschitz segment's adjacent index gap shrinks by
  // about the refinement factor; a genuine jump's gap does not shrink.
  const std::vector<double> fine = refine_grid(state_grid, refinement_factor);
  const TableView ref =
      certified_view(mp_index_table(model, fine, index_tol, cfg));
  res.required_shrink = refinement_factor / 2.0;

  double max_err = 0.0;
  for (double e : base.err) max_err = std::max(max_err, e);
  for (double e : ref.err) max_err = std::max(max_err, e);
  const double noise = 2.0 * max_err + tol_mono;

  for (std::size_t i = 0; i + 1 < base.x.size(); ++i) {
    const double gap = std::max(0.0, base.m[i + 1] - base.m[i]);
    res.max_gap = std::max(res.max_gap, gap);
    // refined sub-gaps inside [x_i, x_{i+1}]
    double sub = 0.0;
    const std::size_t lo = i * refinement_factor;
    for (std::size_t j = lo; j < lo + refinement_factor; ++j)
      sub = std::max(sub, std::max(0.0, ref.m[j + 1] - ref.m[j]));
    res.refined_max_gap = std::max(res.refined_max_gap, sub);
    if (gap > noise && sub > gap / res.required_shrink + noise)
      res.jump_locations.push_back(0.5 * (base.x[i] + base.x[i + 1]));
  }

  if (!res.jump_locations.empty()) {
    res.verdict = Verdict::fail;
    res.note = "adjacent index gap did not shrink under grid refinement";
    res.witness = {res.jump_locations.front(), res.jump_locations.front()};
  } else {
    res.verdict = Verdict::pass;
  }
  return res;
}

Pcli3Result check_pcli3(const BanditModel& model,
                        const std::vector<double>& state_grid,
                        const std::vector<std::pair<double, double>>& pairs,
                        double tol, EngineConfig cfg, bool conditional) {
  if (state_grid.empty() || pairs.empty())
    throw input_error("check_pcli3 needs nonempty inputs");

  Pcli3Result res;
  res.conditional = conditional;
  res.method = "piecewise-constant-exact";
  const double engine_tol = std::min(tol / 100.0, 1e-10);
  const int k = k_for_tolerance(model, engine_tol);

  auto record = [&](double residual, double allowance, double x, double z1,
                    double z2) {
    ++res.pairs_checked;
    if (residual > res.max_residual) {
      res.max_residual = residual;
      res.allowance_at_max = allowance;
      res.witness_x = x;
      res.witness_z1 = z1;
      res.witness_z2 = z2;
    }
    if (residual > allowance && res.verdict != Verdict::fail) {
      res.verdict = Verdict::fail;
      res.note = "threshold-integral identity residual exceeds the budget";
      res.max_residual = residual;
      res.allowance_at_max = allowance;
      res.witness_x = x;
      res.witness_z1 = z1;
      res.witness_z2 = z2;
    }
  };

  for (double x : state_grid) {
    std::map<double, MetricBundle> right_at;  // z-policy bundle at threshold z
    auto bundle_at = [&](double z, Side side) {
      ThresholdEvaluator ev(model, ThresholdPolicy{z, side}, cfg);
      return ev.bundle(x, k);
    };
    auto metrics_right = [&](double z) -> const MetricBundle& {
      auto it = right_at.find(z);
      if (it == right_at.end())
        it = right_at.emplace(z, bundle_at(z, Side::passive_at_threshold)).first;
      return it->second;
    };

    // preferred route: the reachable ladder from x carries every jump of
    // G(x, .), so the threshold integral is the finite sum over it
    std::vector<double> ladder;
    bool ladder_ok = true;
    try {
      ladder = reachable_set(model, x, -1, cfg);
    } catch (const resource_error&) {
      ladder_ok = false;  // not detectably piecewise constant; quadrature
      res.method = "quadrature";
    }

    if (ladder_ok) {
      // per-candidate jump of G(x,.) and its m-weighted error budget
      std::map<double, std::pair<double, double>> jump;
      for (const auto& [z1, z2] : pairs) {
        if (!(z1 <= z2)) throw input_error("pcli3 pair needs z1 <= z2");
        const MetricBundle b2 = metrics_right(z2);
        const MetricBundle b1 = metrics_right(z1);
        double sum = 0.0;
        double allowance = b1.F_err + b2.F_err + tol;
        for (double zj : ladder) {
          if (!(zj > z1 && zj <= z2)) continue;
          auto it = jump.find(zj);
          if (it == jump.end()) {
            const MetricBundle r = metrics_right(zj);
            const MetricBundle l = bundle_at(zj, Side::active_at_threshold);
            const double dG = r.G - l.G;
            const MPIndexValue mi = mp_index_at(model, zj, k, cfg);
            const double jerr = std::abs(mi.m) * (r.G_err + l.G_err) +
                                mi.err * std::abs(dG);
            it = jump.emplace(zj, std::make_pair(mi.m * dG, jerr)).first;
          }
          sum += it->second.first;
          allowance += it->second.second;
        }
        record(std::abs((b2.F - b1.F) - sum), allowance, x, z1, z2);
      }
      continue;
    }

    // fallback: dense-threshold Riemann-Stieltjes sums with a
    // refinement-convergence check
    for (const auto& [z1, z2] : pairs) {
      if (!(z1 <= z2)) throw input_error("pcli3 pair needs z1 <= z2");
      if (z1 == z2) {
        record(0.0, tol, x, z1, z2);
        continue;
      }
      auto riemann = [&](int n) {
        double s = 0.0;
        double g_prev = metrics_right(z1).G;
        for (int j = 1; j <= n; ++j) {
          const double t = z1 + (z2 - z1) * j / n;
          const double g_here = metrics_right(t).G;
          s += mp_index_at(model, t, k, cfg).m * (g_here - g_prev);
          g_prev = g_here;
        }
        return s;
      };
      const double coarse = riemann(256);
      const double fine = riemann(512);
      const MetricBundle b2 = metrics_right(z2);
      const MetricBundle b1 = metrics_right(z1);
      const double convergence = std::abs(fine - coarse);
      const double allowance =
          b1.F_err + b2.F_err + tol + 2.0 * convergence;
      record(std::abs((b2.F - b1.F) - fine), allowance, x, z1, z2);
    }
  }
  if (res.verdict != Verdict::fail) res.verdict = Verdict::pass;
  return res;
}

PCLReport full_report(const BanditModel& model,
                      const std::vector<double>& state_grid,
                      const std::vector<double>& threshold_grid,
                      VerifyTols tols, EngineConfig cfg) {
  PCLReport rep;
  rep.model_name = model.name;
  rep.state_grid = state_grid;
  rep.threshold_grid = threshold_grid;
  if (std::find(rep.threshold_grid.begin(), rep.threshold_grid.end(),
                kMinusInf) == rep.threshold_grid.end())
    rep.threshold_grid.insert(rep.threshold_grid.begin(), kMinusInf);
  if (std::find(rep.threshold_grid.begin(), rep.threshold_grid.end(),
                kPlusInf) == rep.threshold_grid.end())
    rep.threshold_grid.push_back(kPlusInf);
  rep.tols = tols;

  rep.pcli1 = check_pcli1(model, state_grid, rep.threshold_grid,
                          tols.pcli1_tol, cfg);

  if (rep.pcli1.verdict == Verdict::pass) {
    rep.pcli2 = check_pcli2(model, state_grid, tols.mono_tol,
                            tols.refinement_factor, tols.index_tol, cfg);
  } else {
    rep.pcli2.verdict = Verdict::skipped;
    rep.pcli2.note = "skipped: positive marginal resource not certified";
  }

  const bool upstream_ok = rep.pcli1.verdict == Verdict::pass &&
                           rep.pcli2.verdict == Verdict::pass;
  if (rep.pcli1.verdict == Verdict::fail) {
    rep.pcli3.verdict = Verdict::skipped;
    rep.pcli3.note = "skipped: positive marginal resource not certified";
  } else {
    // deterministic pair selection: spread 6 finite thresholds, all pairs
    std::vector<double> finite;
    for (double z : rep.threshold_grid)
      if (std::isfinite(z)) finite.push_back(z);
    std::vector<double> picks;
    const int npick = std::min<std::size_t>(6, finite.size());
    for (int i = 0; i < npick; ++i)
      picks.push_back(finite[i * (finite.size() - 1) / std::max(1, npick - 1)]);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < picks.size(); ++i)
      for (std::size_t j = i + 1; j < picks.size(); ++j)
        pairs.emplace_back(picks[i], picks[j]);
    std::vector<double> states;
    const std::size_t stride = std::max<std::size_t>(1, state_grid.size() / 10);
    for (std::size_t i = 0; i < state_grid.size(); i += stride)
      states.push_back(state_grid[i]);
    rep.pcli3 = check_pcli3(model, states, pairs, tols.pcli3_tol, cfg,
                            /*conditional=*/!upstream_ok);
  }

  const auto verdicts = {rep.pcli1.verdict, rep.pcli2.verdict,
                         rep.pcli3.verdict};
  if (std::any_of(verdicts.begin(), verdicts.end(),
                  [](Verdict v) { return v == Verdict::fail; })) {
    rep.overall = Verdict::fail;
    rep.conclusion =
        "FAIL: a PCL-indexability condition is violated on the grid; see the "
        "recorded witness";
  } else if (std::all_of(verdicts.begin(), verdicts.end(),
                         [](Verdict v) { return v == Verdict::pass; })) {
    rep.overall = Verdict::pass;
    rep.conclusion =
        "PASS (certified on grid): all three PCL-indexability conditions "
        "hold within certified bounds, so the project is threshold-indexable "
        "and its Whittle index is the MP index";
  } else {
    rep.overall = Verdict::inconclusive;
    rep.conclusion =
        "INCONCLUSIVE: margins fall inside the numeric noise band; refine "
        "grids or tolerances";
  }
  return rep;
}

PCLReport full_report(const BanditModel& model, VerifyTols tols,
                      EngineConfig cfg) {
  if (!model.states.bounded())
    throw input_error("default verification grids need a bounded interval");
  auto grid = linspace(model.states.lower, model.states.upper, 201);
  return full_report(model, grid, grid, tols, cfg);
}

}  // namespace restless
