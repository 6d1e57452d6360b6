// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion.  argv[1] is the CLI binary path
// (used by the determinism criterion).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "json.hpp"
#include "restless/frontier.hpp"
#include "restless/json_io.hpp"
#include "restless/models/channel.hpp"
#include "restless/models/reset.hpp"
#include "restless/models/webcrawl.hpp"
#include "restless/rmabp.hpp"
#include "restless/rng.hpp"

namespace fs = std::filesystem;
using namespace restless;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const WebCrawlParams kWeb{0.5, 1.0, 1.0, 0.9};
const ChannelParams kChan{0.3, 0.2, 0.9};

// ---- criterion 1: closed-form vs numeric index, web crawling ---------------
void criterion1() {
  const auto t0 = Clock::now();
  auto m = make_webcrawl_model(kWeb);
  const int k = k_for_tolerance(m, 1e-6);
  double max_gap = 0.0, max_over_cert = 0.0;
  bool top_exact = false;
  for (double x : linspace(0.5, 1.0, 101)) {
    const auto v = mp_index_at(m, x, k);
    const double gap = std::abs(v.m - webcrawl_index(kWeb, x));
    max_gap = std::max(max_gap, gap);
    max_over_cert = std::max(max_over_cert, gap - v.err);
    if (x == 1.0) top_exact = v.m == 1.0;
  }
  const double elapsed = seconds_since(t0);
  const bool ok = max_over_cert <= 0.0 && max_gap <= 1e-6 && top_exact &&
                  elapsed < 5.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "webcrawl index: max gap %.3g (<= 1e-6), within certificates, "
                "m(u)=1 %s, %.2fs",
                max_gap, top_exact ? "exact" : "NOT exact", elapsed);
  report(1, ok, buf);
}

// ---- criterion 2: closed-form vs numeric index, channel --------------------
void criterion2() {
  const auto t0 = Clock::now();
  auto m = make_channel_model(kChan);
  const int k = 260;  // certificate ~1e-10, well under the 1e-8 gate
  const double q = kChan.q, hinf = kChan.h_inf(), qr = q + kChan.rho();
  double max_i_iii_iv = 0.0, max_ii = 0.0;
  for (double x : linspace(0.0, 1.0, 101)) {
    const double gap = std::abs(mp_index_at(m, x, k).m - channel_index(kChan, x));
    if (x >= q && x < hinf)
      max_ii = std::max(max_ii, gap);
    else
      max_i_iii_iv = std::max(max_i_iii_iv, gap);
  }
  const double spot =
      std::max({std::abs(channel_index(kChan, 0.1) - 0.1),
                std::abs(channel_index(kChan, 0.5) - 0.5 / 0.82),
                std::abs(channel_index(kChan, 0.9) - 0.9)});
  const double elapsed = seconds_since(t0);
  const bool ok = max_i_iii_iv <= 1e-8 && max_ii <= 1e-6 && spot <= 1e-12 &&
                  elapsed < 20.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "channel index: cases I/III/IV gap %.3g (<= 1e-8), case II "
                "gap %.3g (<= 1e-6), %.2fs",
                max_i_iii_iv, max_ii, elapsed);
  report(2, ok, buf);
  (void)qr;
}

// ---- criterion 3: strong positive-margin certificate, channel --------------
void criterion3() {
  auto m = make_channel_model(kChan);
  auto grid = linspace(0.0, 1.0, 201);
  auto res = check_pcli1(m, grid, grid, 1e-9);
  const bool ok =
      res.verdict == Verdict::pass && res.min_certified_g >= 0.1 - 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "channel certified g >= %.12f over 201x201 (gate 0.1 - 1e-9)",
                res.min_certified_g);
  report(3, ok, buf);
}

// ---- criterion 4: full certification reports -------------------------------
std::map<std::string, PCLReport> g_reports;

void criterion4() {
  auto web = make_webcrawl_model(kWeb);
  auto chan = make_channel_model(kChan);
  auto reset = make_reset_model({});
  g_reports["webcrawl"] = full_report(web);
  g_reports["channel"] = full_report(chan);
  g_reports["reset"] = full_report(reset);

  const auto& rr = g_reports["reset"];
  bool reset_ok = rr.overall == Verdict::fail &&
                  rr.pcli1.verdict == Verdict::fail;
  double witness_g = 0.0, named_g = 0.0;
  if (reset_ok) {
    witness_g = k_horizon_metrics(reset, rr.pcli1.witness.x,
                                  ThresholdSpec::z_policy(rr.pcli1.witness.z),
                                  300)
                    .g;
    named_g = k_horizon_metrics(reset, 0.6, ThresholdSpec::z_policy(0.5), 300).g;
    reset_ok = witness_g <= -0.5 && named_g <= -0.5;
  }
  const bool ok = g_reports["webcrawl"].overall == Verdict::pass &&
                  g_reports["channel"].overall == Verdict::pass && reset_ok;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "webcrawl %s, channel %s, reset %s (witness g=%.3f, "
                "g(0.6,0.5)=%.3f)",
                verdict_name(g_reports["webcrawl"].overall),
                verdict_name(g_reports["channel"].overall),
                verdict_name(g_reports["reset"].overall), witness_g, named_g);
  report(4, ok, buf);
}

// ---- criterion 5: threshold-integral identity from closed forms ------------
void criterion5() {
  auto m = make_webcrawl_model(kWeb);
  CounterRng rng(2024, 0);
  double max_residual = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double x = 0.5 + 0.5 * rng.uniform();
    double z1 = 0.5 + 0.5 * rng.uniform();
    double z2 = 0.5 + 0.5 * rng.uniform();
    if (z2 < z1) std::swap(z1, z2);
    const auto ladder = reachable_set(m, x);
    double sum = 0.0;
    for (double zj : ladder) {
      if (!(zj > z1 && zj <= z2)) continue;
      const auto right = webcrawl_metrics(kWeb, x, zj);
      const auto left =
          webcrawl_metrics(kWeb, x, zj, Side::active_at_threshold);
      sum += webcrawl_index(kWeb, zj) * (right.G - left.G);
    }
    const double dF =
        webcrawl_metrics(kWeb, x, z2).F - webcrawl_metrics(kWeb, x, z1).F;
    max_residual = std::max(max_residual, std::abs(dF - sum));
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "webcrawl jump-sum residual %.3g over 50 random triples "
                "(<= 1e-8)",
                max_residual);
  report(5, max_residual <= 1e-8, buf);
}

// ---- criterion 6: average-reward limit --------------------------------------
void criterion6() {
  WebCrawlParams nearly = kWeb;
  nearly.beta = 0.999;
  double max_rel = 0.0;
  for (double x : linspace(0.5, 1.0, 51)) {
    const double limit = webcrawl_avg_index(kWeb, x);
    const double rel = std::abs(webcrawl_index(nearly, x) - limit) /
                       std::abs(limit);
    max_rel = std::max(max_rel, rel);
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf),
                "beta=0.999 index vs average-reward index: max relative gap "
                "%.3g (<= 1e-2)",
                max_rel);
  report(6, max_rel <= 1e-2, buf);
}

// ---- criterion 7: shadow price and frontier shape ---------------------------
void criterion7() {
  auto m = make_webcrawl_model(kWeb);
  const auto& cert = g_reports["webcrawl"];
  auto nu = InitialDistribution::uniform(0.5, 1.0, 201);

  bool probes_ok = true;
  int degenerate = 0;
  const IterateLadder lad = kWeb.ladder();
  for (long t = 1; t <= 20; ++t) {
    const double z = lad.iterate(0.5, t);
    auto chk = shadow_price_check(m, nu, z, 1e-6);
    if (chk.status == ShadowStatus::degenerate) {
      ++degenerate;
      continue;
    }
    probes_ok = probes_ok && chk.status == ShadowStatus::pass;
  }

  auto curve = sweep_frontier(m, nu, default_threshold_grid(m), 1e-9, cert);
  bool concave = true;
  for (std::size_t i = 0; i + 1 < curve.slopes.size(); ++i)
    concave = concave && curve.slopes[i + 1] <= curve.slopes[i] + 1e-9;
  const int k = curve.horizon;
  auto never = distribution_metrics(m, nu, ThresholdSpec::z_policy(kPlusInf), k);
  auto always =
      distribution_metrics(m, nu, ThresholdSpec::z_policy(kMinusInf), k);
  const bool endpoints_ok =
      std::abs(curve.points.front().gamma - never.G) <= 2 * never.G_err &&
      std::abs(curve.points.back().gamma - always.G) <= 2 * always.G_err;

  const bool ok = probes_ok && degenerate <= 5 && concave && endpoints_ok;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "20 shadow-price probes %s (%d degenerate), frontier concave "
                "%s, gamma endpoints %s",
                probes_ok ? "pass" : "FAIL", degenerate,
                concave ? "yes" : "NO", endpoints_ok ? "match" : "MISMATCH");
  report(7, ok, buf);
}

// ---- criterion 8: weak duality for the two-project instance ----------------
void criterion8() {
  const auto t0 = Clock::now();
  auto model = make_channel_model(kChan);
  auto grid = linspace(0.0, 1.0, 201);
  const auto& report_ = g_reports["channel"];
  auto table = mp_index_table(model, grid, 1e-9);

  RMABPInstance inst;
  inst.projects.push_back({model, 0.4, table, report_});
  inst.projects.push_back({model, 0.6, table, report_});
  inst.budget = 1.0;
  inst.beta = 0.9;

  auto dual = solve_dual(inst, 1e-6);
  const int horizon = horizon_for_tolerance(inst, 1e-4);
  auto sim = simulate_index_policy(inst, 10000, horizon, 42);
  const bool duality_ok =
      sim.mean_value <= dual.bound + 3.0 * sim.half_width + 1e-4;

  bool convex_ok = true;
  std::vector<double> L;
  for (double lam : linspace(0.0, 2.0, 50))
    L.push_back(lagrangian_value(inst, lam).bound);
  for (std::size_t i = 1; i + 1 < L.size(); ++i)
    convex_ok = convex_ok && (L[i - 1] - 2 * L[i] + L[i + 1] >= -1e-8);

  const double elapsed = seconds_since(t0);
  const bool ok = duality_ok && convex_ok && sim.violations == 0 &&
                  elapsed < 60.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "sim %.6f <= bound %.6f + 3*hw %.4f + 1e-4 (horizon %d), dual "
                "convex %s, %.1fs",
                sim.mean_value, dual.bound, sim.half_width, horizon,
                convex_ok ? "yes" : "NO", elapsed);
  report(8, ok, buf);
}

// ---- criterion 9: engine self-consistency -----------------------------------
bool lattice_decomposition() {
  const int n = 20;
  const double step = 1.0 / (n - 1);
  BanditModel m{StateInterval(0.0, 1.0),
                [](double x, int a) { return x + 0.2 * a; },
                [](double, int a) { return 0.1 + 0.9 * a; },
                {},
                0.9,
                {},
                "lattice"};
  m.kernel.action[0] = {{[](double) { return 1.0; },
                         [step](double x) { return std::max(x - step, 0.0); }}};
  m.kernel.action[1] = {
      {[](double) { return 0.7; },
       [step](double x) { return std::min(x + 3 * step, 1.0); }},
      {[](double) { return 0.3; }, [](double) { return 0.0; }}};
  fit_default_weight_bound(m);

  auto idx = [&](double x) { return static_cast<int>(std::lround(x / step)); };
  std::vector<std::vector<std::pair<double, int>>> trans[2];
  for (int a = 0; a < 2; ++a) {
    trans[a].resize(n);
    for (int j = 0; j < n; ++j)
      for (const auto& b : kernel_at(m, j * step, a))
        trans[a][j].push_back({b.prob, idx(b.next)});
  }
  const int K = 420;
  auto dp_value = [&](const std::vector<int>& act,
                      const std::vector<double>& payoff) {
    std::vector<double> v(n, 0.0), w(n);
    for (int d = 0; d <= K; ++d) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (auto [p, c] : trans[act[j]][j]) s += p * v[c];
        w[j] = payoff[j] + 0.9 * s;
      }
      v.swap(w);
    }
    return v;
  };

  const double z = 0.4;
  std::vector<int> act_B(n);
  std::vector<double> r_B(n);
  for (int j = 0; j < n; ++j) {
    act_B[j] = j * step > z ? 1 : 0;
    r_B[j] = m.reward(j * step, act_B[j]);
  }
  const auto F_B = dp_value(act_B, r_B);
  std::vector<double> f_B(n);
  for (int j = 0; j < n; ++j) {
    double s1 = 0.0, s0 = 0.0;
    for (auto [p, c] : trans[1][j]) s1 += p * F_B[c];
    for (auto [p, c] : trans[0][j]) s0 += p * F_B[c];
    f_B[j] = (m.reward(j * step, 1) + 0.9 * s1) -
             (m.reward(j * step, 0) + 0.9 * s0);
  }

  const double allow =
      4.0 * m.weight_bound.M_gamma() * std::pow(0.9, K) + 1e-10;
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    CounterRng rng(123, trial);
    std::vector<int> act_pi(n);
    for (int j = 0; j < n; ++j) act_pi[j] = rng.uniform() < 0.5 ? 1 : 0;
    std::vector<double> r_pi(n), corr(n);
    for (int j = 0; j < n; ++j) {
      r_pi[j] = m.reward(j * step, act_pi[j]);
      corr[j] = (act_pi[j] - act_B[j]) * f_B[j];
    }
    const auto F_pi = dp_value(act_pi, r_pi);
    const auto E_corr = dp_value(act_pi, corr);
    for (int j = 0; j < n; ++j)
      if (std::abs(F_pi[j] - (F_B[j] + E_corr[j])) > allow) return false;
  }
  return true;
}

bool sign_identity(const BanditModel& m) {
  const auto grid = linspace(m.states.lower, m.states.upper, 101);
  const int k = 260;
  const double band = 1e-7;
  std::vector<double> diag;
  for (double z : grid) diag.push_back(mp_index_at(m, z, k).m);
  for (std::size_t zi = 0; zi < grid.size(); ++zi) {
    ThresholdEvaluator ev(m,
                          ThresholdPolicy{grid[zi], Side::passive_at_threshold});
    auto bundles = ev.bundles(grid, k);
    for (std::size_t xi = 0; xi < grid.size(); ++xi) {
      const double lhs = bundles[xi].f / bundles[xi].g - diag[zi];
      const double rhs = diag[xi] - diag[zi];
      if (std::abs(lhs) <= band || std::abs(rhs) <= band) continue;
      if (lhs * rhs < 0.0) return false;
    }
  }
  return true;
}

void criterion9() {
  const bool decomp = lattice_decomposition();
  const bool sign_web = sign_identity(make_webcrawl_model(kWeb));
  const bool sign_chan = sign_identity(make_channel_model(kChan));
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "lattice decomposition %s; sign identity 101x101 webcrawl %s, "
                "channel %s",
                decomp ? "ok" : "FAIL", sign_web ? "ok" : "FAIL",
                sign_chan ? "ok" : "FAIL");
  report(9, decomp && sign_web && sign_chan, buf);
}

// ---- criterion 10: byte-identical outputs -----------------------------------
std::string g_cli;
fs::path g_tmp;

std::pair<int, std::string> run_cli(const std::string& args) {
  const fs::path out = g_tmp / "acc_out.txt";
  const std::string cmd =
      g_cli + " " + args + " > " + out.string() + " 2> /dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1,
          read_text_file(out.string())};
}

void criterion10() {
  if (g_cli.empty()) {
    report(10, false, "no CLI path supplied");
    return;
  }
  using nlohmann::json;
  const fs::path cfg = g_tmp / "acc_rmabp.json";
  json c = {{"budget", 1.0},
            {"projects",
             {{{"model", "channel"},
               {"params", {{"p", 0.3}, {"q", 0.2}, {"beta", 0.9}}},
               {"x0", 0.4}},
              {{"model", "channel"},
               {"params", {{"p", 0.3}, {"q", 0.2}, {"beta", 0.9}}},
               {"x0", 0.6}}}},
            {"episodes", 500},
            {"horizon", 60},
            {"seed", 42},
            {"grid", 41},
            {"tol", 1e-8}};
  write_text_file(cfg.string(), c.dump());

  bool ok = true;
  std::string which;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"index", "index --model webcrawl --grid 101 --tol 1e-8"},
      {"verify", "verify --model channel --grid 41"},
      {"frontier", "frontier --model webcrawl --grid 41 --tol 1e-9"},
      {"rmabp", "rmabp --config " + cfg.string()}};
  for (const auto& [name, cmd] : cmds) {
    auto a = run_cli(cmd);
    auto b = run_cli(cmd);
    if (a.second != b.second || a.first != b.first) {
      ok = false;
      which += name + " ";
    }
  }
  report(10, ok,
         ok ? "index/verify/frontier/rmabp outputs byte-identical across runs"
            : "non-deterministic: " + which);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  g_tmp = fs::temp_directory_path() / "restless_acceptance";
  fs::create_directories(g_tmp);

  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
