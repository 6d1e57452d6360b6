// Command-line front end: model registry + JSON config + subcommands
//   index    certified MP-index table as CSV
//   verify   PCL-indexability report as JSON
//   metrics  threshold-policy metric bundle at one state as JSON
//   frontier resource-reward frontier as CSV/JSON with shadow-price probes
//   rmabp    Lagrangian dual bound + index-policy simulation as JSON
// Exit codes: 0 pass, 2 analytic failure (witnesses in the output),
// 3 inconclusive, 64 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "restless/json_io.hpp"
#include "restless/registry.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace restless;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitUsage = 64;

struct ModelFlags {
  std::string name;
  std::optional<double> alpha, b, C, beta, p, q, c_active, sticky;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", name, "registered model name");
    cmd->add_option("--alpha", alpha, "webcrawl: passive drift factor");
    cmd->add_option("--b", b, "webcrawl: scale parameter");
    cmd->add_option("--C", C, "webcrawl: activation cost");
    cmd->add_option("--beta", beta, "discount factor");
    cmd->add_option("--p", p, "channel: good->bad flip probability");
    cmd->add_option("--q", q, "channel: bad->good flip probability");
    cmd->add_option("--c-active", c_active, "reset: active cost");
    cmd->add_option("--sticky", sticky, "reset: hold threshold");
  }

  json params() const {
    json j = json::object();
    if (alpha) j["alpha"] = *alpha;
    if (b) j["b"] = *b;
    if (C) j["C"] = *C;
    if (beta) j["beta"] = *beta;
    if (p) j["p"] = *p;
    if (q) j["q"] = *q;
    if (c_active) j["c_active"] = *c_active;
    if (sticky) j["sticky"] = *sticky;
    return j;
  }
};

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys)
      if (it.key() == k) known = true;
    if (!known)
      throw input_error("unknown key '" + it.key() + "' in " + where);
  }
}

// Model spec from --config (if given) or from inline flags.
BanditModel resolve_model(const std::string& config_path,
                          const ModelFlags& flags, json* config_out) {
  if (!config_path.empty()) {
    json cfg = json::parse(read_text_file(config_path));
    if (config_out) *config_out = cfg;
    if (!cfg.contains("model"))
      throw input_error("config needs a 'model' object");
    const json& m = cfg["model"];
    reject_unknown(m, {"name", "params"}, "config.model");
    return make_model(m.at("name").get<std::string>(),
                      m.value("params", json::object()));
  }
  if (flags.name.empty())
    throw input_error("either --config or --model is required");
  if (config_out) *config_out = json::object();
  return make_model(flags.name, flags.params());
}

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty())
    std::cout << payload;
  else
    write_text_file(out_path, payload);
}

// Optional byte cache, enabled only through RESTLESS_CACHE_DIR.
struct Cache {
  bool enabled = false;
  fs::path dir;

  Cache() {
    if (const char* d = std::getenv("RESTLESS_CACHE_DIR")) {
      dir = d;
      enabled = !dir.empty();
      if (enabled) fs::create_directories(dir);
    }
  }

  static std::string key(const std::string& tag, const json& cfg) {
    const std::string s = tag + "\n" + cfg.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
  }

  std::optional<std::pair<int, std::string>> lookup(const std::string& k) const {
    if (!enabled) return std::nullopt;
    const fs::path code = dir / (k + ".code"), payload = dir / (k + ".payload");
    if (!fs::exists(code) || !fs::exists(payload)) return std::nullopt;
    return std::make_pair(std::stoi(read_text_file(code.string())),
                          read_text_file(payload.string()));
  }

  void store(const std::string& k, int code, const std::string& payload) const {
    if (!enabled) return;
    write_text_file((dir / (k + ".payload")).string(), payload);
    write_text_file((dir / (k + ".code")).string(), std::to_string(code));
  }
};

VerifyTols tols_from(const json& cfg) {
  VerifyTols t;
  if (!cfg.contains("tols")) return t;
  const json& j = cfg["tols"];
  reject_unknown(j,
                 {"pcli1_tol", "mono_tol", "refinement_factor", "pcli3_tol",
                  "index_tol"},
                 "config.tols");
  t.pcli1_tol = j.value("pcli1_tol", t.pcli1_tol);
  t.mono_tol = j.value("mono_tol", t.mono_tol);
  t.refinement_factor = j.value("refinement_factor", t.refinement_factor);
  t.pcli3_tol = j.value("pcli3_tol", t.pcli3_tol);
  t.index_tol = j.value("index_tol", t.index_tol);
  return t;
}

InitialDistribution nu0_from(const json& cfg, const BanditModel& model) {
  if (!cfg.contains("nu0"))
    return InitialDistribution::uniform(model.states.lower,
                                        model.states.upper, 201);
  const json& j = cfg["nu0"];
  reject_unknown(j, {"kind", "x", "a", "b", "n", "nodes", "weights"},
                 "config.nu0");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "point") return InitialDistribution::point_mass(j.at("x"));
  if (kind == "uniform")
    return InitialDistribution::uniform(j.value("a", model.states.lower),
                                        j.value("b", model.states.upper),
                                        j.value("n", 201));
  if (kind == "nodes")
    return InitialDistribution::weighted(
        j.at("nodes").get<std::vector<double>>(),
        j.at("weights").get<std::vector<double>>());
  throw input_error("nu0.kind must be point, uniform or nodes");
}

// --- subcommands -------------------------------------------------------------

int run_metrics(const BanditModel& model, double x, double z,
                const std::string& side, std::optional<double> alpha,
                std::optional<int> k, double tol, const std::string& out) {
  ThresholdSpec spec;
  spec.z = z;
  spec.side = side == "left" ? Side::active_at_threshold
                             : Side::passive_at_threshold;
  if (side != "left" && side != "right")
    throw input_error("--side must be left or right");
  spec.alpha = alpha;
  MetricBundle b = k.has_value() ? k_horizon_metrics(model, x, spec, *k)
                                 : metrics_to_tolerance(model, x, spec, tol);
  json j = bundle_json(b);
  j["x"] = json_num(x);
  j["z"] = json_num(z);
  j["side"] = side;
  if (alpha) j["alpha"] = json_num(*alpha);
  emit(out, j.dump(2) + "\n");
  return kExitPass;
}

int run_frontier(const BanditModel& model, const json& cfg, int grid_n,
                 double tol, int probes, const std::string& out,
                 const std::string& json_out, EngineConfig ecfg) {
  if (!model.states.bounded())
    throw input_error("frontier needs a bounded state interval");
  auto state_grid =
      linspace(model.states.lower, model.states.upper, std::max(grid_n, 2));
  PCLReport cert = full_report(model, state_grid, state_grid, tols_from(cfg),
                               ecfg);
  if (!cert.passed())
    throw input_error("frontier refused: certification outcome is " +
                      std::string(verdict_name(cert.overall)));
  InitialDistribution nu0 = nu0_from(cfg, model);

  std::vector<double> thresholds;
  if (cfg.contains("thresholds") && cfg["thresholds"].is_array())
    thresholds = cfg["thresholds"].get<std::vector<double>>();
  else if (cfg.contains("thresholds") && cfg["thresholds"].is_number())
    thresholds = linspace(model.states.lower, model.states.upper,
                          cfg["thresholds"].get<int>());
  else
    thresholds = default_threshold_grid(model, ecfg);

  FrontierCurve curve = sweep_frontier(model, nu0, thresholds, tol, cert, ecfg);
  emit(out, frontier_csv(curve));

  bool probes_ok = true;
  json probe_arr = json::array();
  if (probes > 0) {
    // probe interior ladder thresholds, evenly spread
    std::vector<double> interior;
    for (double z : thresholds)
      if (z > model.states.lower && z < model.states.upper)
        interior.push_back(z);
    const int np = std::min<std::size_t>(probes, interior.size());
    for (int i = 0; i < np; ++i) {
      double z = interior[i * (interior.size() - 1) / std::max(1, np - 1)];
      auto chk = shadow_price_check(model, nu0, z, 1e-6, ecfg);
      probes_ok &= chk.status != ShadowStatus::fail;
      probe_arr.push_back({{"z", json_num(chk.z)},
                           {"status", chk.status == ShadowStatus::pass
                                          ? "pass"
                                          : chk.status == ShadowStatus::fail
                                                ? "fail"
                                                : "degenerate"},
                           {"slope", json_num(chk.slope)},
                           {"index", json_num(chk.index)},
                           {"diff", json_num(chk.diff)},
                           {"allowed", json_num(chk.allowed)}});
    }
  }
  if (!json_out.empty()) {
    json j = frontier_json(curve);
    j["shadow_price_probes"] = probe_arr;
    write_text_file(json_out, j.dump(2) + "\n");
  }
  return probes_ok ? kExitPass : kExitFail;
}

int run_rmabp(const json& cfg, const std::string& out, EngineConfig ecfg) {
  json j = rmabp_from_config(cfg, ecfg);
  emit(out, j.dump(2) + "\n");
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Marginal-productivity index computation, PCL certification, frontier "
      "construction and index-policy scheduling for restless bandit projects"};
  app.require_subcommand(1);

  std::string config_path, out_path, json_out;
  int grid_index = 101, grid_verify = 201, grid_frontier = 201;
  double tol = 1e-8;
  int jobs = 0;

  auto* cmd_index = app.add_subcommand("index", "certified MP-index table (CSV)");
  auto* cmd_verify =
      app.add_subcommand("verify", "PCL-indexability report (JSON)");
  auto* cmd_metrics =
      app.add_subcommand("metrics", "threshold-policy metrics at a state");
  auto* cmd_frontier =
      app.add_subcommand("frontier", "resource-reward frontier (CSV)");
  auto* cmd_rmabp =
      app.add_subcommand("rmabp", "dual bound + index-policy simulation");

  ModelFlags flags_index, flags_verify, flags_metrics, flags_frontier;
  double mx = 0.0, mz = 0.0;
  std::string mside = "right";
  std::optional<double> malpha;
  std::optional<int> mk;
  int probes = 0;

  for (auto [cmd, flags] :
       {std::pair{cmd_index, &flags_index}, {cmd_verify, &flags_verify},
        {cmd_metrics, &flags_metrics}, {cmd_frontier, &flags_frontier}}) {
    flags->attach(cmd);
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_path, "output path (default stdout)");
    cmd->add_option("--jobs", jobs, "worker threads (default: all cores)");
  }
  cmd_index->add_option("--grid", grid_index, "index grid size");
  cmd_index->add_option("--tol", tol, "index tolerance");
  cmd_verify->add_option("--grid", grid_verify, "state/threshold grid size");
  cmd_metrics->add_option("--x", mx, "state")->required();
  cmd_metrics->add_option("--z", mz, "threshold");
  cmd_metrics->add_option("--side", mside, "right (z) or left (z-minus)");
  cmd_metrics->add_option("--policy-alpha", malpha, "randomization weight");
  cmd_metrics->add_option("--k", mk, "horizon (else --tol drives it)");
  cmd_metrics->add_option("--tol", tol, "metric tolerance");
  cmd_frontier->add_option("--grid", grid_frontier, "certification grid size");
  cmd_frontier->add_option("--tol", tol, "metric tolerance");
  cmd_frontier->add_option("--probes", probes, "shadow-price probe count");
  cmd_frontier->add_option("--json-out", json_out, "also write JSON here");
  cmd_rmabp->add_option("--config", config_path, "JSON config file")
      ->required();
  cmd_rmabp->add_option("--out", out_path, "output path (default stdout)");
  cmd_rmabp->add_option("--jobs", jobs, "worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    json cfg = json::object();
    Cache cache;
    EngineConfig ecfg;
    ecfg.jobs = jobs;

    if (app.got_subcommand(cmd_rmabp)) {
      cfg = json::parse(read_text_file(config_path));
      ecfg.jobs = cfg.value("jobs", jobs);
      return run_rmabp(cfg, out_path, ecfg);
    }

    if (app.got_subcommand(cmd_index)) {
      BanditModel model = resolve_model(config_path, flags_index, &cfg);
      int grid_n = grid_index;
      if (!cfg.empty()) {
        reject_unknown(cfg, {"model", "grid", "tol", "out", "jobs"},
                       "index config");
        grid_n = cfg.value("grid", grid_n);
        tol = cfg.value("tol", tol);
        ecfg.jobs = cfg.value("jobs", ecfg.jobs);
        if (out_path.empty()) out_path = cfg.value("out", "");
      }
      json key_cfg = {{"cmd", "index"}, {"cfg", cfg},
                      {"flags", flags_index.params()},
                      {"model", flags_index.name}, {"grid", grid_n},
                      {"tol", tol}};
      const std::string key = Cache::key("index", key_cfg);
      if (auto hit = cache.lookup(key)) {
        emit(out_path, hit->second);
        return hit->first;
      }
      // compute into a string so the cache stores exact bytes
      if (grid_n <= 0) throw input_error("index needs a nonempty grid");
      if (!model.states.bounded())
        throw input_error("index grid needs a bounded state interval");
      auto grid = linspace(model.states.lower, model.states.upper, grid_n);
      IndexTable table = mp_index_table(model, grid, tol, ecfg);
      const std::string payload = index_table_csv(table);
      const int code = table.all_certified() ? kExitPass : kExitFail;
      cache.store(key, code, payload);
      emit(out_path, payload);
      return code;
    }

    if (app.got_subcommand(cmd_verify)) {
      BanditModel model = resolve_model(config_path, flags_verify, &cfg);
      VerifyTols tols = tols_from(cfg);
      int grid_n = grid_verify;
      if (!cfg.empty()) {
        reject_unknown(cfg, {"model", "grid", "tols", "out", "jobs"},
                       "verify config");
        grid_n = cfg.value("grid", grid_n);
        ecfg.jobs = cfg.value("jobs", ecfg.jobs);
        if (out_path.empty()) out_path = cfg.value("out", "");
      }
      json key_cfg = {{"cmd", "verify"}, {"cfg", cfg},
                      {"flags", flags_verify.params()},
                      {"model", flags_verify.name}, {"grid", grid_n}};
      const std::string key = Cache::key("verify", key_cfg);
      if (auto hit = cache.lookup(key)) {
        emit(out_path, hit->second);
        return hit->first;
      }
      if (grid_n < 2) throw input_error("verify needs at least 2 grid points");
      if (!model.states.bounded())
        throw input_error("verify grids need a bounded state interval");
      auto grid = linspace(model.states.lower, model.states.upper, grid_n);
      PCLReport rep = full_report(model, grid, grid, tols, ecfg);
      const std::string payload = report_json(rep).dump(2) + "\n";
      const int code = rep.overall == Verdict::pass ? kExitPass
                       : rep.overall == Verdict::fail ? kExitFail
                                                      : kExitInconclusive;
      cache.store(key, code, payload);
      emit(out_path, payload);
      return code;
    }

    if (app.got_subcommand(cmd_metrics)) {
      BanditModel model = resolve_model(config_path, flags_metrics, &cfg);
      return run_metrics(model, mx, mz, mside, malpha, mk, tol, out_path);
    }

    if (app.got_subcommand(cmd_frontier)) {
      BanditModel model = resolve_model(config_path, flags_frontier, &cfg);
      if (!cfg.empty())
        reject_unknown(cfg,
                       {"model", "grid", "tol", "out", "nu0", "thresholds",
                        "tols", "probes", "jobs"},
                       "frontier config");
      const int grid_n = cfg.value("grid", grid_frontier);
      tol = cfg.value("tol", tol);
      probes = cfg.value("probes", probes);
      ecfg.jobs = cfg.value("jobs", ecfg.jobs);
      if (out_path.empty()) out_path = cfg.value("out", "");
      return run_frontier(model, cfg, grid_n, tol, probes, out_path, json_out,
                          ecfg);
    }
  } catch (const infeasibility_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
