#include "restless/json_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "restless/registry.hpp"

namespace restless {

using nlohmann::json;

json json_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string num_str(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

static json grid_json(const std::vector<double>& g) {
  json arr = json::array();
  for (double v : g) arr.push_back(json_num(v));
  return arr;
}

json report_json(const PCLReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "pcl_report";
  j["model"] = r.model_name;
  j["overall"] = verdict_name(r.overall);
  j["conclusion"] = r.conclusion;

  json p1;
  p1["verdict"] = verdict_name(r.pcli1.verdict);
  p1["min_certified_g"] = json_num(r.pcli1.min_certified_g);
  p1["min_g_k"] = json_num(r.pcli1.min_gk);
  p1["horizon"] = r.pcli1.horizon;
  p1["witness"] = {{"x", json_num(r.pcli1.witness.x)},
                   {"z", json_num(r.pcli1.witness.z)},
                   {"g", json_num(r.pcli1.witness.value)}};
  if (!r.pcli1.note.empty()) p1["note"] = r.pcli1.note;
  j["pcli1"] = p1;

  json p2;
  p2["verdict"] = verdict_name(r.pcli2.verdict);
  p2["min_monotonicity_margin"] = json_num(r.pcli2.min_monotonicity_margin);
  p2["max_gap"] = json_num(r.pcli2.max_gap);
  p2["refined_max_gap"] = json_num(r.pcli2.refined_max_gap);
  p2["required_shrink"] = json_num(r.pcli2.required_shrink);
  p2["jump_locations"] = grid_json(r.pcli2.jump_locations);
  if (r.pcli2.witness)
    p2["witness"] = {{"x_lo", json_num(r.pcli2.witness->first)},
                     {"x_hi", json_num(r.pcli2.witness->second)}};
  if (!r.pcli2.note.empty()) p2["note"] = r.pcli2.note;
  j["pcli2"] = p2;

  json p3;
  p3["verdict"] = verdict_name(r.pcli3.verdict);
  p3["max_residual"] = json_num(r.pcli3.max_residual);
  p3["allowance_at_max"] = json_num(r.pcli3.allowance_at_max);
  p3["method"] = r.pcli3.method;
  p3["pairs_checked"] = r.pcli3.pairs_checked;
  p3["conditional"] = r.pcli3.conditional;
  p3["witness"] = {{"x", json_num(r.pcli3.witness_x)},
                   {"z1", json_num(r.pcli3.witness_z1)},
                   {"z2", json_num(r.pcli3.witness_z2)}};
  if (!r.pcli3.note.empty()) p3["note"] = r.pcli3.note;
  j["pcli3"] = p3;

  j["grids"] = {{"state", grid_json(r.state_grid)},
                {"threshold", grid_json(r.threshold_grid)}};
  j["notes"] =
      "conditions certified on the recorded grids only; the threshold grid "
      "includes the -inf/+inf sentinels, to which the index extends by its "
      "endpoint limits";
  j["tolerances"] = {{"pcli1_tol", json_num(r.tols.pcli1_tol)},
                     {"mono_tol", json_num(r.tols.mono_tol)},
                     {"refinement_factor", r.tols.refinement_factor},
                     {"pcli3_tol", json_num(r.tols.pcli3_tol)},
                     {"index_tol", json_num(r.tols.index_tol)}};
  return j;
}

json bundle_json(const MetricBundle& b) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "metric_bundle";
  j["F"] = json_num(b.F);
  j["G"] = json_num(b.G);
  j["f"] = json_num(b.f);
  j["g"] = json_num(b.g);
  j["horizon"] = b.horizon;
  j["F_err"] = json_num(b.F_err);
  j["G_err"] = json_num(b.G_err);
  j["fg_err"] = json_num(b.fg_err);
  return j;
}

json dual_json(const DualSolution& d) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "dual_solution";
  j["lambda_opt"] = json_num(d.lambda_opt);
  j["bound"] = json_num(d.bound);
  json pp = json::array();
  for (const auto& p : d.per_project)
    pp.push_back({{"threshold", json_num(p.threshold)},
                  {"value", json_num(p.value)}});
  j["per_project"] = pp;
  return j;
}

json sim_json(const SimResult& s) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "sim_result";
  j["mean_value"] = json_num(s.mean_value);
  j["half_width"] = json_num(s.half_width);
  j["episodes"] = s.episodes;
  j["horizon"] = s.horizon;
  j["seed"] = s.seed;
  j["violations"] = s.violations;
  return j;
}

json frontier_json(const FrontierCurve& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "frontier_curve";
  j["tol"] = json_num(c.tol);
  j["horizon"] = c.horizon;
  json pts = json::array();
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    json e;
    e["gamma"] = json_num(p.gamma);
    e["phi"] = json_num(p.phi);
    e["z"] = json_num(p.z);
    e["side"] = side_name(p.side);
    if (p.alpha) e["alpha"] = json_num(*p.alpha);
    e["slope"] = i + 1 < c.points.size() ? json_num(c.slopes[i]) : json();
    pts.push_back(e);
  }
  j["points"] = pts;
  return j;
}

std::string index_table_csv(const IndexTable& t) {
  std::ostringstream os;
  os << "x,m,err,k_used,status\n";
  for (const auto& e : t.entries) {
    if (e.certified)
      os << num_str(e.x) << ',' << num_str(e.value.m) << ','
         << num_str(e.value.err) << ',' << e.value.horizon << ",ok\n";
    else
      os << num_str(e.x) << ",,,," << "failed\n";
  }
  return os.str();
}

std::string frontier_csv(const FrontierCurve& c) {
  std::ostringstream os;
  os << "gamma,phi,z,side,alpha,slope\n";
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    os << num_str(p.gamma) << ',' << num_str(p.phi) << ',' << num_str(p.z)
       << ',' << side_name(p.side) << ','
       << (p.alpha ? num_str(*p.alpha) : std::string()) << ','
       << (i + 1 < c.points.size() ? num_str(c.slopes[i]) : std::string())
       << '\n';
  }
  return os.str();
}

json rmabp_from_config(const json& cfg, EngineConfig ecfg) {
  static const std::vector<std::string> known = {
      "budget", "projects", "episodes", "horizon",     "seed", "grid",
      "tol",    "sim_index_tol", "dual_tol", "tols", "horizon_tol", "jobs"};
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw input_error("unknown key '" + it.key() + "' in rmabp config");

  RMABPInstance inst;
  inst.budget = cfg.at("budget").get<double>();
  const int grid_n = cfg.value("grid", 201);
  const double index_tol = cfg.value("tol", 1e-8);
  VerifyTols vtols;
  if (cfg.contains("tols")) {
    const json& t = cfg["tols"];
    vtols.pcli1_tol = t.value("pcli1_tol", vtols.pcli1_tol);
    vtols.mono_tol = t.value("mono_tol", vtols.mono_tol);
    vtols.refinement_factor =
        t.value("refinement_factor", vtols.refinement_factor);
    vtols.pcli3_tol = t.value("pcli3_tol", vtols.pcli3_tol);
    vtols.index_tol = t.value("index_tol", vtols.index_tol);
  }
  ecfg.jobs = cfg.value("jobs", ecfg.jobs);

  for (const json& pj : cfg.at("projects")) {
    for (auto it = pj.begin(); it != pj.end(); ++it)
      if (it.key() != "model" && it.key() != "params" && it.key() != "x0")
        throw input_error("unknown key '" + it.key() + "' in rmabp project");
    RMABPProject p{make_model(pj.at("model").get<std::string>(),
                              pj.value("params", json::object())),
                   pj.at("x0").get<double>(),
                   {},
                   {}};
    auto grid = linspace(p.model.states.lower, p.model.states.upper, grid_n);
    p.report = full_report(p.model, grid, grid, vtols, ecfg);
    if (!p.report.passed())
      throw input_error("project '" + p.model.name +
                        "' failed certification (" +
                        verdict_name(p.report.overall) +
                        "); refusing to build an index policy for it");
    p.table = mp_index_table(p.model, grid, index_tol, ecfg);
    inst.projects.push_back(std::move(p));
  }
  inst.beta = inst.projects.front().model.discount;
  inst.validate();

  DualSolution dual = solve_dual(inst, cfg.value("dual_tol", 1e-6), 1e-9, ecfg);
  const int horizon =
      cfg.contains("horizon")
          ? cfg["horizon"].get<int>()
          : horizon_for_tolerance(inst, cfg.value("horizon_tol", 1e-4));
  SimResult sim = simulate_index_policy(
      inst, cfg.value("episodes", std::int64_t{10000}), horizon,
      cfg.value("seed", std::uint64_t{0}), cfg.value("sim_index_tol", 1e-6),
      ecfg);

  json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = "rmabp_result";
  out["dual"] = dual_json(dual);
  out["sim"] = sim_json(sim);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw input_error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace restless
