// Python bindings for the main operations: model construction, metric and
// index evaluation, certification reports, frontier sweeps and the
// resource-constrained scheduling pipeline.  Structured results cross the
// boundary as plain dicts/lists via their JSON form.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "restless/json_io.hpp"
#include "restless/models/channel.hpp"
#include "restless/models/webcrawl.hpp"
#include "restless/registry.hpp"

namespace py = pybind11;
using namespace restless;

namespace {

nlohmann::json json_from_py(const py::object& obj) {
  py::module json_mod = py::module::import("json");
  return nlohmann::json::parse(
      py::cast<std::string>(json_mod.attr("dumps")(obj)));
}

py::object py_from_json(const nlohmann::json& j) {
  py::module json_mod = py::module::import("json");
  return json_mod.attr("loads")(j.dump());
}

Side side_from(const std::string& s) {
  if (s == "right") return Side::passive_at_threshold;
  if (s == "left") return Side::active_at_threshold;
  throw input_error("side must be 'right' (z-policy) or 'left' (z-minus)");
}

InitialDistribution nu0_from(const py::object& spec, const BanditModel& m) {
  if (spec.is_none())
    return InitialDistribution::uniform(m.states.lower, m.states.upper, 201);
  const auto j = json_from_py(spec);
  if (j.contains("point")) return InitialDistribution::point_mass(j["point"]);
  if (j.contains("uniform")) {
    const auto& u = j["uniform"];
    return InitialDistribution::uniform(u.value("a", m.states.lower),
                                        u.value("b", m.states.upper),
                                        u.value("n", 201));
  }
  if (j.contains("nodes"))
    return InitialDistribution::weighted(j["nodes"], j["weights"]);
  throw input_error("nu0 must be {'point': x} | {'uniform': {...}} | nodes");
}

}  // namespace

PYBIND11_MODULE(restless_bandits, mod) {
  mod.doc() =
      "Marginal-productivity indices, PCL certification, frontiers and "
      "index-policy scheduling for real-state restless bandit projects";

  py::register_exception<domain_error>(mod, "DomainError", PyExc_ValueError);
  py::register_exception<input_error>(mod, "InputError", PyExc_ValueError);
  py::register_exception<resource_error>(mod, "ResourceError",
                                         PyExc_RuntimeError);
  py::register_exception<numeric_error>(mod, "NumericError",
                                        PyExc_ArithmeticError);
  py::register_exception<infeasibility_error>(mod, "InfeasibilityError",
                                              PyExc_RuntimeError);

  py::class_<BanditModel>(mod, "Model")
      .def_property_readonly("name",
                             [](const BanditModel& m) { return m.name; })
      .def_property_readonly(
          "states",
          [](const BanditModel& m) {
            return py::make_tuple(m.states.lower, m.states.upper);
          })
      .def_property_readonly(
          "beta", [](const BanditModel& m) { return m.discount; });

  mod.def(
      "make_model",
      [](const std::string& name, const py::object& params) {
        return make_model(
            name, params.is_none() ? nlohmann::json::object()
                                   : json_from_py(params));
      },
      py::arg("name"), py::arg("params") = py::none());

  mod.def("registered_models", &registered_models);

  mod.def(
      "metrics",
      [](const BanditModel& m, double x, double z, const std::string& side,
         py::object alpha, py::object k, double tol) {
        ThresholdSpec spec;
        spec.z = z;
        spec.side = side_from(side);
        if (!alpha.is_none()) spec.alpha = py::cast<double>(alpha);
        MetricBundle b;
        if (!k.is_none())
          b = k_horizon_metrics(m, x, spec, py::cast<int>(k));
        else
          b = metrics_to_tolerance(m, x, spec, tol);
        return py_from_json(bundle_json(b));
      },
      py::arg("model"), py::arg("x"), py::arg("z"), py::arg("side") = "right",
      py::arg("alpha") = py::none(), py::arg("k") = py::none(),
      py::arg("tol") = 1e-8);

  mod.def(
      "mp_index",
      [](const BanditModel& m, double x, double tol) {
        const auto v = mp_index_at_tol(m, x, tol);
        py::dict d;
        d["x"] = v.x;
        d["m"] = v.m;
        d["err"] = v.err;
        d["k"] = v.horizon;
        return d;
      },
      py::arg("model"), py::arg("x"), py::arg("tol") = 1e-8);

  mod.def(
      "index_table",
      [](const BanditModel& m, const std::vector<double>& grid, double tol) {
        const auto table = mp_index_table(m, grid, tol);
        py::list out;
        for (const auto& e : table.entries) {
          py::dict d;
          d["x"] = e.x;
          d["certified"] = e.certified;
          if (e.certified) {
            d["m"] = e.value.m;
            d["err"] = e.value.err;
            d["k"] = e.value.horizon;
          } else {
            d["error"] = e.error;
          }
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("grid"), py::arg("tol") = 1e-8);

  mod.def(
      "verify",
      [](const BanditModel& m, int grid_n) {
        if (!m.states.bounded())
          throw input_error("verify needs a bounded state interval");
        auto grid = linspace(m.states.lower, m.states.upper, grid_n);
        return py_from_json(report_json(full_report(m, grid, grid)));
      },
      py::arg("model"), py::arg("grid") = 201);

  mod.def(
      "frontier",
      [](const BanditModel& m, const py::object& nu0, int grid_n, double tol,
         int probes) {
        auto grid = linspace(m.states.lower, m.states.upper, grid_n);
        auto cert = full_report(m, grid, grid);
        if (!cert.passed())
          throw input_error("frontier refused: certification outcome is " +
                            std::string(verdict_name(cert.overall)));
        auto dist = nu0_from(nu0, m);
        auto curve =
            sweep_frontier(m, dist, default_threshold_grid(m), tol, cert);
        auto j = frontier_json(curve);
        nlohmann::json parr = nlohmann::json::array();
        if (probes > 0) {
          std::vector<double> interior;
          for (const auto& p : curve.points)
            if (std::isfinite(p.z) && p.z > m.states.lower &&
                p.z < m.states.upper)
              interior.push_back(p.z);
          const int np =
              std::min(static_cast<std::size_t>(probes), interior.size());
          for (int i = 0; i < np; ++i) {
            const double z =
                interior[i * (interior.size() - 1) /
                         static_cast<std::size_t>(std::max(1, np - 1))];
            auto chk = shadow_price_check(m, dist, z, 1e-6);
            parr.push_back(
                {{"z", chk.z},
                 {"status",
                  chk.status == ShadowStatus::pass         ? "pass"
                  : chk.status == ShadowStatus::degenerate ? "degenerate"
                                                           : "fail"},
                 {"slope", json_num(chk.slope)},
                 {"index", json_num(chk.index)}});
          }
        }
        j["shadow_price_probes"] = parr;
        return py_from_json(j);
      },
      py::arg("model"), py::arg("nu0") = py::none(), py::arg("grid") = 201,
      py::arg("tol") = 1e-8, py::arg("probes") = 0);

  mod.def(
      "reachable_set",
      [](const BanditModel& m, double root, int max_depth) {
        return reachable_set(m, root, max_depth);
      },
      py::arg("model"), py::arg("root"), py::arg("max_depth") = -1);

  // full scheduling pipeline (certify, dual bound, index-policy simulation)
  mod.def(
      "rmabp",
      [](const py::object& config) {
        return py_from_json(rmabp_from_config(json_from_py(config)));
      },
      py::arg("config"));

  // closed-form references for the bundled models
  mod.def(
      "webcrawl_index",
      [](double x, double alpha, double b, double C, double beta) {
        return webcrawl_index({alpha, b, C, beta}, x);
      },
      py::arg("x"), py::arg("alpha") = 0.5, py::arg("b") = 1.0,
      py::arg("C") = 1.0, py::arg("beta") = 0.9);
  mod.def(
      "webcrawl_avg_index",
      [](double x, double alpha, double b, double C) {
        return webcrawl_avg_index({alpha, b, C, 0.9}, x);
      },
      py::arg("x"), py::arg("alpha") = 0.5, py::arg("b") = 1.0,
      py::arg("C") = 1.0);
  mod.def(
      "channel_index",
      [](double x, double p, double q, double beta) {
        return channel_index({p, q, beta}, x);
      },
      py::arg("x"), py::arg("p") = 0.3, py::arg("q") = 0.2,
      py::arg("beta") = 0.9);
}
