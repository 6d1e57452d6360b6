#include "restless/registry.hpp"

#include <set>

#include "restless/models/channel.hpp"
#include "restless/models/reset.hpp"
#include "restless/models/webcrawl.hpp"

namespace restless {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& params,
                         const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = params.begin(); it != params.end(); ++it)
    if (!allowed.count(it.key()))
      throw input_error("unknown key '" + it.key() + "' in " + where);
}

double get_num(const json& params, const std::string& key, double dflt) {
  if (!params.contains(key)) return dflt;
  if (!params[key].is_number())
    throw input_error("parameter '" + key + "' must be a number");
  return params[key].get<double>();
}

// Primitive expression grammar for user models:
//   {"const": v} | {"affine": {"a":..,"b":..}}      -> a + b*x
//   {"rational": {"a":..,"b":..,"c":..,"d":..}}     -> (a + b*x)/(c + d*x)
StateFn parse_expr(const json& e, const std::string& where) {
  if (!e.is_object())
    throw input_error("expression in " + where + " must be an object");
  if (e.contains("const")) {
    reject_unknown_keys(e, {"const"}, where);
    double v = e["const"].get<double>();
    return [v](double) { return v; };
  }
  if (e.contains("affine")) {
    reject_unknown_keys(e, {"affine"}, where);
    const json& c = e["affine"];
    reject_unknown_keys(c, {"a", "b"}, where + ".affine");
    double a = get_num(c, "a", 0.0), b = get_num(c, "b", 0.0);
    return [a, b](double x) { return a + b * x; };
  }
  if (e.contains("rational")) {
    reject_unknown_keys(e, {"rational"}, where);
    const json& c = e["rational"];
    reject_unknown_keys(c, {"a", "b", "c", "d"}, where + ".rational");
    double a = get_num(c, "a", 0.0), b = get_num(c, "b", 0.0);
    double cc = get_num(c, "c", 1.0), d = get_num(c, "d", 0.0);
    return [a, b, cc, d](double x) { return (a + b * x) / (cc + d * x); };
  }
  throw input_error("expression in " + where +
                    " must be one of const/affine/rational");
}

std::vector<KernelBranch> parse_branches(const json& arr,
                                         const std::string& where) {
  if (!arr.is_array() || arr.empty())
    throw input_error(where + " must be a nonempty array of branches");
  std::vector<KernelBranch> out;
  for (const auto& b : arr) {
    reject_unknown_keys(b, {"prob", "map"}, where);
    KernelBranch br;
    br.prob = b.contains("prob") ? parse_expr(b["prob"], where + ".prob")
                                 : StateFn([](double) { return 1.0; });
    if (!b.contains("map")) throw input_error(where + " branch needs a map");
    br.map = parse_expr(b["map"], where + ".map");
    out.push_back(std::move(br));
  }
  return out;
}

BanditModel make_user_model(const json& params) {
  reject_unknown_keys(
      params, {"states", "beta", "reward", "cost", "kernel"}, "user model");
  for (const char* key : {"states", "beta", "reward", "cost", "kernel"})
    if (!params.contains(key))
      throw input_error(std::string("user model needs '") + key + "'");

  const json& st = params["states"];
  reject_unknown_keys(st, {"lower", "upper"}, "user model states");
  BanditModel m{StateInterval(st.at("lower").get<double>(),
                              st.at("upper").get<double>()),
                nullptr,
                nullptr,
                {},
                params["beta"].get<double>(),
                {},
                "user"};
  if (!(m.discount >= 0.0 && m.discount < 1.0))
    throw input_error("user model beta must be in [0,1)");

  auto per_action = [&](const json& obj, const std::string& where) {
    reject_unknown_keys(obj, {"passive", "active"}, where);
    StateFn f0 = parse_expr(obj.at("passive"), where + ".passive");
    StateFn f1 = parse_expr(obj.at("active"), where + ".active");
    return StateActionFn(
        [f0, f1](double x, int a) { return a ? f1(x) : f0(x); });
  };
  m.reward = per_action(params["reward"], "user model reward");
  m.cost = per_action(params["cost"], "user model cost");

  const json& kern = params["kernel"];
  reject_unknown_keys(kern, {"passive", "active"}, "user model kernel");
  m.kernel.action[0] =
      parse_branches(kern.at("passive"), "user model kernel.passive");
  m.kernel.action[1] =
      parse_branches(kern.at("active"), "user model kernel.active");

  fit_default_weight_bound(m);
  return m;
}

}  // namespace

BanditModel make_model(const std::string& name, const json& params) {
  if (name == "webcrawl") {
    reject_unknown_keys(params, {"alpha", "b", "C", "beta"}, "webcrawl params");
    WebCrawlParams p;
    p.alpha = get_num(params, "alpha", p.alpha);
    p.b = get_num(params, "b", p.b);
    p.C = get_num(params, "C", p.C);
    p.beta = get_num(params, "beta", p.beta);
    return make_webcrawl_model(p);
  }
  if (name == "channel") {
    reject_unknown_keys(params, {"p", "q", "beta"}, "channel params");
    ChannelParams p;
    p.p = get_num(params, "p", p.p);
    p.q = get_num(params, "q", p.q);
    p.beta = get_num(params, "beta", p.beta);
    return make_channel_model(p);
  }
  if (name == "reset") {
    reject_unknown_keys(params, {"beta", "c_active", "sticky"}, "reset params");
    ResetParams p;
    p.beta = get_num(params, "beta", p.beta);
    p.c_active = get_num(params, "c_active", p.c_active);
    p.sticky = get_num(params, "sticky", p.sticky);
    return make_reset_model(p);
  }
  if (name == "user") return make_user_model(params);
  throw input_error("unknown model '" + name + "'; registered: webcrawl, " +
                    "channel, reset, user");
}

std::vector<std::string> registered_models() {
  return {"webcrawl", "channel", "reset", "user"};
}

}  // namespace restless
