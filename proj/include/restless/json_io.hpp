#pragma once

#include <string>

#include "json.hpp"
#include "restless/rmabp.hpp"

namespace restless {

inline constexpr int kSchemaVersion = 1;

// JSON encoding of a double: numbers stay numbers; +/-inf and nan become
// the strings "inf", "-inf", "nan" (nlohmann/json would emit null).
nlohmann::json json_num(double v);

// Shortest round-trip decimal form, used for CSV cells.
std::string num_str(double v);

nlohmann::json report_json(const PCLReport& r);
nlohmann::json bundle_json(const MetricBundle& b);
nlohmann::json dual_json(const DualSolution& d);
nlohmann::json sim_json(const SimResult& s);
nlohmann::json frontier_json(const FrontierCurve& c);

// CSV columns: x,m,err,k_used,status
std::string index_table_csv(const IndexTable& t);
// CSV columns: gamma,phi,z,side,alpha,slope
std::string frontier_csv(const FrontierCurve& c);

// Full scheduling pipeline from an instance config (see README): builds and
// certifies each project, solves the dual, simulates the index policy, and
// returns the combined result document.  Projects failing certification are
// refused with an input_error.
nlohmann::json rmabp_from_config(const nlohmann::json& cfg,
                                 EngineConfig ecfg = {});

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace restless
