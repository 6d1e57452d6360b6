#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "restless/model.hpp"

namespace restless {

// Builds a registered model ("webcrawl", "channel", "reset") from its
// parameter object, or a "user" model from the primitive-expression form
// documented in the README.  Unknown parameter keys are rejected.
BanditModel make_model(const std::string& name, const nlohmann::json& params);

std::vector<std::string> registered_models();

}  // namespace restless
