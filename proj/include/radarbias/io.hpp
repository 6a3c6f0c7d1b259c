#pragma once

#include "radarbias/registration.hpp"
#include "radarbias/sim_harness.hpp"
#include "radarbias/steady_state.hpp"

#include <json.hpp>

#include <string>

namespace radarbias::io {

using nlohmann::json;

// Parsers reject unknown keys, wrong types and missing required fields with
// ConfigError naming the offending field. Schemas live in schemas/.

RegistrationProblem parse_registration_problem(const json& doc);
SimScenario parse_sim_scenario(const json& doc);

/// Reads a whole document from a path, or from stdin when path is "-".
json read_document(const std::string& path);

// Serializers round every number to 6 significant digits.

json to_json(const RegistrationSolution& sol);
json to_json(const SimReport& report, bool include_seeds = true);
json to_json(const GainSweepRow& row);

}  // namespace radarbias::io
