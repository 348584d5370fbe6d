#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fpdtl/model.hpp"
#include "fpdtl/record.hpp"

namespace fpdtl::io {

using Json = nlohmann::json;

// Every document carries a header {"n_states", "n_actions"} next to its arrays.
//
//   transition model  {"transition": [s'][a][s]}
//   decision rule     {"rule": [s'][a]}
//   ideal model       {"ideal_transition": [s'][a][s], "ideal_rule": [s'][a]}
//   policy            {"horizon": H, "rules": [t][s'][a]}
//   record            {"initial_state": s0, "steps": [[a, s], ...]}
//
// Optional "state_labels" / "action_labels" string arrays are accepted and ignored.

Json to_json(const TransitionModel& m);
Json to_json(const DecisionRule& r);
Json to_json(const IdealClosedLoopModel& ideal);
Json to_json(const Policy& p);
Json to_json(const ClosedLoopRecord& rec);

TransitionModel transition_from_json(const Json& j);
DecisionRule rule_from_json(const Json& j);
IdealClosedLoopModel ideal_from_json(const Json& j);
Policy policy_from_json(const Json& j);
ClosedLoopRecord record_from_json(const Json& j);

/// Throws ConfigError if the file is missing or not valid JSON.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace fpdtl::io
