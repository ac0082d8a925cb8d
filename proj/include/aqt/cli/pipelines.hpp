#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqt/cli/scenario.hpp"
#include "aqt/conditions.hpp"

namespace aqt::cli {

/// What a pipeline hands to the report writer.
struct RunResult {
    nlohmann::json body = nlohmann::json::object();  ///< per-T records and pipeline extras
    std::vector<ConvergenceSeries> series;             ///< each becomes <label>.csv
    std::map<std::string, std::string> outcomes;       ///< keys matchable by `expect`
};

/// Runs the scenario's pipeline with up to `jobs` parallel T-points.
/// Library errors propagate unchanged.
RunResult run_pipeline(const Scenario& scenario, unsigned jobs);

RunResult run_evolve(const Scenario& scenario, unsigned jobs);
RunResult run_berry(const Scenario& scenario, unsigned jobs);
RunResult run_audit(const Scenario& scenario, unsigned jobs);
RunResult run_counterexample(const Scenario& scenario, unsigned jobs);
RunResult run_rl_lab(const Scenario& scenario, unsigned jobs);
RunResult run_formalism_gap(const Scenario& scenario, unsigned jobs);

}  // namespace aqt::cli
