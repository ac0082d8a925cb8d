#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "aqt/cli/pipelines.hpp"
#include "aqt/cli/scenario.hpp"

namespace aqt::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "T,value,slope_running";

/// 64-bit FNV-1a of the normalized scenario and tool version, as hex.
std::string config_hash(const Scenario& scenario);

/// report.json content. Deterministic: no timestamps, keys sorted.
/// Throws Error(Overflow) if any number in it is not finite.
nlohmann::json build_report(const Scenario& scenario, const RunResult& result);

/// True when every `expect` entry matches its outcome.
bool expectations_met(const Scenario& scenario, const RunResult& result);

std::string series_csv(const ConvergenceSeries& series);

/// Log-log line chart of one series; zero values are drawn at 1e-15.
std::string series_svg(const ConvergenceSeries& series);

/// --output, then the scenario's output_dir, then AQT_OUTPUT_DIR, then
/// ./aqt-out/<scenario name>.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_output, const Scenario& scenario);

/// Exit codes: 0 ok, 1 verdict mismatch, 2 configuration error, 3 numerical failure.
int run_scenario_file(const std::filesystem::path& scenario_path, unsigned jobs,
                      const std::optional<std::string>& cli_output, std::ostream& out, std::ostream& err);

}  // namespace aqt::cli
