#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aqt/hamiltonians.hpp"

namespace aqt::cli {

enum class Pipeline { Evolve, Berry, Audit, Counterexample, RlLab, FormalismGap };

const char* to_string(Pipeline pipeline) noexcept;

struct Scenario {
    std::string name;
    std::optional<FamilySpec> family;  ///< required for every pipeline except rl_lab
    Pipeline pipeline = Pipeline::Evolve;
    std::vector<double> T_grid;
    std::size_t N = 0;                 ///< grid floor; 0 selects the automatic grid
    std::vector<std::size_t> levels{0};
    std::optional<std::string> output_dir;
    bool emit_plots = false;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> expect;
    double epsilon = 1e-2;             ///< rl_lab
    double bound_M = 1.0;              ///< rl_lab
    nlohmann::json source;             ///< normalized echo of the parsed document
};

/// Throws Error(ConfigError) on any schema violation; nothing is computed.
Scenario parse_scenario(const nlohmann::json& document);

/// Reads and parses a scenario file. Unreadable or malformed JSON is a
/// ConfigError as well.
Scenario load_scenario(const std::filesystem::path& path);

FamilySpec parse_family_spec(const nlohmann::json& node);

/// Outcome keys a pipeline can be asked about in `expect`, with their
/// admissible values.
const std::map<std::string, std::vector<std::string>>& expectation_keys(Pipeline pipeline);

}  // namespace aqt::cli
