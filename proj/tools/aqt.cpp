#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aqt/cli/report.hpp"
#include "aqt/hamiltonians.hpp"
#include "aqt/parallel.hpp"

int main(int argc, char** argv) {
    CLI::App app{"aqt: numerical lab for the quantum adiabatic theorem"};
    app.require_subcommand(1);

    std::string scenario_path;
    unsigned jobs = aqt::default_jobs();
    std::optional<std::string> output;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", scenario_path, "Scenario JSON")->required();
    run->add_option("--jobs,-j", jobs, "Parallel T-points")->check(CLI::PositiveNumber);
    run->add_option("--output,-o", output, "Output directory");

    auto* families = app.add_subcommand("families", "List built-in Hamiltonian families");
    auto* version = app.add_subcommand("version", "Print the tool version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*run) return aqt::cli::run_scenario_file(scenario_path, jobs, output, std::cout, std::cerr);
    if (*families) {
        for (const auto& f : aqt::list_families()) {
            std::cout << f.kind << "\t" << f.parameters << "\t" << f.summary << "\n";
        }
        return 0;
    }
    if (*version) {
        std::cout << "aqt " << aqt::cli::kVersion << "\n";
        return 0;
    }
    return 0;
}
