#include "aqt/cli/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "aqt/errors.hpp"

namespace aqt::cli {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json series_json(const ConvergenceSeries& s) {
    return {{"label", s.label},
            {"T", s.T_values},
            {"values", s.values},
            {"slope", s.slope},
            {"slope_stderr", s.slope_stderr},
            {"verdict", to_string(s.verdict)},
            {"identically_zero", s.identically_zero}};
}

void require_finite(const json& node, const std::string& path) {
    if (node.is_number_float() && !std::isfinite(node.get<double>()))
        throw Error(ErrorKind::Overflow, "non-finite value in report at " + path);
    if (node.is_object()) {
        for (const auto& [k, v] : node.items()) require_finite(v, path + "." + k);
    } else if (node.is_array()) {
        for (std::size_t i = 0; i < node.size(); ++i) require_finite(node[i], path + "[" + std::to_string(i) + "]");
    }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
    f << content;
}

}  // namespace

std::string config_hash(const Scenario& scenario) {
    const std::string text = scenario.source.dump() + "|" + kVersion;
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool expectations_met(const Scenario& scenario, const RunResult& result) {
    for (const auto& [key, expected] : scenario.expect) {
        const auto it = result.outcomes.find(key);
        if (it == result.outcomes.end() || it->second != expected) return false;
    }
    return true;
}

json build_report(const Scenario& scenario, const RunResult& result) {
    json series = json::object();
    for (const auto& s : result.series) series[s.label] = series_json(s);
    json expectations = json::object();
    for (const auto& [key, expected] : scenario.expect) {
        const auto it = result.outcomes.find(key);
        const std::string actual = it == result.outcomes.end() ? "missing" : it->second;
        expectations[key] = {{"expected", expected}, {"actual", actual}, {"met", actual == expected}};
    }
    json report{
        {"tool", "aqt"},
        {"version", kVersion},
        {"config_hash", config_hash(scenario)},
        {"csv_schema", kCsvSchema},
        {"scenario", scenario.source},
        {"pipeline", to_string(scenario.pipeline)},
        {"results", result.body},
        {"series", series},
        {"outcomes", result.outcomes},
        {"expectations", expectations},
        {"status", expectations_met(scenario, result) ? "ok" : "mismatch"},
    };
    require_finite(report, "report");
    return report;
}

std::string series_csv(const ConvergenceSeries& series) {
    const auto running = running_slopes(series);
    std::string out = std::string(kCsvSchema) + "\n";
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        out += format_double(series.T_values[i]) + "," + format_double(series.values[i]) + ",";
        if (running[i]) out += format_double(*running[i]);
        out += "\n";
    }
    return out;
}

std::string series_svg(const ConvergenceSeries& series) {
    constexpr double W = 640, H = 400, L = 70, R = 20, TOP = 40, B = 50;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < series.values.size(); ++i) {
        lx.push_back(std::log10(series.T_values[i]));
        ly.push_back(std::log10(std::max(series.values[i], 1e-15)));
    }
    double x0 = std::floor(*std::min_element(lx.begin(), lx.end()));
    double x1 = std::ceil(*std::max_element(lx.begin(), lx.end()));
    double y0 = std::floor(*std::min_element(ly.begin(), ly.end()));
    double y1 = std::ceil(*std::max_element(ly.begin(), ly.end()));
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - TOP - B); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << series.label
      << " (slope " << format_double(std::round(series.slope * 1000) / 1000) << ", " << to_string(series.verdict)
      << ")</text>\n";
    s << "<rect x=\"" << L << "\" y=\"" << TOP << "\" width=\"" << W - L - R << "\" height=\"" << H - TOP - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(x0); e <= static_cast<int>(x1); ++e) {
        s << "<line x1=\"" << px(e) << "\" y1=\"" << TOP << "\" x2=\"" << px(e) << "\" y2=\"" << H - B
          << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << px(e) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
    }
    for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e) {
        s << "<line x1=\"" << L << "\" y1=\"" << py(e) << "\" x2=\"" << W - R << "\" y2=\"" << py(e)
          << "\" stroke=\"#ddd\"/>\n";
        s << "<text x=\"" << L - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
    s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">T</text>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < lx.size(); ++i) s << (i ? " " : "") << px(lx[i]) << "," << py(ly[i]);
    s << "\"/>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
        s << "<circle cx=\"" << px(lx[i]) << "\" cy=\"" << py(ly[i]) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    s << "</svg>\n";
    return s.str();
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_output, const Scenario& scenario) {
    if (cli_output) return *cli_output;
    if (scenario.output_dir) return *scenario.output_dir;
    if (const char* env = std::getenv("AQT_OUTPUT_DIR"); env && *env) return env;
    return std::filesystem::path("aqt-out") / scenario.name;
}

int run_scenario_file(const std::filesystem::path& scenario_path, unsigned jobs,
                      const std::optional<std::string>& cli_output, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    try {
        const Scenario scenario = load_scenario(scenario_path);
        const RunResult result = run_pipeline(scenario, jobs);
        const json report = build_report(scenario, result);

        const std::filesystem::path dir = resolve_output_dir(cli_output, scenario);
        std::filesystem::create_directories(dir);
        write_file(dir / "report.json", report.dump(2) + "\n");
        for (const auto& s : result.series) {
            write_file(dir / (s.label + ".csv"), series_csv(s));
            if (scenario.emit_plots && !s.values.empty()) write_file(dir / (s.label + ".svg"), series_svg(s));
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_file(dir / "timing.json", json{{"wall_seconds", wall}, {"jobs", jobs}}.dump(2) + "\n");

        for (const auto& [key, value] : result.outcomes) out << key << ": " << value << "\n";
        const bool ok = expectations_met(scenario, result);
        for (const auto& [key, expected] : scenario.expect) {
            const auto it = result.outcomes.find(key);
            if (it == result.outcomes.end() || it->second != expected)
                err << "expectation failed: " << key << " expected " << expected << ", got "
                    << (it == result.outcomes.end() ? "nothing" : it->second) << "\n";
        }
        out << "report: " << (dir / "report.json").string() << "\n";
        return ok ? 0 : 1;
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what();
        if (e.s()) err << " at s=" << *e.s();
        if (e.T()) err << " T=" << *e.T();
        err << "\n";
        return is_configuration_error(e.kind()) ? 2 : 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace aqt::cli
