#include "aqt/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "aqt/errors.hpp"

namespace aqt::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorKind::ConfigError, message); }

void check_keys(const json& node, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : node.items()) {
        if (!allowed.contains(key)) fail("unknown key '" + key + "' in " + where);
    }
}

double number(const json& node, const std::string& what) {
    if (!node.is_number()) fail(what + " must be a number");
    const double v = node.get<double>();
    if (!std::isfinite(v)) fail(what + " must be finite");
    return v;
}

Complex entry(const json& node) {
    if (node.is_number()) return {number(node, "matrix entry"), 0.0};
    if (node.is_array() && node.size() == 2) return {number(node[0], "matrix entry"), number(node[1], "matrix entry")};
    fail("matrix entries are numbers or [re, im] pairs");
}

ComplexMatrix matrix(const json& node) {
    if (!node.is_array() || node.empty()) fail("matrix must be a nonempty array of rows");
    const std::size_t d = node.size();
    if (d > kMaxDim) fail("matrix dimension exceeds " + std::to_string(kMaxDim));
    ComplexMatrix m(d);
    for (std::size_t r = 0; r < d; ++r) {
        if (!node[r].is_array() || node[r].size() != d) fail("matrix must be square");
        for (std::size_t c = 0; c < d; ++c) m(r, c) = entry(node[r][c]);
    }
    return m;
}

CoefficientTerm term(const json& node) {
    if (!node.is_object()) fail("coefficient terms are objects");
    check_keys(node, {"coefficient", "s_power", "inv_T_power", "cos_freq", "sin_freq"}, "coefficient term");
    CoefficientTerm t;
    auto integer = [&](const char* key, int& out) {
        if (!node.contains(key)) return;
        if (!node[key].is_number_integer()) fail(std::string(key) + " must be an integer");
        out = node[key].get<int>();
        if (out < 0) fail(std::string(key) + " must be non-negative");
    };
    if (node.contains("coefficient")) t.coefficient = number(node["coefficient"], "coefficient");
    integer("s_power", t.s_power);
    integer("inv_T_power", t.inv_T_power);
    integer("cos_freq", t.cos_freq);
    integer("sin_freq", t.sin_freq);
    return t;
}

std::optional<Pipeline> pipeline_from_string(const std::string& text) {
    static const std::map<std::string, Pipeline> table{
        {"evolve", Pipeline::Evolve},         {"berry", Pipeline::Berry},
        {"audit", Pipeline::Audit},           {"counterexample", Pipeline::Counterexample},
        {"rl_lab", Pipeline::RlLab},          {"formalism_gap", Pipeline::FormalismGap},
    };
    const auto it = table.find(text);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

const std::vector<std::string> kVerdicts{"vanishes", "persists", "inconclusive"};
const std::vector<std::string> kChecks{"pass", "fail"};

}  // namespace

const char* to_string(Pipeline pipeline) noexcept {
    switch (pipeline) {
        case Pipeline::Evolve: return "evolve";
        case Pipeline::Berry: return "berry";
        case Pipeline::Audit: return "audit";
        case Pipeline::Counterexample: return "counterexample";
        case Pipeline::RlLab: return "rl_lab";
        case Pipeline::FormalismGap: return "formalism_gap";
    }
    return "evolve";
}

const std::map<std::string, std::vector<std::string>>& expectation_keys(Pipeline pipeline) {
    static const std::map<Pipeline, std::map<std::string, std::vector<std::string>>> table{
        {Pipeline::Evolve, {{"adiabatic", kVerdicts}, {"state_distance", kVerdicts}, {"formalism", kChecks}}},
        {Pipeline::Berry, {{"stability", kVerdicts}}},
        {Pipeline::Audit,
         {{"b", kVerdicts}, {"c", {"nonzero", "zero"}}, {"d", kVerdicts}, {"offdiagonal_kernel", kVerdicts}, {"diagonal_kernel", kVerdicts}}},
        {Pipeline::Counterexample,
         {{"base_adiabatic", kVerdicts},
          {"dual_adiabatic", kVerdicts},
          {"d_base", kVerdicts},
          {"d_dual", kVerdicts},
          {"dual_propagator", kChecks}}},
        {Pipeline::RlLab,
         {{"rl_linear", kVerdicts},
          {"rl_linear_s", kVerdicts},
          {"rl_fresnel", kVerdicts},
          {"uniform_family", kChecks},
          {"step_chain", kChecks}}},
        {Pipeline::FormalismGap, {{"w_convergence", kVerdicts}, {"dW_magnitude", kVerdicts}}},
    };
    return table.at(pipeline);
}

FamilySpec parse_family_spec(const json& node) {
    if (!node.is_object()) fail("family must be an object");
    check_keys(node, {"name", "kind", "parameters", "matrix", "basis", "coefficients", "base"}, "family");
    if (!node.contains("kind") || !node["kind"].is_string()) fail("family.kind must be a string");
    const auto kind = family_kind_from_string(node["kind"].get<std::string>());
    if (!kind) fail("unknown family kind '" + node["kind"].get<std::string>() + "'");

    FamilySpec spec;
    spec.kind = *kind;
    spec.name = node.contains("name") ? node["name"].get<std::string>() : std::string(aqt::to_string(*kind));
    if (node.contains("parameters")) {
        if (!node["parameters"].is_object()) fail("family.parameters must be an object");
        for (const auto& [key, value] : node["parameters"].items()) spec.parameters[key] = number(value, key);
    }
    if (node.contains("matrix")) spec.matrix = matrix(node["matrix"]);
    if (node.contains("basis")) {
        if (!node["basis"].is_array()) fail("family.basis must be an array of matrices");
        for (const auto& m : node["basis"]) spec.basis.push_back(matrix(m));
    }
    if (node.contains("coefficients")) {
        if (!node["coefficients"].is_array()) fail("family.coefficients must be an array");
        for (const auto& c : node["coefficients"]) {
            if (!c.is_array()) fail("each coefficient is an array of terms");
            std::vector<CoefficientTerm> terms;
            for (const auto& t : c) terms.push_back(term(t));
            spec.coefficients.push_back(std::move(terms));
        }
    }
    if (node.contains("base")) spec.base = std::make_shared<const FamilySpec>(parse_family_spec(node["base"]));
    return spec;
}

Scenario parse_scenario(const json& document) {
    if (!document.is_object()) fail("scenario must be a JSON object");
    check_keys(document,
               {"name", "family", "pipeline", "T_grid", "N", "levels", "output_dir", "emit_plots", "seed", "expect",
                "epsilon", "bound_M"},
               "scenario");
    Scenario sc;
    if (!document.contains("pipeline") || !document["pipeline"].is_string()) fail("pipeline must be a string");
    const auto pipeline = pipeline_from_string(document["pipeline"].get<std::string>());
    if (!pipeline) fail("unknown pipeline '" + document["pipeline"].get<std::string>() + "'");
    sc.pipeline = *pipeline;

    if (document.contains("name")) {
        if (!document["name"].is_string()) fail("name must be a string");
        sc.name = document["name"].get<std::string>();
        static const std::regex safe("[A-Za-z0-9_.-]+");
        if (!std::regex_match(sc.name, safe)) fail("name may only contain letters, digits, '_', '.', '-'");
    } else {
        sc.name = to_string(sc.pipeline);
    }

    if (document.contains("family")) {
        sc.family = parse_family_spec(document["family"]);
    } else if (sc.pipeline != Pipeline::RlLab) {
        fail("pipeline '" + std::string(to_string(sc.pipeline)) + "' needs a family");
    }

    if (!document.contains("T_grid") || !document["T_grid"].is_array() || document["T_grid"].empty())
        fail("T_grid must be a nonempty array");
    for (const auto& t : document["T_grid"]) sc.T_grid.push_back(number(t, "T_grid entry"));
    for (std::size_t i = 0; i < sc.T_grid.size(); ++i) {
        if (!(sc.T_grid[i] > 0.0)) fail("T_grid entries must be positive");
        if (i > 0 && !(sc.T_grid[i] > sc.T_grid[i - 1])) fail("T_grid must be strictly ascending");
    }
    if (sc.T_grid.size() < 2 && sc.pipeline != Pipeline::Berry)
        fail("T_grid needs at least two values to fit a decay");

    if (document.contains("N")) {
        if (!document["N"].is_number_unsigned()) fail("N must be a non-negative integer");
        sc.N = document["N"].get<std::size_t>();
        if (sc.N < 64) fail("N must be at least 64");
    }
    if (document.contains("levels")) {
        if (!document["levels"].is_array() || document["levels"].empty()) fail("levels must be a nonempty array");
        sc.levels.clear();
        for (const auto& l : document["levels"]) {
            if (!l.is_number_unsigned()) fail("levels are non-negative integers");
            sc.levels.push_back(l.get<std::size_t>());
        }
    }
    if (document.contains("output_dir")) {
        if (!document["output_dir"].is_string()) fail("output_dir must be a string");
        sc.output_dir = document["output_dir"].get<std::string>();
    }
    if (document.contains("emit_plots")) {
        if (!document["emit_plots"].is_boolean()) fail("emit_plots must be a boolean");
        sc.emit_plots = document["emit_plots"].get<bool>();
    }
    if (document.contains("seed")) {
        if (!document["seed"].is_number_unsigned()) fail("seed must be a non-negative integer");
        sc.seed = document["seed"].get<std::uint64_t>();
    }
    if (document.contains("epsilon")) {
        sc.epsilon = number(document["epsilon"], "epsilon");
        if (!(sc.epsilon > 0.0)) fail("epsilon must be positive");
    }
    if (document.contains("bound_M")) {
        sc.bound_M = number(document["bound_M"], "bound_M");
        if (!(sc.bound_M > 0.0)) fail("bound_M must be positive");
    }

    if (document.contains("expect")) {
        if (!document["expect"].is_object()) fail("expect must be an object");
        const auto& keys = expectation_keys(sc.pipeline);
        static const std::regex pair_key("d_([0-9]+)_([0-9]+)");
        for (const auto& [key, value] : document["expect"].items()) {
            if (!value.is_string()) fail("expect." + key + " must be a string");
            const std::string v = value.get<std::string>();
            std::vector<std::string> allowed;
            std::smatch m;
            if (const auto it = keys.find(key); it != keys.end()) {
                allowed = it->second;
            } else if (sc.pipeline == Pipeline::Audit && std::regex_match(key, m, pair_key)) {
                if (m[1] == m[2]) fail("expect." + key + " names the same level twice");
                allowed = kVerdicts;
            } else {
                fail("expect key '" + key + "' is not produced by pipeline " + to_string(sc.pipeline));
            }
            if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                fail("expect." + key + " has inadmissible value '" + v + "'");
            sc.expect[key] = v;
        }
    }

    sc.source = document;
    sc.source.erase("output_dir");
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot read scenario file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    json document;
    try {
        document = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        fail(std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse_scenario(document);
}

}  // namespace aqt::cli
