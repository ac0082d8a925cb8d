#include "aqt/cli/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aqt/adiabatic.hpp"
#include "aqt/errors.hpp"
#include "aqt/evolution.hpp"
#include "aqt/parallel.hpp"

namespace aqt::cli {

using nlohmann::json;

namespace {

constexpr double kFormalismTolerance = 1e-6;
constexpr double kDualPropagatorTolerance = 1e-5;

HamiltonianFamily family_of(const Scenario& sc) {
    if (!sc.family) throw Error(ErrorKind::ConfigError, "scenario has no family");
    return parse_family(*sc.family);
}

AuditOptions options_of(const Scenario& sc, unsigned jobs) { return {sc.N, jobs}; }

void check_levels(const Scenario& sc, const HamiltonianFamily& family) {
    for (std::size_t l : sc.levels) {
        if (l >= family.dim())
            throw Error(ErrorKind::InvalidParameter,
                        "level " + std::to_string(l) + " exceeds the family dimension " + std::to_string(family.dim()));
    }
}

std::string pair_tag(std::size_t j, std::size_t k) { return std::to_string(j) + "_" + std::to_string(k); }

std::vector<double> column(const std::vector<json>& records, const char* key) {
    std::vector<double> out;
    for (const auto& r : records) out.push_back(r.at(key).get<double>());
    return out;
}

// Exact state and adiabatic approximation for one level at one T.
struct EvolvedPoint {
    double infidelity = 0.0;
    double state_distance = 0.0;
};

EvolvedPoint evolve_point(const HamiltonianFamily& family, const FrameTrajectory& frames, std::size_t level) {
    const StateTrajectory psi = integrate_schrodinger(family, frames.T, frames.frames[0].states[level], frames.N);
    const AdiabaticState approx = adiabatic_state(frames, level, frames.N);
    return {infidelity(psi.values.back(), approx.state), state_distance(psi.values.back(), approx.state)};
}

}  // namespace

// ---------------------------------------------------------------- evolve

RunResult run_evolve(const Scenario& sc, unsigned jobs) {
    const HamiltonianFamily family = family_of(sc);
    check_levels(sc, family);
    const std::size_t level = sc.levels.front();
    const auto& T_grid = sc.T_grid;

    std::vector<json> records(T_grid.size());
    parallel_for(T_grid.size(), jobs, [&](std::size_t t) {
        const double T = T_grid[t];
        const std::size_t N = default_grid_size(family, T, sc.N);
        const FrameTrajectory frames = frame_trajectory(family, T, N);
        const ComplexVector& psi0 = frames.frames[0].states[level];
        const StateTrajectory psi = integrate_schrodinger(family, T, psi0, N);
        const AdiabaticState approx = adiabatic_state(frames, level, N);

        const auto kernel = build_kernel(frames);
        const VolterraSolution volterra = solve_volterra(kernel, N);
        const OperatorTrajectory ode = kernel_ode(kernel);
        const ComplexMatrix& W1 = volterra.W.values.back();
        const StateTrajectory phi = adiabatic_transform(psi, frames);
        const ComplexVector predicted = to_computational(frames, W1) * psi0;
        const ExponentialDiagnostic expo = ordinary_exponential_diagnostic(kernel, N, W1);

        records[t] = json{
            {"T", T},
            {"N", N},
            {"infidelity", infidelity(psi.values.back(), approx.state)},
            {"state_distance", state_distance(psi.values.back(), approx.state)},
            {"volterra_vs_ode", frobenius_norm(W1 - ode.values.back())},
            {"transform_residual", norm(phi.values.back() - predicted)},
            {"exponential_discrepancy", expo.discrepancy},
            {"picard_correction", volterra.picard_correction},
            {"w_unitarity_defect", unitarity_defect(W1)},
        };
    });

    RunResult out;
    out.body["level"] = level;
    out.body["records"] = records;
    std::vector<double> T(T_grid.begin(), T_grid.end());
    out.series.push_back(make_series("infidelity", T, column(records, "infidelity")));
    out.series.push_back(make_series("state_distance", T, column(records, "state_distance")));
    out.series.push_back(make_series("volterra_vs_ode", T, column(records, "volterra_vs_ode")));
    const auto formalism = column(records, "volterra_vs_ode");
    out.outcomes["adiabatic"] = to_string(out.series[0].verdict);
    out.outcomes["state_distance"] = to_string(out.series[1].verdict);
    out.outcomes["formalism"] =
        *std::max_element(formalism.begin(), formalism.end()) <= kFormalismTolerance ? "pass" : "fail";
    return out;
}

// ---------------------------------------------------------------- berry

RunResult run_berry(const Scenario& sc, unsigned jobs) {
    const HamiltonianFamily family = family_of(sc);
    check_levels(sc, family);
    if (!family.closed_loop()) throw Error(ErrorKind::NotClosedLoop, "berry pipeline needs a closed-loop family");

    RunResult out;
    std::vector<Verdict> verdicts;
    json levels = json::array();
    for (std::size_t level : sc.levels) {
        const BerrySeriesReport r = berry_phase_series(family, level, sc.T_grid, options_of(sc, jobs));
        json records = json::array();
        for (std::size_t t = 0; t < sc.T_grid.size(); ++t) records.push_back({{"T", sc.T_grid[t]}, {"berry_phase", r.phases[t]}});
        levels.push_back({{"level", level}, {"reference_phase", r.reference_phase}, {"records", records}});
        ConvergenceSeries s = r.deviation;
        s.label = "berry_deviation_" + std::to_string(level);
        verdicts.push_back(s.verdict);
        out.series.push_back(std::move(s));
    }
    out.body["levels"] = levels;
    out.body["reference"] = family.limit_available() ? "T=inf" : "T=max";
    out.outcomes["stability"] = to_string(combine(verdicts));
    return out;
}

// ---------------------------------------------------------------- audit

RunResult run_audit(const Scenario& sc, unsigned jobs) {
    const HamiltonianFamily family = family_of(sc);
    const AuditOptions options = options_of(sc, jobs);
    const ReferencePlan plan = plan_reference(family, sc.T_grid, options, true);
    const std::size_t d = family.dim();
    const auto targets = default_s_targets();
    const bool finite_reference = std::isfinite(plan.T_reference);

    struct Point {
        std::optional<FrameDistance> b;
        std::vector<CouplingReport> c;
        std::vector<ConditionDPoint> d;
        double offdiag = 0.0;
        std::optional<double> diag;
    };
    std::vector<Point> points(plan.T_values.size());
    parallel_for(plan.T_values.size(), jobs, [&](std::size_t t) {
        const double T = plan.T_values[t];
        const FrameTrajectory frames = frame_trajectory(family, T, plan.N[t]);
        Point& p = points[t];
        p.c = check_condition_c(frames);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = j + 1; k < d; ++k) p.d.push_back(condition_d_point(frames, j, k, targets));
        }
        const auto kernel = build_kernel(frames);
        p.offdiag = offdiagonal_kernel_integral(kernel, targets);
        if (finite_reference && T == plan.T_reference) return;
        const FrameTrajectory reference = frame_trajectory(family, plan.T_reference, plan.N[t]);
        p.b = frame_distance(frames, reference);
        const auto mine = diagonal_kernel_integral(kernel);
        const auto theirs = diagonal_kernel_integral(build_kernel(reference));
        double diff = 0.0;
        for (std::size_t n = 0; n < d; ++n) diff = std::max(diff, std::abs(mine[n] - theirs[n]));
        p.diag = diff;
    });

    RunResult out;
    std::vector<json> records;
    std::vector<double> T_all(plan.T_values), T_ref, b_values, diag_values, offdiag_values;
    for (std::size_t t = 0; t < points.size(); ++t) {
        const Point& p = points[t];
        json r{{"T", plan.T_values[t]}, {"N", plan.N[t]}, {"offdiagonal_kernel", p.offdiag}};
        if (p.b) {
            T_ref.push_back(plan.T_values[t]);
            b_values.push_back(std::max(p.b->state, p.b->derivative));
            diag_values.push_back(*p.diag);
            r["b_state"] = p.b->state;
            r["b_derivative"] = p.b->derivative;
            r["diagonal_kernel"] = *p.diag;
        }
        json dj = json::object();
        for (std::size_t q = 0, j = 0; j < d; ++j) {
            for (std::size_t k = j + 1; k < d; ++k, ++q) {
                dj[pair_tag(j, k)] = {{"effective", p.d[q].effective}, {"bare", p.d[q].bare}};
            }
        }
        r["d"] = dj;
        offdiag_values.push_back(p.offdiag);
        records.push_back(std::move(r));
    }

    // Condition (c) aggregated over T: the largest coupling seen for each pair.
    json coupling = json::array();
    bool any_nonzero = false;
    std::vector<CouplingReport> worst = points.front().c;
    for (const auto& p : points) {
        for (std::size_t q = 0; q < worst.size(); ++q) {
            if (p.c[q].max_coupling > worst[q].max_coupling) worst[q] = p.c[q];
        }
    }
    for (const auto& c : worst) {
        const bool zero = c.max_coupling < 1e-10;
        any_nonzero = any_nonzero || !zero;
        coupling.push_back({{"j", c.j},
                            {"k", c.k},
                            {"max_coupling", c.max_coupling},
                            {"s_at_max", c.s_at_max},
                            {"identically_zero", zero}});
    }

    out.series.push_back(make_series("condition_b", T_ref, b_values));
    out.outcomes["b"] = to_string(out.series.back().verdict);
    out.outcomes["c"] = any_nonzero ? "nonzero" : "zero";

    std::vector<Verdict> d_verdicts;
    for (std::size_t q = 0, j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k, ++q) {
            std::vector<double> eff, bare;
            for (const auto& p : points) {
                eff.push_back(p.d[q].effective);
                bare.push_back(p.d[q].bare);
            }
            ConvergenceSeries s = make_series("condition_d_" + pair_tag(j, k), T_all, eff);
            out.outcomes["d_" + pair_tag(j, k)] = to_string(s.verdict);
            out.outcomes["d_" + pair_tag(k, j)] = to_string(s.verdict);
            d_verdicts.push_back(s.verdict);
            out.series.push_back(std::move(s));
            out.series.push_back(make_series("condition_d_" + pair_tag(j, k) + "_bare", T_all, bare));
        }
    }
    out.outcomes["d"] = to_string(combine(d_verdicts));
    out.series.push_back(make_series("offdiagonal_kernel_integral", T_all, offdiag_values));
    out.outcomes["offdiagonal_kernel"] = to_string(out.series.back().verdict);
    out.series.push_back(make_series("diagonal_kernel_integral", T_ref, diag_values));
    out.outcomes["diagonal_kernel"] = to_string(out.series.back().verdict);

    out.body["reference"] = finite_reference ? "T=max" : "T=inf";
    out.body["records"] = records;
    out.body["coupling"] = coupling;
    return out;
}

// ---------------------------------------------------------------- counterexample

RunResult run_counterexample(const Scenario& sc, unsigned jobs) {
    if (!sc.family) throw Error(ErrorKind::ConfigError, "scenario has no family");
    const FamilySpec& base_spec =
        sc.family->kind == FamilyKind::DualOf && sc.family->base ? *sc.family->base : *sc.family;
    const HamiltonianFamily base = parse_family(base_spec);
    const HamiltonianFamily dual = dual_family(base);
    check_levels(sc, base);
    const std::size_t level = sc.levels.front();
    const auto targets = default_s_targets();

    std::vector<json> records(sc.T_grid.size());
    parallel_for(sc.T_grid.size(), jobs, [&](std::size_t t) {
        const double T = sc.T_grid[t];
        const std::size_t N = default_grid_size(base, T, sc.N);
        const FrameTrajectory base_frames = frame_trajectory(base, T, N);
        const EvolvedPoint b = evolve_point(base, base_frames, level);
        const double d_base = base.dim() > 1 ? condition_d_point(base_frames, 0, 1, targets).effective : 0.0;

        const FrameTrajectory dual_frames = frame_trajectory(dual, T, N);
        const EvolvedPoint u = evolve_point(dual, dual_frames, level);
        const double d_dual = dual.dim() > 1 ? condition_d_point(dual_frames, 0, 1, targets).effective : 0.0;

        const ComplexMatrix U = propagator(base, T, default_grid_size(base, T)).values.back();
        const ComplexMatrix Ubar = propagator(dual, T, N).values.back();

        records[t] = json{
            {"T", T},
            {"N", N},
            {"base_infidelity", b.infidelity},
            {"base_fidelity", 1.0 - b.infidelity},
            {"dual_infidelity", u.infidelity},
            {"dual_fidelity", 1.0 - u.infidelity},
            {"d_base", d_base},
            {"d_dual", d_dual},
            {"dual_propagator_defect", frobenius_norm(Ubar - adjoint(U))},
        };
    });

    RunResult out;
    std::vector<double> T(sc.T_grid.begin(), sc.T_grid.end());
    out.series.push_back(make_series("base_infidelity", T, column(records, "base_infidelity")));
    out.outcomes["base_adiabatic"] = to_string(out.series.back().verdict);
    out.series.push_back(make_series("dual_infidelity", T, column(records, "dual_infidelity")));
    out.outcomes["dual_adiabatic"] = to_string(out.series.back().verdict);
    out.series.push_back(make_series("condition_d_base", T, column(records, "d_base")));
    out.outcomes["d_base"] = to_string(out.series.back().verdict);
    out.series.push_back(make_series("condition_d_dual", T, column(records, "d_dual")));
    out.outcomes["d_dual"] = to_string(out.series.back().verdict);
    const auto defects = column(records, "dual_propagator_defect");
    out.outcomes["dual_propagator"] =
        *std::max_element(defects.begin(), defects.end()) <= kDualPropagatorTolerance ? "pass" : "fail";
    out.body["base"] = base.name();
    out.body["dual"] = dual.name();
    out.body["level"] = level;
    out.body["records"] = records;
    return out;
}

// ---------------------------------------------------------------- rl_lab

RunResult run_rl_lab(const Scenario& sc, unsigned /*jobs*/) {
    const double M = sc.bound_M;
    const auto linear = [](double T, double s) { return std::polar(1.0, T * s); };
    const auto fresnel = [](double T, double s) { return std::polar(1.0, T * s * s); };
    const auto one = [](double) { return Complex(1.0); };
    const auto ident = [](double s) { return Complex(s); };

    RunResult out;
    const RiemannLebesgueReport lin = riemann_lebesgue_check(linear, M, one, sc.T_grid);
    const RiemannLebesgueReport lin_s = riemann_lebesgue_check(linear, M, ident, sc.T_grid);
    const RiemannLebesgueReport fre = riemann_lebesgue_check(fresnel, M, one, sc.T_grid, 2.0);

    json records = json::array();
    double closed_form_error = 0.0;
    for (std::size_t t = 0; t < sc.T_grid.size(); ++t) {
        const double T = sc.T_grid[t];
        const double exact = std::abs(std::polar(1.0, T) - 1.0) / T;
        const double err = std::abs(lin.integral.values[t] - exact);
        closed_form_error = std::max(closed_form_error, err);
        records.push_back({{"T", T},
                           {"rl_linear", lin.integral.values[t]},
                           {"rl_linear_closed_form", exact},
                           {"rl_linear_s", lin_s.integral.values[t]},
                           {"rl_fresnel", fre.integral.values[t]},
                           {"primitive_sup", lin.primitive_sup.values[t]}});
    }

    auto add = [&](ConvergenceSeries s, const std::string& label) {
        s.label = label;
        out.outcomes[label] = to_string(s.verdict);
        out.series.push_back(std::move(s));
    };
    add(lin.integral, "rl_linear");
    add(lin_s.integral, "rl_linear_s");
    add(fre.integral, "rl_fresnel");
    ConvergenceSeries prim = lin.primitive_sup;
    prim.label = "rl_primitive_sup";
    out.series.push_back(std::move(prim));

    const UniformFamilyReport uni = uniform_family_check([](double T, double s) { return Complex(s + 1.0 / T); }, ident,
                                                         linear, M, sc.T_grid);
    out.outcomes["uniform_family"] = uni.bound_holds && uni.shared_verdict ? "pass" : "fail";
    out.series.push_back(uni.sup_difference);

    const StepChainReport chain = step_chain([](double s) { return s; }, 1.0, M, sc.epsilon);
    out.outcomes["step_chain"] = chain.holds ? "pass" : "fail";

    out.body["records"] = records;
    out.body["closed_form_error"] = closed_form_error;
    out.body["uniform_family"] = {{"bound_holds", uni.bound_holds},
                           {"shared_verdict", uni.shared_verdict},
                           {"integral_T_verdict", to_string(uni.integral_T.verdict)},
                           {"integral_limit_verdict", to_string(uni.integral_limit.verdict)}};
    out.body["step_chain"] = {{"epsilon", chain.epsilon},
                            {"bound", chain.bound},
                            {"pieces", chain.pieces},
                            {"l1_error", chain.l1_error},
                            {"approximation_term", chain.approximation_term},
                            {"level_sum", chain.level_sum},
                            {"predicted_T", chain.predicted_T},
                            {"step_integral", chain.step_integral},
                            {"integral", chain.integral},
                            {"holds", chain.holds}};
    return out;
}

// ---------------------------------------------------------------- formalism_gap

RunResult run_formalism_gap(const Scenario& sc, unsigned jobs) {
    const HamiltonianFamily family = family_of(sc);
    const AuditOptions options = options_of(sc, jobs);
    const FormalismGapReport gap = formalism_gap(family, sc.T_grid, options);
    const FrameTrajectory first = frame_trajectory(family, sc.T_grid.front(), audit_grid(family, sc.T_grid.front(), options));
    bool any_nonzero = false;
    for (const auto& c : check_condition_c(first)) any_nonzero = any_nonzero || !c.identically_zero;

    RunResult out;
    json records = json::array();
    for (std::size_t t = 0; t < gap.w_convergence.T_values.size(); ++t) {
        records.push_back({{"T", gap.w_convergence.T_values[t]},
                           {"w_distance", gap.w_convergence.values[t]},
                           {"dW_magnitude", gap.dW_magnitude.values[t]}});
    }
    out.series.push_back(gap.w_convergence);
    out.series.push_back(gap.dW_magnitude);
    out.outcomes["w_convergence"] = to_string(gap.w_convergence.verdict);
    out.outcomes["dW_magnitude"] = to_string(gap.dW_magnitude.verdict);
    out.body["preconditions"] = any_nonzero ? "nonzero_coupling" : "zero_coupling";
    out.body["reference"] = std::isfinite(gap.T_reference) ? "T=max" : "T=inf";
    out.body["records"] = records;
    return out;
}

RunResult run_pipeline(const Scenario& sc, unsigned jobs) {
    switch (sc.pipeline) {
        case Pipeline::Evolve: return run_evolve(sc, jobs);
        case Pipeline::Berry: return run_berry(sc, jobs);
        case Pipeline::Audit: return run_audit(sc, jobs);
        case Pipeline::Counterexample: return run_counterexample(sc, jobs);
        case Pipeline::RlLab: return run_rl_lab(sc, jobs);
        case Pipeline::FormalismGap: return run_formalism_gap(sc, jobs);
    }
    throw Error(ErrorKind::ConfigError, "unknown pipeline");
}

}  // namespace aqt::cli
