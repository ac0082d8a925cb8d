#include "aqt/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "aqt/adiabatic.hpp"
#include "aqt/errors.hpp"
#include "aqt/parallel.hpp"
#include "aqt/quadrature.hpp"

namespace aqt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogFloor = 1e-15;

std::size_t round_up(std::size_t n, std::size_t multiple) { return (n + multiple - 1) / multiple * multiple; }

std::size_t nearest_node(double s, std::size_t N) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::InvalidParameter, "target s outside [0, 1]");
    return static_cast<std::size_t>(std::llround(s * static_cast<double>(N)));
}

double sampled_max_modulus(const std::function<Complex(double)>& f, std::size_t samples) {
    double m = 0.0;
    for (std::size_t i = 0; i <= samples; ++i) {
        m = std::max(m, std::abs(f(static_cast<double>(i) / static_cast<double>(samples))));
    }
    return m;
}

std::size_t oscillatory_panels(double T, double rate) {
    return std::max<std::size_t>(256, static_cast<std::size_t>(std::ceil(4.0 * rate * T)));
}

}  // namespace

const char* to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::Vanishes: return "vanishes";
        case Verdict::Persists: return "persists";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

SlopeFit fit_log_log(std::span<const double> T_values, std::span<const double> values) {
    if (T_values.size() != values.size()) throw Error(ErrorKind::InvalidParameter, "series sizes differ");
    const std::size_t n = values.size();
    SlopeFit fit;
    if (n < 2) return fit;
    double mx = 0.0, my = 0.0;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(T_values[i]);
        y[i] = std::log(std::max(values[i], kLogFloor));
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    if (n > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - my - fit.slope * (x[i] - mx);
            ssr += r * r;
        }
        fit.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

ConvergenceSeries make_series(std::string label, std::vector<double> T_values, std::vector<double> values) {
    if (T_values.size() != values.size()) throw Error(ErrorKind::InvalidParameter, "series sizes differ");
    for (std::size_t i = 0; i < T_values.size(); ++i) {
        if (!(T_values[i] > 0.0) || (i > 0 && !(T_values[i] > T_values[i - 1])))
            throw Error(ErrorKind::InvalidParameter, "T values must be positive and strictly increasing");
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw Error(ErrorKind::InvalidParameter, "series values must be finite and non-negative");
    }
    ConvergenceSeries out;
    out.label = std::move(label);
    out.T_values = std::move(T_values);
    out.values = std::move(values);
    if (out.values.empty()) return out;

    out.identically_zero =
        std::all_of(out.values.begin(), out.values.end(), [](double v) { return v <= kZeroFloor; });
    if (out.identically_zero) {
        out.verdict = Verdict::Vanishes;
        return out;
    }
    if (out.values.size() < 2) return out;
    const SlopeFit fit = fit_log_log(out.T_values, out.values);
    out.slope = fit.slope;
    out.slope_stderr = fit.stderr_;
    if (fit.slope <= -0.5 && out.values.back() < out.values.front() / 4.0) {
        out.verdict = Verdict::Vanishes;
    } else if (fit.slope >= -0.1) {
        out.verdict = Verdict::Persists;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

std::vector<std::optional<double>> running_slopes(const ConvergenceSeries& series) {
    std::vector<std::optional<double>> out(series.values.size());
    for (std::size_t k = 1; k < series.values.size(); ++k) {
        out[k] = fit_log_log(std::span(series.T_values).first(k + 1), std::span(series.values).first(k + 1)).slope;
    }
    return out;
}

std::vector<double> default_T_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 6; ++k) grid.push_back(8.0 * std::ldexp(1.0, k));
    return grid;
}

Verdict combine(std::span<const Verdict> verdicts) {
    Verdict out = Verdict::Vanishes;
    for (Verdict v : verdicts) {
        if (v == Verdict::Persists) return Verdict::Persists;
        if (v == Verdict::Inconclusive) out = Verdict::Inconclusive;
    }
    return out;
}

std::size_t audit_grid(const HamiltonianFamily& family, double T, const AuditOptions& options) {
    return default_grid_size(family, T, options.grid_floor);
}

ReferencePlan plan_reference(const HamiltonianFamily& family, std::span<const double> T_grid,
                             const AuditOptions& options, bool keep_largest) {
    if (T_grid.empty()) throw Error(ErrorKind::InvalidParameter, "empty T grid");
    ReferencePlan plan;
    plan.T_reference = kInf;
    if (family.limit_available()) {
        plan.T_values.assign(T_grid.begin(), T_grid.end());
        for (double T : plan.T_values) plan.N.push_back(audit_grid(family, T, options));
        return plan;
    }
    plan.T_reference = *std::max_element(T_grid.begin(), T_grid.end());
    plan.N_reference = audit_grid(family, plan.T_reference, options);
    for (double T : T_grid) {
        if (T == plan.T_reference && !keep_largest) continue;
        plan.T_values.push_back(T);
        plan.N.push_back(std::max(plan.N_reference, audit_grid(family, T, options)));
    }
    if (plan.T_values.empty()) throw Error(ErrorKind::InvalidParameter, "T grid needs a value below the reference");
    return plan;
}

// ---------------------------------------------------------------- condition (b)

FrameDistance frame_distance(const FrameTrajectory& frames, const FrameTrajectory& reference) {
    if (frames.N != reference.N || frames.dim() != reference.dim())
        throw Error(ErrorKind::GridMismatch, "frame trajectories live on different grids");
    FrameDistance out;
    for (std::size_t i = 0; i <= frames.N; ++i) {
        for (std::size_t n = 0; n < frames.dim(); ++n) {
            const ComplexVector& a = frames.frames[i].states[n];
            const ComplexVector& b = reference.frames[i].states[n];
            const Complex overlap = inner(b, a);
            const double m = std::abs(overlap);
            const Complex align = m > 0.0 ? std::conj(overlap) / m : Complex(1.0);
            out.state = std::max(out.state, norm(align * a - b));
            const ComplexVector da = state_derivative(frames, n, i);
            const ComplexVector db = state_derivative(reference, n, i);
            out.derivative = std::max(out.derivative, norm(align * da - db));
        }
    }
    return out;
}

ConditionBReport check_condition_b(const HamiltonianFamily& family, std::span<const double> T_grid,
                                   const AuditOptions& options) {
    const ReferencePlan plan = plan_reference(family, T_grid, options, false);
    std::vector<FrameDistance> distances(plan.T_values.size());
    parallel_for(plan.T_values.size(), options.jobs, [&](std::size_t t) {
        const FrameTrajectory frames = frame_trajectory(family, plan.T_values[t], plan.N[t]);
        const FrameTrajectory reference = frame_trajectory(family, plan.T_reference, plan.N[t]);
        distances[t] = frame_distance(frames, reference);
    });
    std::vector<double> state, derivative, combined;
    for (const auto& d : distances) {
        state.push_back(d.state);
        derivative.push_back(d.derivative);
        combined.push_back(std::max(d.state, d.derivative));
    }
    ConditionBReport out;
    out.T_reference = plan.T_reference;
    out.series = make_series("condition_b", plan.T_values, combined);
    out.state = make_series("condition_b_state", plan.T_values, state);
    out.derivative = make_series("condition_b_derivative", plan.T_values, derivative);
    return out;
}

// ---------------------------------------------------------------- condition (c)

std::vector<CouplingReport> check_condition_c(const FrameTrajectory& frames) {
    const std::size_t d = frames.dim();
    std::vector<CouplingReport> out;
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j + 1; k < d; ++k) out.push_back({j, k, 0.0, 0.0, false});
    }
    for (std::size_t i = 0; i <= frames.N; ++i) {
        const ComplexMatrix M = coupling_matrix(frames.frames[i], frames.dH[i]);
        for (auto& r : out) {
            const double m = std::max(std::abs(M(r.j, r.k)), std::abs(M(r.k, r.j)));
            if (m > r.max_coupling) {
                r.max_coupling = m;
                r.s_at_max = frames.s(i);
            }
        }
    }
    for (auto& r : out) r.identically_zero = r.max_coupling < 1e-10;
    return out;
}

// ---------------------------------------------------------------- condition (d)

std::vector<double> default_s_targets() { return {0.25, 0.5, 0.75, 1.0}; }

ConditionDPoint condition_d_point(const FrameTrajectory& frames, std::size_t j, std::size_t k,
                                  std::span<const double> s_targets) {
    if (j == k) throw Error(ErrorKind::PairEqual, "condition (d) needs two distinct levels");
    if (j >= frames.dim() || k >= frames.dim()) throw Error(ErrorKind::InvalidParameter, "level index exceeds the dimension");
    const std::size_t N = frames.N;

    std::vector<Complex> coupling(N + 1);
    double largest = 0.0;
    for (std::size_t i = 0; i <= N; ++i) {
        coupling[i] = coupling_matrix(frames.frames[i], frames.dH[i])(j, k);
        largest = std::max(largest, std::abs(coupling[i]));
    }
    // Unwrapped phase of the coupling; where it is negligible the last phase
    // is held.
    std::vector<double> coupling_phase(N + 1, 0.0);
    if (largest > 0.0) {
        const double threshold = 1e-12 * largest;
        double last = 0.0, acc = 0.0;
        bool started = false;
        for (std::size_t i = 0; i <= N; ++i) {
            if (std::abs(coupling[i]) > threshold) {
                const double a = std::arg(coupling[i]);
                acc = started ? acc + wrap_phase(a - last) : a;
                last = a;
                started = true;
            }
            coupling_phase[i] = acc;
        }
    }

    std::vector<Complex> effective(N + 1), bare(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        const double dynamical =
            std::isfinite(frames.T) ? frames.T * (frames.phase_integrals[i][j] - frames.phase_integrals[i][k]) : 0.0;
        bare[i] = std::polar(1.0, dynamical);
        effective[i] = std::polar(1.0, dynamical + coupling_phase[i]);
    }
    const auto Ie = cumulative_simpson(std::span<const Complex>(effective), frames.h());
    const auto Ib = cumulative_simpson(std::span<const Complex>(bare), frames.h());
    ConditionDPoint out;
    for (double s : s_targets) {
        const std::size_t i = nearest_node(s, N);
        out.effective = std::max(out.effective, std::abs(Ie[i]));
        out.bare = std::max(out.bare, std::abs(Ib[i]));
    }
    return out;
}

ConditionDReport check_condition_d(std::span<const FrameTrajectory> per_T, std::size_t j, std::size_t k,
                                   std::span<const double> s_targets) {
    if (j == k) throw Error(ErrorKind::PairEqual, "condition (d) needs two distinct levels");
    std::vector<double> T, eff, bare;
    for (const auto& frames : per_T) {
        const ConditionDPoint p = condition_d_point(frames, j, k, s_targets);
        T.push_back(frames.T);
        eff.push_back(p.effective);
        bare.push_back(p.bare);
    }
    const std::string tag = "condition_d_" + std::to_string(j) + "_" + std::to_string(k);
    return {j, k, make_series(tag, T, eff), make_series(tag + "_bare", T, bare)};
}

ConditionDReport check_condition_d(const HamiltonianFamily& family, std::span<const double> T_grid, std::size_t j,
                                   std::size_t k, std::span<const double> s_targets, const AuditOptions& options) {
    if (j == k) throw Error(ErrorKind::PairEqual, "condition (d) needs two distinct levels");
    std::vector<ConditionDPoint> points(T_grid.size());
    parallel_for(T_grid.size(), options.jobs, [&](std::size_t t) {
        const FrameTrajectory frames = frame_trajectory(family, T_grid[t], audit_grid(family, T_grid[t], options));
        points[t] = condition_d_point(frames, j, k, s_targets);
    });
    std::vector<double> T(T_grid.begin(), T_grid.end()), eff, bare;
    for (const auto& p : points) {
        eff.push_back(p.effective);
        bare.push_back(p.bare);
    }
    const std::string tag = "condition_d_" + std::to_string(j) + "_" + std::to_string(k);
    return {j, k, make_series(tag, T, eff), make_series(tag + "_bare", std::move(T), bare)};
}

ConvergenceSeries check_condition_d(const std::function<double(double s, double T)>& level_difference,
                                    std::span<const double> T_grid, std::span<const double> s_targets,
                                    std::size_t grid_floor) {
    std::vector<double> T(T_grid.begin(), T_grid.end()), values;
    for (double t : T) {
        double spread = 0.0;
        for (int i = 0; i <= 256; ++i) spread = std::max(spread, std::abs(level_difference(i / 256.0, t)));
        std::size_t N = std::max<std::size_t>(grid_floor, 2048);
        N = std::max(N, static_cast<std::size_t>(std::ceil(64.0 * t * spread)));
        N = round_up(N, 256);
        const double h = 1.0 / static_cast<double>(N);
        std::vector<double> gap(N + 1);
        for (std::size_t i = 0; i <= N; ++i) gap[i] = level_difference(static_cast<double>(i) * h, t);
        const auto theta = cumulative_simpson(std::span<const double>(gap), h);
        std::vector<Complex> phase(N + 1);
        for (std::size_t i = 0; i <= N; ++i) phase[i] = std::polar(1.0, t * theta[i]);
        const auto I = cumulative_simpson(std::span<const Complex>(phase), h);
        double v = 0.0;
        for (double s : s_targets) v = std::max(v, std::abs(I[nearest_node(s, N)]));
        values.push_back(v);
    }
    return make_series("condition_d_level_difference", std::move(T), std::move(values));
}

// ---------------------------------------------------------------- kernel integrals

double offdiagonal_kernel_integral(std::span<const KernelSample> kernel, std::span<const double> s_targets) {
    if (kernel.size() < 3) throw Error(ErrorKind::GridMismatch, "kernel needs at least three nodes");
    const std::size_t N = kernel.size() - 1;
    std::vector<ComplexMatrix> K2;
    K2.reserve(kernel.size());
    for (const auto& k : kernel) K2.push_back(k.K2);
    const auto I = cumulative_simpson(std::span<const ComplexMatrix>(K2), 1.0 / static_cast<double>(N));
    double out = 0.0;
    for (double s : s_targets) out = std::max(out, frobenius_norm(I[nearest_node(s, N)]));
    return out;
}

std::vector<Complex> diagonal_kernel_integral(std::span<const KernelSample> kernel) {
    if (kernel.size() < 3) throw Error(ErrorKind::GridMismatch, "kernel needs at least three nodes");
    const std::size_t N = kernel.size() - 1;
    const std::size_t d = kernel.front().K1.dim();
    std::vector<Complex> out(d);
    std::vector<Complex> diag(N + 1);
    for (std::size_t n = 0; n < d; ++n) {
        for (std::size_t i = 0; i <= N; ++i) diag[i] = kernel[i].K1(n, n);
        out[n] = cumulative_simpson(std::span<const Complex>(diag), 1.0 / static_cast<double>(N)).back();
    }
    return out;
}

// ---------------------------------------------------------------- Riemann-Lebesgue

RiemannLebesgueReport riemann_lebesgue_check(const OscillatoryFamily& g, double bound, const ScalarFunction& f,
                                             std::span<const double> T_grid, double rate) {
    if (!(bound > 0.0) || !(rate > 0.0)) throw Error(ErrorKind::InvalidParameter, "bound and rate must be positive");
    RiemannLebesgueReport out;
    std::vector<double> T(T_grid.begin(), T_grid.end()), primitive, integral;
    for (double t : T) {
        const std::size_t panels = oscillatory_panels(t, rate);
        const auto gT = [&](double s) { return g(t, s); };
        const double m = sampled_max_modulus(gT, 8 * panels);
        out.max_modulus = std::max(out.max_modulus, m);
        if (m > bound * (1.0 + 1e-12))
            throw Error(ErrorKind::HypothesisAViolated, "|g_T| exceeds the declared bound", 0.0, t);
        const auto F = gauss_legendre_cumulative(gT, panels);
        double sup = 0.0;
        for (const Complex& v : F) sup = std::max(sup, std::abs(v));
        primitive.push_back(sup);
        integral.push_back(std::abs(gauss_legendre([&](double s) { return g(t, s) * f(s); }, 0.0, 1.0, panels)));
    }
    out.primitive_sup = make_series("rl_primitive_sup", T, std::move(primitive));
    out.integral = make_series("rl_integral", std::move(T), std::move(integral));
    return out;
}

UniformFamilyReport uniform_family_check(const OscillatoryFamily& f_T, const ScalarFunction& f,
                                         const OscillatoryFamily& g, double bound, std::span<const double> T_grid,
                                         double rate) {
    if (!(bound > 0.0) || !(rate > 0.0)) throw Error(ErrorKind::InvalidParameter, "bound and rate must be positive");
    UniformFamilyReport out;
    std::vector<double> T(T_grid.begin(), T_grid.end()), diff, iT, iL;
    for (double t : T) {
        const std::size_t panels = oscillatory_panels(t, rate);
        if (sampled_max_modulus([&](double s) { return g(t, s); }, 8 * panels) > bound * (1.0 + 1e-12))
            throw Error(ErrorKind::HypothesisAViolated, "|g_T| exceeds the declared bound", 0.0, t);
        const double sup = sampled_max_modulus([&](double s) { return f_T(t, s) - f(s); }, 8 * panels);
        const Complex a = gauss_legendre([&](double s) { return g(t, s) * f_T(t, s); }, 0.0, 1.0, panels);
        const Complex b = gauss_legendre([&](double s) { return g(t, s) * f(s); }, 0.0, 1.0, panels);
        if (std::abs(a - b) > bound * sup * (1.0 + 1e-9) + 1e-14) out.bound_holds = false;
        diff.push_back(sup);
        iT.push_back(std::abs(a));
        iL.push_back(std::abs(b));
    }
    out.sup_difference = make_series("uniform_sup_difference", T, std::move(diff));
    out.integral_T = make_series("uniform_integral_T", T, std::move(iT));
    out.integral_limit = make_series("uniform_integral_limit", std::move(T), std::move(iL));
    out.shared_verdict = out.integral_T.verdict == out.integral_limit.verdict;
    return out;
}

// ---------------------------------------------------------------- step functions

double StepFunction::operator()(double x) const {
    if (levels.empty()) return 0.0;
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    std::size_t piece = it == breakpoints.begin() ? 0 : static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    return levels[std::min(piece, levels.size() - 1)];
}

StepApproximation step_approximate(const std::function<double(double)>& f, std::size_t pieces) {
    if (pieces == 0) throw Error(ErrorKind::InvalidParameter, "step approximation needs at least one piece");
    StepApproximation out;
    const double w = 1.0 / static_cast<double>(pieces);
    for (std::size_t i = 0; i <= pieces; ++i) out.step.breakpoints.push_back(static_cast<double>(i) * w);
    out.step.breakpoints.back() = 1.0;
    for (std::size_t i = 0; i < pieces; ++i) {
        const double a = out.step.breakpoints[i], b = out.step.breakpoints[i + 1];
        const double y = f(0.5 * (a + b));
        out.step.levels.push_back(y);
        const auto err = [&](double x) { return Complex(std::abs(f(x) - y)); };
        const double mid = 0.5 * (a + b);
        out.l1_error += gauss_legendre(err, a, mid, 4).real() + gauss_legendre(err, mid, b, 4).real();
    }
    return out;
}

StepChainReport step_chain(const std::function<double(double)>& f, double lipschitz, double bound,
                                   double epsilon) {
    if (!(epsilon > 0.0) || !(lipschitz > 0.0)) throw Error(ErrorKind::InvalidParameter, "epsilon and L must be positive");
    if (!(bound >= 1.0)) throw Error(ErrorKind::HypothesisAViolated, "|exp(iTs)| = 1 exceeds the declared bound");
    StepChainReport out;
    out.epsilon = epsilon;
    out.bound = bound;
    out.pieces = static_cast<std::size_t>(std::floor(bound * lipschitz / (2.0 * epsilon))) + 1;
    const StepApproximation approx = step_approximate(f, out.pieces);
    out.l1_error = approx.l1_error;
    out.approximation_term = bound * approx.l1_error;
    for (double y : approx.step.levels) out.level_sum += std::abs(y);
    out.predicted_T = 4.0 * out.level_sum / epsilon;

    const double T = out.predicted_T;
    Complex step_int = 0.0;
    if (T > 0.0) {
        for (std::size_t i = 0; i < out.pieces; ++i) {
            const double a = approx.step.breakpoints[i], b = approx.step.breakpoints[i + 1];
            step_int += approx.step.levels[i] * (std::polar(1.0, T * b) - std::polar(1.0, T * a)) / Complex(0.0, T);
        }
    }
    out.step_integral = std::abs(step_int);
    out.integral = std::abs(gauss_legendre([&](double s) { return f(s) * std::polar(1.0, T * s); }, 0.0, 1.0,
                                           oscillatory_panels(T, 1.0)));
    out.holds = out.approximation_term < epsilon / 2.0 && out.step_integral <= epsilon / 2.0 && out.integral < epsilon;
    return out;
}

// ---------------------------------------------------------------- formalism gap

std::vector<ComplexMatrix> limit_propagator(const FrameTrajectory& reference) {
    const std::size_t N = reference.N;
    const std::size_t d = reference.dim();
    std::vector<std::vector<Complex>> diag(d, std::vector<Complex>(N + 1));
    for (std::size_t i = 0; i <= N; ++i) {
        const ComplexMatrix M = coupling_matrix(reference, i);
        for (std::size_t n = 0; n < d; ++n) diag[n][i] = M(n, n);
    }
    std::vector<std::vector<Complex>> integral(d);
    for (std::size_t n = 0; n < d; ++n) integral[n] = cumulative_simpson(std::span<const Complex>(diag[n]), reference.h());
    std::vector<ComplexMatrix> out;
    out.reserve(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        std::vector<Complex> entries(d);
        for (std::size_t n = 0; n < d; ++n) entries[n] = std::exp(-integral[n][i]);
        out.push_back(to_computational(reference, ComplexMatrix::diagonal(entries)));
    }
    return out;
}

FormalismGapPoint formalism_gap_point(const FrameTrajectory& frames, const FrameTrajectory& reference) {
    if (frames.N != reference.N || frames.dim() != reference.dim())
        throw Error(ErrorKind::GridMismatch, "frame trajectories live on different grids");
    const auto kernel = build_kernel(frames);
    const VolterraSolution sol = solve_volterra(kernel, frames.N);
    const auto limit = limit_propagator(reference);
    FormalismGapPoint out;
    for (std::size_t i = 0; i <= frames.N; ++i) {
        const ComplexMatrix W = to_computational(frames, sol.W.values[i]);
        out.w_distance = std::max(out.w_distance, frobenius_norm(W - limit[i]));
        out.dW_magnitude = std::max(out.dW_magnitude, frobenius_norm(kernel[i].K * sol.W.values[i]));
    }
    return out;
}

FormalismGapReport formalism_gap(const HamiltonianFamily& family, std::span<const double> T_grid,
                                 const AuditOptions& options) {
    const ReferencePlan plan = plan_reference(family, T_grid, options, true);
    std::vector<FormalismGapPoint> points(plan.T_values.size());
    parallel_for(plan.T_values.size(), options.jobs, [&](std::size_t t) {
        const FrameTrajectory frames = frame_trajectory(family, plan.T_values[t], plan.N[t]);
        const FrameTrajectory reference = frame_trajectory(family, plan.T_reference, plan.N[t]);
        points[t] = formalism_gap_point(frames, reference);
    });
    std::vector<double> w, dw;
    for (const auto& p : points) {
        w.push_back(p.w_distance);
        dw.push_back(p.dW_magnitude);
    }
    FormalismGapReport out;
    out.T_reference = plan.T_reference;
    out.w_convergence = make_series("w_convergence", plan.T_values, std::move(w));
    out.dW_magnitude = make_series("dW_magnitude", plan.T_values, std::move(dw));
    return out;
}

// ---------------------------------------------------------------- Berry phase limit

BerrySeriesReport berry_phase_series(const HamiltonianFamily& family, std::size_t level,
                                     std::span<const double> T_grid, const AuditOptions& options) {
    if (!family.closed_loop()) throw Error(ErrorKind::NotClosedLoop, "Berry phase requires a closed-loop family");
    if (T_grid.empty()) throw Error(ErrorKind::InvalidParameter, "empty T grid");
    std::vector<double> phases(T_grid.size());
    parallel_for(T_grid.size(), options.jobs, [&](std::size_t t) {
        phases[t] = berry_phase(frame_trajectory(family, T_grid[t], audit_grid(family, T_grid[t], options)), level)
                        .berry_phase;
    });
    BerrySeriesReport out;
    out.phases = phases;
    const double T_max = *std::max_element(T_grid.begin(), T_grid.end());
    std::vector<double> T, dev;
    if (family.limit_available()) {
        out.reference_phase =
            berry_phase(frame_trajectory(family, kInf, audit_grid(family, T_max, options)), level).berry_phase;
    } else {
        out.reference_phase = phases[static_cast<std::size_t>(
            std::max_element(T_grid.begin(), T_grid.end()) - T_grid.begin())];
    }
    for (std::size_t t = 0; t < T_grid.size(); ++t) {
        if (!family.limit_available() && T_grid[t] == T_max) continue;
        T.push_back(T_grid[t]);
        dev.push_back(std::abs(wrap_phase(phases[t] - out.reference_phase)));
    }
    out.deviation = make_series("berry_deviation", std::move(T), std::move(dev));
    return out;
}

}  // namespace aqt
