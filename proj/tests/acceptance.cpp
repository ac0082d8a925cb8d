// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aqt/adiabatic.hpp"
#include "aqt/conditions.hpp"
#include "aqt/errors.hpp"
#include "aqt/evolution.hpp"
#include "support.hpp"

using namespace aqt;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, name, false, std::string("threw: ") + e.what());
    }
}

double unitarity_error(const ComplexMatrix& w) {
    return test::naive_distance(test::naive_product(adjoint(w), w), ComplexMatrix::identity(w.dim()));
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto lz = landau_zener_family(1.0, 2.0);
    const std::vector<double> T{16, 32, 64, 128, 256};
    std::vector<double> values;
    for (double t : T) {
        const std::size_t N = default_grid_size(lz, t);
        const FrameTrajectory frames = frame_trajectory(lz, t, N);
        const StateTrajectory psi = integrate_schrodinger(lz, t, frames.frames.front().states[0], N);
        values.push_back(infidelity(psi.values.back(), adiabatic_state(frames, 0, N).state));
    }
    const auto series = make_series("infidelity", T, values);
    const double elapsed = seconds_since(t0);
    const bool pass = std::abs(series.slope + 1.0) <= 0.15 && values.back() < 5e-3 && elapsed < 60.0;
    report(1, "QAT convergence on Landau-Zener", pass,
           fmt("slope %.4f (want -1 +- 0.15), final infidelity %.3e (want < 5e-3), %.1f s (want < 60)", series.slope,
               values.back(), elapsed));
}

void criterion_2() {
    const auto lz = landau_zener_family(1.0, 2.0);
    double worst = 0.0;
    for (double t : {8.0, 32.0, 128.0}) {
        const std::size_t N = default_grid_size(lz, t);
        const auto kernel = build_kernel(frame_trajectory(lz, t, N));
        const ComplexMatrix volterra = solve_volterra(kernel, N).W.values.back();
        const ComplexMatrix ode = kernel_ode(kernel).values.back();
        worst = std::max(worst, frobenius_norm(volterra - ode));
    }
    report(2, "Volterra solution matches the kernel ODE", worst <= 1e-6,
           fmt("max ||W_volterra(1) - W_ode(1)||_F = %.3e over T in {8, 32, 128} (want <= 1e-6)", worst));
}

HamiltonianFamily random_custom_family(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t d = 2 + rng() % 2;
    std::vector<double> levels;
    for (std::size_t n = 0; n < d; ++n) levels.push_back(3.0 * static_cast<double>(n) + 0.5 * u(rng));
    std::vector<ComplexMatrix> basis{ComplexMatrix::diagonal(std::span<const double>(levels)),
                                     test::random_hermitian(d, rng, 0.5), test::random_hermitian(d, rng, 0.5)};
    std::vector<std::vector<CoefficientTerm>> coeffs{
        {{1.0, 0, 0, 0, 0}},
        {{u(rng), 1, 0, 0, 0}, {u(rng), 0, 0, 1, 0}},
        {{u(rng), 2, 0, 0, 0}, {u(rng), 0, 1, 0, 1}},
    };
    return polynomial_family(std::move(basis), std::move(coeffs), "random");
}

void criterion_3() {
    std::mt19937_64 rng(20260901);
    double split = 0.0, anti = 0.0, unitary = 0.0;
    for (int instance = 0; instance < 20; ++instance) {
        const auto fam = random_custom_family(rng);
        const double T = 4.0 + 4.0 * (instance % 4);
        const std::size_t N = default_grid_size(fam, T);
        const auto kernel = build_kernel(frame_trajectory(fam, T, N));
        for (const auto& k : kernel) {
            const double scale = std::max(1.0, frobenius_norm(k.K));
            split = std::max(split, frobenius_norm(k.K - k.K1 - k.K2) / scale);
            anti = std::max(anti, frobenius_norm(k.K + adjoint(k.K)));
        }
        for (const auto& w : solve_volterra(kernel, N).W.values) unitary = std::max(unitary, unitarity_error(w));
    }
    const bool pass = split <= 4 * std::numeric_limits<double>::epsilon() && anti <= 1e-9 && unitary <= 1e-6;
    report(3, "kernel algebra on 20 random custom families", pass,
           fmt("max relative ||K - K1 - K2|| = %.2e (want machine precision), max ||K + K^dag|| = %.2e (want <= 1e-9), "
               "max ||W^dag W - I|| = %.2e (want <= 1e-6)",
               split, anti, unitary));
}

void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto T = default_T_grid();
    const auto lz = check_condition_d(landau_zener_family(1.0, 2.0), T, 0, 1, default_s_targets());
    const auto stationary = check_condition_d(
        [](double s, double) { return std::cos(2.0 * std::numbers::pi * s); }, T, default_s_targets());
    const auto dual = check_condition_d(dual_family(landau_zener_family(1.0, 2.0)), T, 0, 1, default_s_targets());
    const double elapsed = seconds_since(t0);
    const bool pass = lz.series.verdict == Verdict::Vanishes && std::abs(lz.series.slope + 1.0) <= 0.2 &&
                      std::abs(stationary.slope + 0.5) <= 0.15 && dual.series.verdict == Verdict::Persists &&
                      elapsed < 120.0;
    report(4, "condition (d) classifier", pass,
           fmt("LZ %s slope %.3f (want vanishes, -1 +- 0.2); stationary slope %.3f (want -0.5 +- 0.15); dual %s "
               "(want persists); %.1f s (want < 120)",
               to_string(lz.series.verdict), lz.series.slope, stationary.slope, to_string(dual.series.verdict),
               elapsed));
}

double adiabatic_fidelity(const HamiltonianFamily& fam, double T, std::size_t N) {
    const FrameTrajectory frames = frame_trajectory(fam, T, N);
    const StateTrajectory psi = integrate_schrodinger(fam, T, frames.frames.front().states[0], N);
    return 1.0 - infidelity(psi.values.back(), adiabatic_state(frames, 0, N).state);
}

void criterion_5() {
    const double T = 256.0;
    const auto base = landau_zener_family(1.0, 2.0);
    const auto dual = dual_family(base);
    const std::size_t N = default_grid_size(base, T);
    const double base_fid = adiabatic_fidelity(base, T, N);
    const double dual_fid = adiabatic_fidelity(dual, T, N);
    const ComplexMatrix U = propagator(base, T, N).values.back();
    const ComplexMatrix Ubar = propagator(dual, T, N).values.back();
    const double defect = frobenius_norm(Ubar - adjoint(U));
    const bool pass = base_fid >= 0.99 && dual_fid <= 0.9 && defect <= 1e-5;
    report(5, "counterexample at T = 256", pass,
           fmt("base fidelity %.6f (want >= 0.99), dual fidelity %.6f (want <= 0.9), ||U_dual - U^dag||_F = %.2e "
               "(want <= 1e-5)",
               base_fid, dual_fid, defect));
}

void criterion_6() {
    double worst = 0.0, twist = 0.0;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    for (double theta : {std::numbers::pi / 6, std::numbers::pi / 3, std::numbers::pi / 2}) {
        const auto cone = rotating_cone_family(1.0, theta);
        const FrameTrajectory frames = frame_trajectory(cone, 1.0, 4096);
        const double expected = std::numbers::pi * (1.0 - std::cos(theta));
        for (std::size_t level = 0; level < 2; ++level) {
            const double gamma = berry_phase(frames, level).berry_phase;
            worst = std::max(worst, std::abs(std::abs(gamma) - expected));

            std::vector<ComplexVector> loop, twisted;
            for (std::size_t i = 0; i < frames.N; ++i) {
                loop.push_back(frames.frames[i].states[level]);
                twisted.push_back(std::polar(1.0, angle(rng)) * frames.frames[i].states[level]);
            }
            twist = std::max(twist, std::abs(wrap_phase(discrete_holonomy(loop) - discrete_holonomy(twisted))));
        }
    }
    report(6, "Berry phase on the rotating cone", worst <= 1e-3 && twist <= 1e-12,
           fmt("max ||gamma| - pi(1 - cos theta)| = %.2e (want <= 1e-3), gauge twist change %.2e (want <= 1e-12)", worst,
               twist));
}

void criterion_7() {
    const auto T = default_T_grid();
    const auto r = riemann_lebesgue_check([](double t, double s) { return std::polar(1.0, t * s); }, 1.0,
                                          [](double) { return Complex(1.0); }, T);
    double worst = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i)
        worst = std::max(worst, std::abs(r.integral.values[i] - std::abs(std::polar(1.0, T[i]) - 1.0) / T[i]));
    const auto chain = step_chain([](double s) { return s; }, 1.0, 1.0, 1e-2);
    const bool pass = worst <= 1e-10 && chain.holds && chain.integral < 1e-2;
    report(7, "Riemann-Lebesgue lab", pass,
           fmt("closed-form error %.2e (want <= 1e-10); chain p = %zu, T* = %.1f, |int f g_T*| = %.3e (want < 1e-2)",
               worst, chain.pieces, chain.predicted_T, chain.integral));
}

void criterion_8() {
    const auto T = default_T_grid();
    const auto lz = formalism_gap(landau_zener_family(1.0, 2.0), T);
    const auto zero = formalism_gap(polynomial_family({pauli_z()}, {{{1.0, 0, 0, 0, 0}, {1.0, 1, 0, 0, 0}}}, "zero_coupling"), T);
    const bool pass = lz.w_convergence.verdict == Verdict::Vanishes && lz.dW_magnitude.verdict == Verdict::Persists &&
                      zero.w_convergence.verdict == Verdict::Vanishes && zero.dW_magnitude.verdict == Verdict::Vanishes;
    report(8, "formalism gap", pass,
           fmt("LZ w %s / dW %s (want vanishes / persists); zero coupling w %s / dW %s (want vanishes / vanishes)",
               to_string(lz.w_convergence.verdict), to_string(lz.dW_magnitude.verdict),
               to_string(zero.w_convergence.verdict), to_string(zero.dW_magnitude.verdict)));
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void criterion_9() {
    const fs::path work = fs::temp_directory_path() / "aqt-acceptance-determinism";
    fs::remove_all(work);
    std::vector<fs::path> scenarios;
    for (const auto& entry : fs::directory_iterator(AQT_SCENARIO_DIR))
        if (entry.path().extension() == ".json") scenarios.push_back(entry.path());
    std::sort(scenarios.begin(), scenarios.end());
    std::vector<std::string> bad;
    for (const auto& sc : scenarios) {
        std::string first;
        for (int run = 0; run < 2; ++run) {
            const fs::path out = work / (sc.stem().string() + "-" + std::to_string(run));
            const std::string cmd = std::string(AQT_BINARY) + " run \"" + sc.string() + "\" -o \"" + out.string() +
                                    "\" > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            const std::string text = slurp(out / "report.json");
            if (status != 0 || text.empty()) {
                bad.push_back(sc.stem().string() + " (run failed)");
                break;
            }
            if (run == 0) first = text;
            else if (text != first) bad.push_back(sc.stem().string());
        }
    }
    fs::remove_all(work);
    std::string detail = fmt("%zu scenarios run twice", scenarios.size());
    for (const auto& b : bad) detail += ", differs: " + b;
    report(9, "determinism of report.json", bad.empty() && !scenarios.empty(), detail);
}

}  // namespace

int main() {
    guarded(1, "QAT convergence on Landau-Zener", criterion_1);
    guarded(2, "Volterra solution matches the kernel ODE", criterion_2);
    guarded(3, "kernel algebra on 20 random custom families", criterion_3);
    guarded(4, "condition (d) classifier", criterion_4);
    guarded(5, "counterexample at T = 256", criterion_5);
    guarded(6, "Berry phase on the rotating cone", criterion_6);
    guarded(7, "Riemann-Lebesgue lab", criterion_7);
    guarded(8, "formalism gap", criterion_8);
    guarded(9, "determinism of report.json", criterion_9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
