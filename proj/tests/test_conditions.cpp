#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aqt/conditions.hpp"
#include "aqt/errors.hpp"
#include "aqt/evolution.hpp"

using namespace aqt;

namespace {

// H(s, T) = sigma_z + (1/T) sigma_x
HamiltonianFamily perturbed_family() {
    return polynomial_family({pauli_z(), pauli_x()}, {{{1.0, 0, 0, 0, 0}}, {{1.0, 0, 1, 0, 0}}}, "perturbed");
}

std::vector<double> geometric(double first, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(first * std::ldexp(1.0, k));
    return out;
}

}  // namespace

TEST_CASE("series classification") {
    const auto T = geometric(8.0, 7);
    std::vector<double> inv, inv_sqrt, flat, slow;
    for (double t : T) {
        inv.push_back(3.0 / t);
        inv_sqrt.push_back(1.0 / std::sqrt(t));
        flat.push_back(0.7);
        slow.push_back(std::pow(t, -0.3));
    }
    const auto a = make_series("inv", T, inv);
    CHECK(a.slope == doctest::Approx(-1.0));
    CHECK(a.slope_stderr < 1e-12);
    CHECK(a.verdict == Verdict::Vanishes);
    CHECK(make_series("sqrt", T, inv_sqrt).verdict == Verdict::Vanishes);
    CHECK(make_series("flat", T, flat).verdict == Verdict::Persists);
    CHECK(make_series("slow", T, slow).verdict == Verdict::Inconclusive);

    const auto zero = make_series("zero", T, std::vector<double>(T.size(), 0.0));
    CHECK(zero.identically_zero);
    CHECK(zero.verdict == Verdict::Vanishes);

    // Steep but not shrinking by a factor 4 overall is not "vanishes".
    const auto shallow = make_series("short", {8.0, 9.0}, {1.0, 0.5});
    CHECK(shallow.slope < -0.5);
    CHECK(shallow.verdict == Verdict::Inconclusive);

    CHECK_THROWS_AS(make_series("bad", {8.0, 8.0}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(make_series("bad", {8.0, 16.0}, {1.0}), Error);

    const auto running = running_slopes(a);
    CHECK_FALSE(running[0].has_value());
    CHECK(*running[1] == doctest::Approx(-1.0));
    CHECK(default_T_grid() == geometric(8.0, 7));

    const Verdict mix[] = {Verdict::Vanishes, Verdict::Inconclusive};
    CHECK(combine(mix) == Verdict::Inconclusive);
}

TEST_CASE("condition (b)") {
    const auto T = default_T_grid();
    const auto lz = check_condition_b(landau_zener_family(1.0, 2.0), T);
    CHECK(lz.series.identically_zero);
    CHECK(lz.series.verdict == Verdict::Vanishes);
    CHECK(std::isinf(lz.T_reference));

    // First-order perturbation theory: the eigenvectors of sigma_z + eps sigma_x
    // tilt by eps/2, so the sup distance is 1/(2T) + O(T^-3).
    const auto pert = check_condition_b(perturbed_family(), T);
    CHECK(pert.series.slope == doctest::Approx(-1.0).epsilon(0.02));
    CHECK(pert.series.verdict == Verdict::Vanishes);
    for (std::size_t i = 0; i < T.size(); ++i) CHECK(pert.state.values[i] == doctest::Approx(0.5 / T[i]).epsilon(1e-2));

    const auto dual = check_condition_b(dual_family(landau_zener_family(1.0, 2.0)), std::vector<double>{8.0, 16.0, 32.0, 64.0, 128.0});
    CHECK(dual.T_reference == 128.0);
    CHECK(dual.series.T_values.size() == 4);
    CHECK(dual.series.verdict == Verdict::Persists);
}

TEST_CASE("condition (c)") {
    const auto c0 = check_condition_c(frame_trajectory(constant_family(pauli_z()), 4.0, 256));
    REQUIRE(c0.size() == 1);
    CHECK(c0[0].identically_zero);

    const auto diag = polynomial_family({ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}, ComplexMatrix{{0.0, 0.0}, {0.0, 1.0}}},
                                        {{{1.0, 1, 0, 0, 0}}, {{3.0, 0, 0, 0, 0}}});
    CHECK(check_condition_c(frame_trajectory(diag, 4.0, 256))[0].identically_zero);

    // v Delta / (Delta^2 + v^2 (2s - 1)^2) peaks at s = 1/2 with value v / Delta = 2.
    const auto lz = check_condition_c(frame_trajectory(landau_zener_family(1.0, 2.0), 4.0, 1024));
    CHECK(lz[0].max_coupling == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lz[0].s_at_max == 0.5);
    CHECK_FALSE(lz[0].identically_zero);

    const auto three = check_condition_c(frame_trajectory(constant_family(ComplexMatrix::diagonal(std::vector<double>{1, 2, 3})), 1.0, 64));
    CHECK(three.size() == 3);
}

TEST_CASE("condition (d) on Landau-Zener against the non-stationary bound") {
    const auto lz = landau_zener_family(1.0, 2.0);
    const auto T = default_T_grid();
    const auto r = check_condition_d(lz, T, 0, 1, default_s_targets());
    CHECK(r.series.slope == doctest::Approx(-1.0).epsilon(0.2));
    CHECK(r.series.verdict == Verdict::Vanishes);
    for (std::size_t i = 0; i < T.size(); ++i) {
        // Integration by parts with |phase'| >= 2 Delta: |int| <= 2 / (T * 2 Delta) + monotone term.
        CHECK(r.series.values[i] <= 2.0 / (T[i] * 2.0));
        CHECK(r.series.values[i] == doctest::Approx(r.bare.values[i]).epsilon(1e-9));
    }

    // Direct quadrature oracle at one T: Gauss-Legendre on the closed-form phase.
    const double t = 32.0;
    const auto theta = [](double s) {
        // int_0^s -2 sqrt(1 + 4 (2u - 1)^2) du with y = 2 (2u - 1)
        auto F = [](double y) { return 0.125 * (y * std::sqrt(1 + y * y) + std::asinh(y)); };
        return -2.0 * (F(2.0 * (2 * s - 1)) - F(-2.0));
    };
    double best = 0.0;
    for (double target : default_s_targets()) {
        Complex acc = 0.0;
        const int M = 20000;
        for (int m = 0; m < M; ++m) {
            const double a = target * m / M, b = target * (m + 1) / M;
            const double x[2] = {0.5 * (a + b) - 0.5 * (b - a) / std::sqrt(3.0), 0.5 * (a + b) + 0.5 * (b - a) / std::sqrt(3.0)};
            for (double xi : x) acc += 0.5 * (b - a) * std::polar(1.0, t * theta(xi));
        }
        best = std::max(best, std::abs(acc));
    }
    const auto one = check_condition_d(lz, std::vector<double>{t, 2 * t}, 0, 1, default_s_targets());
    CHECK(one.series.values[0] == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("condition (d) with stationary points decays like T^-1/2") {
    const auto r = check_condition_d([](double s, double) { return std::cos(2 * std::numbers::pi * s); }, default_T_grid(),
                                     default_s_targets());
    CHECK(r.slope == doctest::Approx(-0.5).epsilon(0.3));
    CHECK(std::abs(r.slope + 0.5) <= 0.15);
}

TEST_CASE("condition (d) persists on the dual family") {
    const auto dual = dual_family(landau_zener_family(1.0, 2.0));
    const auto r = check_condition_d(dual, std::vector<double>{8, 16, 32, 64, 128}, 0, 1, default_s_targets());
    CHECK(r.series.verdict == Verdict::Persists);
}

TEST_CASE("condition (d) rejects equal levels") {
    try {
        (void)check_condition_d(landau_zener_family(1.0, 2.0), default_T_grid(), 1, 1, default_s_targets());
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::PairEqual);
    }
}

TEST_CASE("kernel integrals") {
    const auto lz = landau_zener_family(1.0, 2.0);
    std::vector<double> T = default_T_grid(), off;
    std::vector<std::vector<Complex>> diag;
    for (double t : T) {
        const auto kernel = build_kernel(frame_trajectory(lz, t, 4096 * 4));
        off.push_back(offdiagonal_kernel_integral(kernel, default_s_targets()));
        diag.push_back(diagonal_kernel_integral(kernel));
    }
    CHECK(make_series("offdiagonal_kernel", T, off).verdict == Verdict::Vanishes);
    for (const auto& d : diag) CHECK(d == diag.front());
}

TEST_CASE("Riemann-Lebesgue checks") {
    const auto T = default_T_grid();
    const auto g = [](double t, double s) { return std::polar(1.0, t * s); };
    const auto r = riemann_lebesgue_check(g, 1.0, [](double) { return Complex(1.0); }, T);
    for (std::size_t i = 0; i < T.size(); ++i)
        CHECK(std::abs(r.integral.values[i] - std::abs(std::polar(1.0, T[i]) - 1.0) / T[i]) <= 1e-10);
    CHECK(r.primitive_sup.verdict == Verdict::Vanishes);
    CHECK(r.max_modulus == doctest::Approx(1.0));

    // int_0^1 s e^{iTs} ds = e^{iT}/(iT) + (e^{iT} - 1)/T^2
    const auto rs = riemann_lebesgue_check(g, 1.0, [](double s) { return Complex(s); }, T);
    for (std::size_t i = 0; i < T.size(); ++i) {
        const double t = T[i];
        const Complex exact = std::polar(1.0, t) / Complex(0.0, t) + (std::polar(1.0, t) - 1.0) / (t * t);
        CHECK(std::abs(rs.integral.values[i] - std::abs(exact)) <= 1e-10);
    }
    CHECK(rs.integral.slope == doctest::Approx(-1.0).epsilon(0.1));

    for (int degree = 0; degree <= 3; ++degree) {
        const auto p = riemann_lebesgue_check(g, 1.0, [&](double s) { return Complex(1.0 + std::pow(s, degree)); }, T);
        CHECK(p.integral.verdict == Verdict::Vanishes);
    }

    const auto fresnel = riemann_lebesgue_check([](double t, double s) { return std::polar(1.0, t * s * s); }, 1.0,
                                                [](double) { return Complex(1.0); }, T, 2.0);
    // Fresnel oracle: int_0^1 e^{iTs^2} -> (1/2) sqrt(pi/T) e^{i pi/4}.
    CHECK(fresnel.integral.slope == doctest::Approx(-0.5).epsilon(0.2));
    CHECK(std::abs(fresnel.integral.values.back() - 0.5 * std::sqrt(std::numbers::pi / 512.0)) <= 1.0 / 512.0);

    try {
        (void)riemann_lebesgue_check([](double, double) { return Complex(2.0); }, 1.0, [](double) { return Complex(1.0); }, T);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HypothesisAViolated);
    }
}

TEST_CASE("uniform family check") {
    const auto T = default_T_grid();
    const auto g = [](double t, double s) { return std::polar(1.0, t * s); };
    const auto f = [](double s) { return Complex(s); };
    const auto same = uniform_family_check([&](double, double s) { return f(s); }, f, g, 1.0, T);
    CHECK(same.sup_difference.identically_zero);
    CHECK(same.integral_T.values == same.integral_limit.values);

    const auto shifted = uniform_family_check([](double t, double s) { return Complex(s + 1.0 / t); }, f, g, 1.0, T);
    CHECK(shifted.bound_holds);
    CHECK(shifted.shared_verdict);
    for (std::size_t i = 0; i < T.size(); ++i) CHECK(shifted.sup_difference.values[i] == doctest::Approx(1.0 / T[i]));

    // Couplings of sigma_z + (1/T) sigma_x against the T = inf coupling.
    const auto fam = perturbed_family();
    const auto coupling = [&](double t, double s) {
        const auto frame = spectral_frame(fam, s, t);
        return coupling_matrix(frame, fam.derivative_in_s(s, t))(0, 1);
    };
    const auto limit = [&](double s) { return coupling(std::numeric_limits<double>::infinity(), s); };
    const auto r = uniform_family_check(coupling, limit, g, 1.0, T);
    CHECK(r.shared_verdict);
    CHECK(r.integral_T.verdict == Verdict::Vanishes);
}

TEST_CASE("step functions") {
    const auto c = step_approximate([](double) { return 2.5; }, 7);
    CHECK(c.l1_error == 0.0);
    CHECK(c.step(0.0) == 2.5);
    CHECK(c.step(1.0) == 2.5);

    for (std::size_t p : {1u, 4u, 51u}) {
        const auto a = step_approximate([](double s) { return s; }, p);
        CHECK(a.l1_error == doctest::Approx(1.0 / (4.0 * p)).epsilon(1e-12));
        CHECK(a.step.breakpoints.size() == p + 1);
        // Right-open pieces: a breakpoint belongs to the piece on its right.
        if (p > 1) CHECK(a.step(a.step.breakpoints[1]) == a.step.levels[1]);
    }
    CHECK_THROWS_AS(step_approximate([](double s) { return s; }, 0), Error);
}

TEST_CASE("step chain for f(s) = s") {
    const auto r = step_chain([](double s) { return s; }, 1.0, 1.0, 1e-2);
    CHECK(r.pieces == 51);
    CHECK(r.approximation_term < 0.5e-2);
    CHECK(r.level_sum == doctest::Approx(25.5));
    CHECK(r.predicted_T == doctest::Approx(10200.0));
    CHECK(r.step_integral <= 0.5e-2);
    CHECK(r.integral < 1e-2);
    CHECK(r.holds);
}

TEST_CASE("formalism gap") {
    const auto T = default_T_grid();
    const auto lz = formalism_gap(landau_zener_family(1.0, 2.0), T);
    CHECK(lz.w_convergence.verdict == Verdict::Vanishes);
    CHECK(lz.dW_magnitude.verdict == Verdict::Persists);

    const auto zero = formalism_gap(polynomial_family({pauli_z()}, {{{1.0, 0, 0, 0, 0}, {1.0, 1, 0, 0, 0}}}), T);
    CHECK(zero.w_convergence.verdict == Verdict::Vanishes);
    CHECK(zero.dW_magnitude.verdict == Verdict::Vanishes);

    const auto dual = formalism_gap(dual_family(landau_zener_family(1.0, 2.0)), std::vector<double>{8, 16, 32, 64, 128});
    CHECK(dual.w_convergence.verdict != Verdict::Vanishes);
}

TEST_CASE("Berry phase series is stable over T") {
    const auto r = berry_phase_series(rotating_cone_family(1.0, std::numbers::pi / 3), 1, std::vector<double>{8.0, 32.0, 128.0});
    CHECK(r.deviation.verdict == Verdict::Vanishes);
    CHECK(r.reference_phase == doctest::Approx(-std::numbers::pi / 2).epsilon(1e-3));
}

TEST_CASE("verdicts are stable under grid doubling") {
    const auto lz = landau_zener_family(1.0, 2.0);
    const auto T = default_T_grid();
    const auto coarse = check_condition_d(lz, T, 0, 1, default_s_targets());
    AuditOptions fine;
    fine.grid_floor = 2 * default_grid_size(lz, T.back());
    const auto dense = check_condition_d(lz, T, 0, 1, default_s_targets(), fine);
    CHECK(coarse.series.verdict == dense.series.verdict);
}

TEST_CASE("parallel audits reproduce the sequential result") {
    const auto lz = landau_zener_family(1.0, 2.0);
    AuditOptions seq, par;
    par.jobs = 4;
    const auto a = check_condition_d(lz, default_T_grid(), 0, 1, default_s_targets(), seq);
    const auto b = check_condition_d(lz, default_T_grid(), 0, 1, default_s_targets(), par);
    CHECK(a.series.values == b.series.values);
}
