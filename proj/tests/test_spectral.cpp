#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aqt/adiabatic.hpp"
#include "aqt/errors.hpp"
#include "aqt/spectral.hpp"
#include "support.hpp"

using namespace aqt;
using aqt::test::naive_distance;

namespace {

Complex braket(const ComplexVector& a, const ComplexVector& b) {
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

}  // namespace

TEST_CASE("constant family: frames identical, coupling exactly zero") {
    const auto fam = constant_family(pauli_z());
    const auto traj = frame_trajectory(fam, 10.0, 64);
    for (const auto& f : traj.frames) {
        CHECK(f.energies == traj.frames.front().energies);
        CHECK(f.states == traj.frames.front().states);
    }
    for (std::size_t i = 0; i <= traj.N; i += 7) CHECK(max_abs(coupling_matrix(traj, i)) == 0.0);
}

TEST_CASE("frame invariants: residual, orthonormality, positive overlaps") {
    const auto fam = rotating_cone_family(2.0, 1.1);
    const auto traj = frame_trajectory(fam, 4.0, 256);
    for (std::size_t i = 0; i <= traj.N; ++i) {
        const auto& f = traj.frames[i];
        const auto H = fam.evaluate(f.s, 4.0);
        for (std::size_t n = 0; n < 2; ++n) {
            CHECK(norm(H * f.states[n] - Complex(f.energies[n]) * f.states[n]) <= 1e-11 * frobenius_norm(H));
            CHECK(std::abs(braket(f.states[n], f.states[n]) - 1.0) <= 1e-11);
            if (i > 0) CHECK(braket(traj.frames[i - 1].states[n], f.states[n]).real() > 0.0);
        }
        CHECK(std::abs(braket(f.states[0], f.states[1])) <= 1e-11);
    }
}

TEST_CASE("Landau-Zener minimum gap is 2 Delta at s = 1/2") {
    const auto fam = landau_zener_family(1.0, 2.0);
    const auto traj = frame_trajectory(fam, 1.0, 256);
    double best = 1e9, where = -1.0;
    for (const auto& f : traj.frames) {
        const double oracle = 2.0 * std::sqrt(1.0 + 4.0 * (2 * f.s - 1) * (2 * f.s - 1));
        CHECK(std::abs(f.gap_min - oracle) < 1e-12);
        if (f.gap_min < best) best = f.gap_min, where = f.s;
    }
    CHECK(best == doctest::Approx(2.0));
    CHECK(where == 0.5);
}

TEST_CASE("Landau-Zener energies are symmetric about s = 1/2") {
    const auto traj = frame_trajectory(landau_zener_family(1.0, 2.0), 1.0, 512);
    for (std::size_t i = 0; i <= 512; ++i) {
        for (std::size_t n = 0; n < 2; ++n)
            CHECK(std::abs(traj.frames[i].energies[n] - traj.frames[512 - i].energies[n]) < 1e-13);
    }
}

TEST_CASE("Landau-Zener coupling at the symmetry point") {
    // H(1/2) = sigma_x, dH/ds = 2 v sigma_z = 4 sigma_z, <-|sigma_z|+> = 1 in the
    // sigma_x eigenbasis, E_+ - E_- = 2, so |M_01| = 4 / 2 = 2.
    const auto fam = landau_zener_family(1.0, 2.0);
    const auto frame = spectral_frame(fam, 0.5, 1.0);
    const auto M = coupling_matrix(frame, fam.derivative_in_s(0.5, 1.0));
    CHECK(std::abs(std::abs(M(0, 1)) - 2.0) < 1e-13);
    CHECK(std::abs(M(0, 1) + std::conj(M(1, 0))) < 1e-13);

    // Finite-difference oracle on the eigenvectors themselves.
    const double h = 1e-5;
    const auto lo = spectral_frame(fam, 0.5 - h, 1.0, &frame);
    const auto hi = spectral_frame(fam, 0.5 + h, 1.0, &frame);
    const ComplexVector dk = Complex(1.0 / (2 * h)) * (hi.states[1] - lo.states[1]);
    CHECK(std::abs(braket(frame.states[0], dk) - M(0, 1)) < 1e-6);
}

TEST_CASE("coupling: anti-Hermitian, gap formula against finite differences, gauge invariant modulus") {
    const auto fam = rotating_cone_family(1.0, 0.9);
    const std::size_t N = 512;
    const auto traj = frame_trajectory(fam, 3.0, N);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
    for (std::size_t i = 0; i <= N; i += 16) {
        const auto M = coupling_matrix(traj, i);
        CHECK(naive_distance(M, -adjoint(M)) <= 1e-9);

        const double s = traj.s(i), h = 1.0 / (4.0 * N);
        if (i > 0 && i < N) {
            const auto& f = traj.frames[i];
            const auto a = spectral_frame(fam, s - h, 3.0, &f);
            const auto b = spectral_frame(fam, s + h, 3.0, &f);
            const ComplexVector d1 = Complex(1.0 / (2 * h)) * (b.states[1] - a.states[1]);
            CHECK(std::abs(braket(f.states[0], d1) - M(0, 1)) <= 1e-5);
        }

        SpectralFrame twisted = traj.frames[i];
        for (auto& v : twisted.states) v *= std::polar(1.0, u(rng));
        const auto Mt = coupling_matrix(twisted, traj.dH[i]);
        CHECK(std::abs(std::abs(Mt(0, 1)) - std::abs(M(0, 1))) <= 1e-12);
    }
}

TEST_CASE("doubling N leaves shared frames unchanged") {
    const auto fam = landau_zener_family(1.0, 2.0);
    const auto a = frame_trajectory(fam, 5.0, 256);
    const auto b = frame_trajectory(fam, 5.0, 512);
    for (std::size_t i = 0; i <= 256; ++i) {
        for (std::size_t n = 0; n < 2; ++n) CHECK(norm(a.frames[i].states[n] - b.frames[2 * i].states[n]) <= 1e-10);
    }
}

TEST_CASE("rotating cone: the loop closes only up to the holonomy") {
    const double theta = std::numbers::pi / 2;
    const auto traj = frame_trajectory(rotating_cone_family(1.0, theta), 1.0, 1024);
    const Complex closing = braket(traj.frames.front().states[0], traj.frames.back().states[0]);
    CHECK(std::abs(std::abs(closing) - 1.0) < 1e-10);
    // Independent oracle: the solid-angle phase pi (1 - cos theta) = pi.
    CHECK(std::abs(closing - Complex(1.0)) > 1.0);
    const std::vector<ComplexVector> loop{traj.frames[0].states[0], traj.frames[256].states[0],
                                          traj.frames[512].states[0], traj.frames[768].states[0]};
    CHECK(std::isfinite(discrete_holonomy(loop)));
}

TEST_CASE("degenerate spectra are reported with their location") {
    const auto fam = polynomial_family({pauli_z()}, {{{1.0, 0, 0, 0, 0}, {-2.0, 1, 0, 0, 0}}});
    try {
        (void)frame_trajectory(fam, 3.0, 64);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateSpectrum);
        REQUIRE(e.s().has_value());
        CHECK(*e.s() == doctest::Approx(0.5));
        CHECK(*e.T() == 3.0);
    }
    try {
        (void)frame_trajectory(landau_zener_family(1.0, 2.0), 3.0, 32);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParameter);
    }
}
