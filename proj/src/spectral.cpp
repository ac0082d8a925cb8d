#include "aqt/spectral.hpp"

#include <cmath>
#include <limits>

#include "aqt/errors.hpp"
#include "aqt/quadrature.hpp"

namespace aqt {

namespace {

void fix_initial_phase(ComplexVector& v) {
    double best = 0.0;
    for (std::size_t i = 0; i < v.dim(); ++i) best = std::max(best, std::abs(v[i]));
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if (std::abs(v[i]) >= best * (1.0 - 1e-12)) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            v[i] = std::abs(v[i]);
            return;
        }
    }
}

}  // namespace

SpectralFrame make_frame(const ComplexMatrix& hamiltonian, double s, double T, const SpectralFrame* prev) {
    EigenSystem eig;
    try {
        eig = hermitian_eig(hamiltonian);
    } catch (const Error& e) {
        throw e.located(s, T);
    }
    SpectralFrame frame{s, T, std::move(eig.values), std::move(eig.vectors),
                        std::numeric_limits<double>::infinity()};
    for (std::size_t n = 1; n < frame.energies.size(); ++n) {
        frame.gap_min = std::min(frame.gap_min, frame.energies[n] - frame.energies[n - 1]);
    }
    if (frame.gap_min < kGapTolerance) {
        throw Error(ErrorKind::DegenerateSpectrum,
                    "adjacent levels closer than " + std::to_string(kGapTolerance), s, T);
    }
    if (prev && prev->dim() != frame.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "previous frame has a different dimension", s, T);
    }
    for (std::size_t n = 0; n < frame.dim(); ++n) {
        ComplexVector& v = frame.states[n];
        if (!prev) {
            fix_initial_phase(v);
            continue;
        }
        const Complex overlap = inner(prev->states[n], v);
        if (std::abs(overlap) < 0.5) {
            throw Error(ErrorKind::GridMismatch,
                        "consecutive eigenvectors nearly orthogonal; the s-grid does not resolve the frame", s, T);
        }
        v *= std::conj(overlap) / std::abs(overlap);
    }
    return frame;
}

SpectralFrame spectral_frame(const HamiltonianFamily& family, double s, double T, const SpectralFrame* prev) {
    ComplexMatrix h;
    try {
        h = family.evaluate(s, T);
    } catch (const Error& e) {
        throw e.located(s, T);
    }
    return make_frame(h, s, T, prev);
}

FrameTrajectory frame_trajectory(const HamiltonianFamily& family, double T, std::size_t N) {
    if (N < 64) throw Error(ErrorKind::InvalidParameter, "frame trajectories need N >= 64");
    FrameTrajectory out;
    out.family_name = family.name();
    out.closed_loop = family.closed_loop();
    out.T = T;
    out.N = N;
    out.frames.reserve(N + 1);
    out.dH.reserve(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        const double s = out.s(i);
        out.frames.push_back(spectral_frame(family, s, T, i == 0 ? nullptr : &out.frames.back()));
        try {
            out.dH.push_back(family.derivative_in_s(s, T));
        } catch (const Error& e) {
            throw e.located(s, T);
        }
    }

    const std::size_t d = out.dim();
    out.phase_integrals.assign(N + 1, std::vector<double>(d, 0.0));
    std::vector<double> energy(N + 1);
    for (std::size_t n = 0; n < d; ++n) {
        for (std::size_t i = 0; i <= N; ++i) energy[i] = out.frames[i].energies[n];
        const std::vector<double> integral = cumulative_simpson(energy, out.h());
        for (std::size_t i = 0; i <= N; ++i) out.phase_integrals[i][n] = integral[i];
    }
    return out;
}

ComplexMatrix coupling_matrix(const SpectralFrame& frame, const ComplexMatrix& dH) {
    const std::size_t d = frame.dim();
    if (dH.dim() != d) throw Error(ErrorKind::DimensionMismatch, "dH does not match the frame dimension");
    ComplexMatrix m(d);
    std::vector<ComplexVector> dh_states;
    dh_states.reserve(d);
    for (std::size_t k = 0; k < d; ++k) dh_states.push_back(dH * frame.states[k]);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            if (j == k) continue;
            const double gap = frame.energies[k] - frame.energies[j];
            if (std::abs(gap) < kGapTolerance)
                throw Error(ErrorKind::DegenerateSpectrum, "coupling across a degenerate pair", frame.s, frame.T);
            m(j, k) = inner(frame.states[j], dh_states[k]) / gap;
        }
    }
    return m;
}

ComplexVector state_derivative(const FrameTrajectory& trajectory, std::size_t level, std::size_t i) {
    const auto& f = trajectory.frames;
    const double h = trajectory.h();
    if (i == 0) return Complex(1.0 / h) * (f[1].states[level] - f[0].states[level]);
    if (i == trajectory.N) return Complex(1.0 / h) * (f[i].states[level] - f[i - 1].states[level]);
    return Complex(0.5 / h) * (f[i + 1].states[level] - f[i - 1].states[level]);
}

ComplexMatrix coupling_matrix(const FrameTrajectory& trajectory, std::size_t i) {
    const SpectralFrame& frame = trajectory.frames.at(i);
    ComplexMatrix m = coupling_matrix(frame, trajectory.dH.at(i));
    for (std::size_t k = 0; k < frame.dim(); ++k) {
        const Complex connection = inner(frame.states[k], state_derivative(trajectory, k, i));
        m(k, k) = Complex(0.0, connection.imag());
    }
    return m;
}

}  // namespace aqt
