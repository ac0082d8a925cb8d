#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "aqt/hamiltonians.hpp"
#include "aqt/numerics.hpp"

namespace aqt {

/// Minimum adjacent-level spacing below which a spectrum counts as degenerate.
inline constexpr double kGapTolerance = 1e-8;

/// Instantaneous eigenpairs at one (s, T), phases fixed by parallel transport.
struct SpectralFrame {
    double s = 0.0;
    double T = 0.0;
    std::vector<double> energies;       ///< ascending
    std::vector<ComplexVector> states;  ///< states[n] pairs with energies[n]
    double gap_min = 0.0;               ///< +inf for one-level systems

    std::size_t dim() const noexcept { return energies.size(); }
};

/// Diagonalizes H(s, T) and fixes the eigenvector phases: with `prev`, each
/// overlap <n_prev|n> is made real positive; without it, the largest
/// component of each eigenvector is made real positive.
/// Throws DegenerateSpectrum when an adjacent gap drops below kGapTolerance.
SpectralFrame spectral_frame(const HamiltonianFamily& family, double s, double T,
                             const SpectralFrame* prev = nullptr);

/// Same as spectral_frame, from an already evaluated matrix.
SpectralFrame make_frame(const ComplexMatrix& hamiltonian, double s, double T, const SpectralFrame* prev = nullptr);

/// Frames on the uniform grid s_i = i / N, chained in s so the gauge is
/// continuous, plus the cached derivative dH/ds and dynamical phase integrals.
struct FrameTrajectory {
    std::string family_name;
    bool closed_loop = false;
    double T = 0.0;
    std::size_t N = 0;
    std::vector<SpectralFrame> frames;                  ///< N + 1 frames
    std::vector<ComplexMatrix> dH;                      ///< dH/ds at each node
    std::vector<std::vector<double>> phase_integrals;   ///< [i][n] = int_0^{s_i} E_n ds'

    double s(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(N); }
    double h() const noexcept { return 1.0 / static_cast<double>(N); }
    std::size_t dim() const noexcept { return frames.empty() ? 0 : frames.front().dim(); }
};

/// Requires N >= 64. DegenerateSpectrum errors carry the offending (s, T).
FrameTrajectory frame_trajectory(const HamiltonianFamily& family, double T, std::size_t N);

/// Off-diagonal <j|d_s k> = <j|dH|k> / (E_k - E_j); the diagonal is left zero.
ComplexMatrix coupling_matrix(const SpectralFrame& frame, const ComplexMatrix& dH);

/// Full coupling at node i. Diagonal <k|d_s k> comes from differences of the
/// gauge-fixed neighbours (central inside, one-sided at the ends) and keeps
/// only its imaginary part.
ComplexMatrix coupling_matrix(const FrameTrajectory& trajectory, std::size_t i);

/// Central (one-sided at the ends) difference of the gauge-fixed frames.
ComplexVector state_derivative(const FrameTrajectory& trajectory, std::size_t level, std::size_t i);

}  // namespace aqt
