#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "aqt/numerics.hpp"
#include "aqt/spectral.hpp"

namespace aqt {

/// The adiabatic approximation for level n at node s_i:
/// exp(-i T int E_n) * exp(-int <n|d_s n>) * |n(s)>.
struct AdiabaticState {
    double s = 0.0;
    double T = 0.0;
    std::size_t level = 0;
    double dynamical_phase = 0.0;   ///< T int_0^s E_n ds'
    Complex geometric_factor = 1.0; ///< exp(-int_0^s <n|d_s n> ds'), unit modulus
    ComplexVector state;
};

AdiabaticState adiabatic_state(const FrameTrajectory& frames, std::size_t level, std::size_t i);

/// Berry phase of one level around a closed loop. The sign convention: the
/// parallel-transported state returns as exp(i gamma)|n(0)>.
struct PhaseReport {
    std::string loop;
    std::size_t level = 0;
    double berry_phase = 0.0;      ///< in (-pi, pi]
    std::size_t discretization = 0;
    double estimated_error = 0.0;  ///< |gamma_N - gamma_{N/2}| (wrapped)
};

/// gamma = -arg prod_i <n(s_i)|n(s_{i+1})>, closed by <n(s_N)|n(s_0)>.
/// Throws NotClosedLoop when the trajectory's family is not closed.
PhaseReport berry_phase(const FrameTrajectory& frames, std::size_t level);

/// Same product on an explicit list of states ordered around the loop; the
/// closing overlap <last|first> is appended. Gauge invariant by construction.
double discrete_holonomy(std::span<const ComplexVector> loop);

/// 1 - |<a|b>|. Throws NotNormalized if either norm is off by more than 1e-6.
double infidelity(const ComplexVector& a, const ComplexVector& b);

/// ||a - b||, phase sensitive.
double state_distance(const ComplexVector& a, const ComplexVector& b);

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace aqt
