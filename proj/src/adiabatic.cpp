#include "aqt/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "aqt/errors.hpp"

namespace aqt {

double wrap_phase(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(angle, two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

AdiabaticState adiabatic_state(const FrameTrajectory& frames, std::size_t level, std::size_t i) {
    if (level >= frames.dim()) throw Error(ErrorKind::InvalidParameter, "level index exceeds the dimension");
    if (i >= frames.frames.size()) throw Error(ErrorKind::GridMismatch, "node index outside the frame grid");

    // int <n|d_s n> accumulated as i * sum arg <n_k|n_{k+1}>: the residual
    // phases left by the discrete parallel transport.
    double connection = 0.0;
    for (std::size_t k = 0; k < i; ++k) {
        connection += std::arg(inner(frames.frames[k].states[level], frames.frames[k + 1].states[level]));
    }
    AdiabaticState out;
    out.s = frames.s(i);
    out.T = frames.T;
    out.level = level;
    out.dynamical_phase = frames.T * frames.phase_integrals[i][level];
    out.geometric_factor = std::polar(1.0, -connection);
    out.state = (std::polar(1.0, -out.dynamical_phase) * out.geometric_factor) * frames.frames[i].states[level];
    return out;
}

double discrete_holonomy(std::span<const ComplexVector> loop) {
    if (loop.size() < 2) throw Error(ErrorKind::NotClosedLoop, "a loop needs at least two states");
    Complex product = 1.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const Complex overlap = inner(loop[k], loop[(k + 1) % loop.size()]);
        product *= overlap / std::abs(overlap);
    }
    return wrap_phase(-std::arg(product));
}

PhaseReport berry_phase(const FrameTrajectory& frames, std::size_t level) {
    if (!frames.closed_loop) throw Error(ErrorKind::NotClosedLoop, "Berry phase requires a closed-loop family");
    if (level >= frames.dim()) throw Error(ErrorKind::InvalidParameter, "level index exceeds the dimension");

    // The node at s = 1 duplicates s = 0 spectrally; the loop closes onto s_0.
    std::vector<ComplexVector> fine;
    std::vector<ComplexVector> coarse;
    fine.reserve(frames.N + 1);
    for (std::size_t i = 0; i <= frames.N; ++i) {
        fine.push_back(frames.frames[i].states[level]);
        if (i % 2 == 0) coarse.push_back(frames.frames[i].states[level]);
    }
    PhaseReport out;
    out.loop = frames.family_name;
    out.level = level;
    out.discretization = frames.N;
    out.berry_phase = discrete_holonomy(fine);
    if (frames.N % 2 == 0) out.estimated_error = std::abs(wrap_phase(out.berry_phase - discrete_holonomy(coarse)));
    return out;
}

double infidelity(const ComplexVector& a, const ComplexVector& b) {
    if (!is_normalized(a, 1e-6) || !is_normalized(b, 1e-6))
        throw Error(ErrorKind::NotNormalized, "infidelity needs normalized states");
    return std::clamp(1.0 - std::abs(inner(a, b)), 0.0, 1.0);
}

double state_distance(const ComplexVector& a, const ComplexVector& b) { return norm(a - b); }

}  // namespace aqt
