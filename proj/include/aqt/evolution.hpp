#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "aqt/hamiltonians.hpp"
#include "aqt/numerics.hpp"
#include "aqt/spectral.hpp"

namespace aqt {

enum class TrajectoryKind { Psi, Phi, U, W };

/// Values on the uniform grid s_i = i / N for one total time T.
template <class Value>
struct Trajectory {
    TrajectoryKind kind = TrajectoryKind::Psi;
    double T = 0.0;
    std::size_t N = 0;
    std::vector<Value> values;  ///< N + 1 entries

    double s(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(N); }
};

using StateTrajectory = Trajectory<ComplexVector>;
using OperatorTrajectory = Trajectory<ComplexMatrix>;

/// Grid size that resolves the phase exp(iT int dE) and satisfies the step
/// limit T/N <= 0.1/||H||: max(floor, 2048, 64 T dE_max, 10.5 T ||H||_F,max),
/// rounded up to a multiple of 256 so the quarter points are grid nodes.
std::size_t default_grid_size(const HamiltonianFamily& family, double T, std::size_t floor = 0);

/// d_s psi = -i T H(s, T) psi with classical RK4 on N steps.
/// Throws StepSizeTooLarge when T/N > 0.1/||H(s)||_F at a node, NormDrift
/// when | ||psi|| - 1 | exceeds 1e-6.
StateTrajectory integrate_schrodinger(const HamiltonianFamily& family, double T, const ComplexVector& psi0,
                                      std::size_t N);

/// d_s U = -i T H U from U(0) = I, same stepper and error policy.
OperatorTrajectory propagator(const HamiltonianFamily& family, double T, std::size_t N);

/// One RK4 step of d_s U = -i T H U from (s, u) to s + ds.
ComplexMatrix propagator_step(const HamiltonianFamily& family, double T, double s, double ds, const ComplexMatrix& u);

/// Lazily integrated propagator trajectories of one base family, keyed by
/// (T, N) with N = default_grid_size(base, T). Off-grid points are reached
/// by one RK4 step from the cached node below. Safe for concurrent callers;
/// copies share the cache.
class PropagatorCache {
public:
    explicit PropagatorCache(HamiltonianFamily base);

    ComplexMatrix operator()(double s, double T) const;

    /// Number of (T, N) entries filled so far.
    std::size_t size() const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

/// -U^dag H U with U from a PropagatorCache over `base`.
HamiltonianFamily dual_family(const HamiltonianFamily& base);

/// A(s_i) = sum_n exp(-i T theta_n(s_i)) |n(s_i)><n(0)|.
ComplexMatrix adiabatic_transformation(const FrameTrajectory& frames, std::size_t i);

/// phi(s) = A(s)^dag psi(s). Throws GridMismatch for differing T or N.
StateTrajectory adiabatic_transform(const StateTrajectory& psi, const FrameTrajectory& frames);

/// Kernel entries in the fixed |n(0)> basis:
/// K_jk = exp(i T int_0^s (E_j - E_k)) <j(s)|d_s k(s)>, split into the
/// diagonal part K1 and the off-diagonal part K2 with K = K1 + K2.
struct KernelSample {
    double s = 0.0;
    double T = 0.0;
    ComplexMatrix K;
    ComplexMatrix K1;
    ComplexMatrix K2;
};

KernelSample build_kernel(const FrameTrajectory& frames, std::size_t i);
std::vector<KernelSample> build_kernel(const FrameTrajectory& frames);

/// V0 M V0^dag with V0 the matrix of initial eigenvectors |n(0)>.
ComplexMatrix to_computational(const FrameTrajectory& frames, const ComplexMatrix& in_frame_basis);
/// Coefficients <n(0)|v>.
ComplexVector to_frame_basis(const FrameTrajectory& frames, const ComplexVector& v);

struct VolterraSolution {
    OperatorTrajectory W;             ///< in the |n(0)> basis
    double picard_correction = 0.0;   ///< max_i ||W_after - W_before||_F
};

/// W(s) = I - int_0^s K W by implicit product-trapezoidal marching followed
/// by one Picard sweep with cumulative Simpson. Throws SolverDivergence when
/// the sweep moves W by more than 1e-4 or produces non-finite values.
VolterraSolution solve_volterra(std::span<const KernelSample> kernel, std::size_t N);

/// d_s W = -K W by RK4 with step 2/N on the kernel nodes; result on the N/2
/// grid. Requires even N.
OperatorTrajectory kernel_ode(std::span<const KernelSample> kernel);
/// d_s c = -K c for frame-basis coefficients, same stepper.
StateTrajectory kernel_ode(std::span<const KernelSample> kernel, const ComplexVector& c0);

struct ExponentialDiagnostic {
    ComplexMatrix W_exp;
    double discrepancy = 0.0;
};

/// exp(-int_0^{s_i} K) against the Volterra solution at node i. Reported,
/// never asserted: the two agree only when the kernel commutes with itself
/// across s.
ExponentialDiagnostic ordinary_exponential_diagnostic(std::span<const KernelSample> kernel, std::size_t i,
                                                      const ComplexMatrix& W_volterra);

}  // namespace aqt
