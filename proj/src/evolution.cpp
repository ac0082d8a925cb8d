#include "aqt/evolution.hpp"

#include <cmath>
#include <future>
#include <map>
#include <mutex>

#include "aqt/errors.hpp"
#include "aqt/quadrature.hpp"

namespace aqt {

namespace {

constexpr double kStepLimit = 0.1;       // T * ds * ||H||_F
constexpr double kNormDriftLimit = 1e-6;

template <class State>
State rk4_step(const ComplexMatrix& h0, const ComplexMatrix& hm, const ComplexMatrix& h1, double T, double ds,
               const State& y) {
    const Complex a(0.0, -T);
    const State k1 = a * (h0 * y);
    const State k2 = a * (hm * (y + Complex(0.5 * ds) * k1));
    const State k3 = a * (hm * (y + Complex(0.5 * ds) * k2));
    const State k4 = a * (h1 * (y + Complex(ds) * k3));
    return y + Complex(ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ComplexMatrix evaluate_at(const HamiltonianFamily& family, double s, double T) {
    try {
        return family.evaluate(s, T);
    } catch (const Error& e) {
        throw e.located(s, T);
    }
}

void check_step(const ComplexMatrix& h, double T, double ds, double s) {
    if (T * ds * frobenius_norm(h) > kStepLimit * (1.0 + 1e-12)) {
        throw Error(ErrorKind::StepSizeTooLarge,
                    "T/N exceeds 0.1/||H||; refine the grid (default_grid_size gives a safe N)", s, T);
    }
}

double drift(const ComplexVector& v) { return std::abs(norm(v) - 1.0); }
double drift(const ComplexMatrix& u) { return unitarity_defect(u); }

template <class State>
Trajectory<State> integrate(const HamiltonianFamily& family, double T, State y, std::size_t N, TrajectoryKind kind) {
    if (N == 0) throw Error(ErrorKind::InvalidParameter, "integration needs N >= 1");
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidParameter, "T must be positive and finite");
    Trajectory<State> out{kind, T, N, {}};
    out.values.reserve(N + 1);
    out.values.push_back(y);
    const double ds = 1.0 / static_cast<double>(N);
    ComplexMatrix h0 = evaluate_at(family, 0.0, T);
    for (std::size_t i = 0; i < N; ++i) {
        const double s = out.s(i);
        const double s_next = out.s(i + 1);
        check_step(h0, T, ds, s);
        const ComplexMatrix hm = evaluate_at(family, s + 0.5 * ds, T);
        ComplexMatrix h1 = evaluate_at(family, s_next, T);
        y = rk4_step(h0, hm, h1, T, ds, y);
        if (drift(y) > kNormDriftLimit || !all_finite(y)) {
            throw Error(ErrorKind::NormDrift, "norm drift beyond 1e-6; integration invalid", s_next, T);
        }
        out.values.push_back(y);
        h0 = std::move(h1);
    }
    check_step(h0, T, ds, 1.0);
    return out;
}

}  // namespace

std::size_t default_grid_size(const HamiltonianFamily& family, double T, std::size_t floor) {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorKind::InvalidParameter, "T must be positive and finite");
    const SpectralScale scale = family.spectral_scale(T);
    double n = std::max<double>(static_cast<double>(floor), 2048.0);
    n = std::max(n, std::ceil(64.0 * T * scale.spread));
    n = std::max(n, std::ceil(10.5 * T * scale.frobenius));
    constexpr std::size_t kQuantum = 256;
    const auto count = static_cast<std::size_t>(n);
    return (count + kQuantum - 1) / kQuantum * kQuantum;
}

StateTrajectory integrate_schrodinger(const HamiltonianFamily& family, double T, const ComplexVector& psi0,
                                      std::size_t N) {
    if (psi0.dim() != family.dim()) throw Error(ErrorKind::DimensionMismatch, "initial state dimension");
    if (!is_normalized(psi0, 1e-10)) throw Error(ErrorKind::NotNormalized, "initial state must be normalized");
    return integrate(family, T, psi0, N, TrajectoryKind::Psi);
}

OperatorTrajectory propagator(const HamiltonianFamily& family, double T, std::size_t N) {
    return integrate(family, T, ComplexMatrix::identity(family.dim()), N, TrajectoryKind::U);
}

ComplexMatrix propagator_step(const HamiltonianFamily& family, double T, double s, double ds, const ComplexMatrix& u) {
    const ComplexMatrix h0 = evaluate_at(family, s, T);
    const ComplexMatrix hm = evaluate_at(family, s + 0.5 * ds, T);
    const ComplexMatrix h1 = evaluate_at(family, s + ds, T);
    return rk4_step(h0, hm, h1, T, ds, u);
}

// ---------------------------------------------------------------- cache

struct PropagatorCache::State {
    using Entry = std::shared_ptr<const OperatorTrajectory>;
    explicit State(HamiltonianFamily b) : base(std::move(b)) {}
    HamiltonianFamily base;
    mutable std::mutex mutex;
    std::map<double, std::shared_future<Entry>> entries;
};

PropagatorCache::PropagatorCache(HamiltonianFamily base) : state_(std::make_shared<State>(std::move(base))) {}

std::size_t PropagatorCache::size() const {
    std::lock_guard lock(state_->mutex);
    return state_->entries.size();
}

ComplexMatrix PropagatorCache::operator()(double s, double T) const {
    std::shared_future<State::Entry> future;
    std::promise<State::Entry> promise;
    bool fill = false;
    {
        std::lock_guard lock(state_->mutex);
        auto it = state_->entries.find(T);
        if (it == state_->entries.end()) {
            future = promise.get_future().share();
            state_->entries.emplace(T, future);
            fill = true;
        } else {
            future = it->second;
        }
    }
    if (fill) {
        try {
            const std::size_t N = default_grid_size(state_->base, T);
            promise.set_value(std::make_shared<const OperatorTrajectory>(propagator(state_->base, T, N)));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    const OperatorTrajectory& traj = *future.get();

    const double x = s * static_cast<double>(traj.N);
    if (x <= 0.0) return traj.values.front();
    if (x >= static_cast<double>(traj.N)) return traj.values.back();
    auto i = static_cast<std::size_t>(std::floor(x));
    const double frac = x - static_cast<double>(i);
    if (frac < 1e-9) return traj.values[i];
    if (frac > 1.0 - 1e-9) return traj.values[i + 1];
    return propagator_step(state_->base, T, traj.s(i), s - traj.s(i), traj.values[i]);
}

HamiltonianFamily dual_family(const HamiltonianFamily& base) { return build_dual_family(base, PropagatorCache(base)); }

// ---------------------------------------------------------------- transformation

ComplexMatrix adiabatic_transformation(const FrameTrajectory& frames, std::size_t i) {
    const std::size_t d = frames.dim();
    ComplexMatrix a(d);
    const SpectralFrame& initial = frames.frames.front();
    const SpectralFrame& current = frames.frames.at(i);
    for (std::size_t n = 0; n < d; ++n) {
        const Complex phase = std::polar(1.0, -frames.T * frames.phase_integrals[i][n]);
        a += phase * outer(current.states[n], initial.states[n]);
    }
    return a;
}

StateTrajectory adiabatic_transform(const StateTrajectory& psi, const FrameTrajectory& frames) {
    if (psi.N != frames.N || psi.T != frames.T || psi.values.size() != frames.frames.size())
        throw Error(ErrorKind::GridMismatch, "state trajectory and frames differ in T or grid");
    StateTrajectory phi{TrajectoryKind::Phi, psi.T, psi.N, {}};
    phi.values.reserve(psi.values.size());
    for (std::size_t i = 0; i < psi.values.size(); ++i) {
        phi.values.push_back(adjoint(adiabatic_transformation(frames, i)) * psi.values[i]);
    }
    return phi;
}

// ---------------------------------------------------------------- kernel

KernelSample build_kernel(const FrameTrajectory& frames, std::size_t i) {
    const ComplexMatrix coupling = coupling_matrix(frames, i);
    const std::size_t d = frames.dim();
    KernelSample out{frames.s(i), frames.T, ComplexMatrix(d), ComplexMatrix(d), ComplexMatrix(d)};
    const auto& theta = frames.phase_integrals[i];
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) {
            if (j == k) {
                out.K1(j, k) = coupling(j, k);
            } else {
                out.K2(j, k) = std::polar(1.0, frames.T * (theta[j] - theta[k])) * coupling(j, k);
            }
        }
    }
    out.K = out.K1 + out.K2;
    return out;
}

std::vector<KernelSample> build_kernel(const FrameTrajectory& frames) {
    std::vector<KernelSample> out;
    out.reserve(frames.frames.size());
    for (std::size_t i = 0; i < frames.frames.size(); ++i) out.push_back(build_kernel(frames, i));
    return out;
}

ComplexMatrix to_computational(const FrameTrajectory& frames, const ComplexMatrix& in_frame_basis) {
    const ComplexMatrix v0 = ComplexMatrix::from_columns(frames.frames.front().states);
    return v0 * in_frame_basis * adjoint(v0);
}

ComplexVector to_frame_basis(const FrameTrajectory& frames, const ComplexVector& v) {
    const auto& states = frames.frames.front().states;
    ComplexVector c(states.size());
    for (std::size_t n = 0; n < states.size(); ++n) c[n] = inner(states[n], v);
    return c;
}

// ---------------------------------------------------------------- Volterra

VolterraSolution solve_volterra(std::span<const KernelSample> kernel, std::size_t N) {
    if (kernel.size() != N + 1 || N < 2) throw Error(ErrorKind::GridMismatch, "kernel samples must cover the N grid");
    const double T = kernel.front().T;
    const std::size_t d = kernel.front().K.dim();
    const double h = 1.0 / static_cast<double>(N);
    const ComplexMatrix eye = ComplexMatrix::identity(d);

    std::vector<ComplexMatrix> w;
    w.reserve(N + 1);
    w.push_back(eye);
    // running = K_0 W_0 / 2 + sum_{0 < i < n} K_i W_i
    ComplexMatrix running = 0.5 * (kernel[0].K * w[0]);
    for (std::size_t n = 1; n <= N; ++n) {
        const ComplexMatrix lhs = eye + Complex(0.5 * h) * kernel[n].K;
        const ComplexMatrix rhs = eye - Complex(h) * running;
        w.push_back(solve(lhs, rhs));
        running += kernel[n].K * w.back();
    }

    std::vector<ComplexMatrix> integrand;
    integrand.reserve(N + 1);
    for (std::size_t i = 0; i <= N; ++i) integrand.push_back(kernel[i].K * w[i]);
    const std::vector<ComplexMatrix> integral = cumulative_simpson(integrand, h);

    VolterraSolution out{{TrajectoryKind::W, T, N, {}}, 0.0};
    out.W.values.reserve(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        ComplexMatrix corrected = eye - integral[i];
        out.picard_correction = std::max(out.picard_correction, frobenius_norm(corrected - w[i]));
        out.W.values.push_back(std::move(corrected));
    }
    if (!std::isfinite(out.picard_correction) || out.picard_correction > 1e-4) {
        throw Error(ErrorKind::SolverDivergence,
                    "Picard sweep moved W by " + std::to_string(out.picard_correction) +
                        "; the kernel is under-resolved on this grid",
                    1.0, T);
    }
    return out;
}

namespace {

template <class State>
Trajectory<State> kernel_rk4(std::span<const KernelSample> kernel, State y, TrajectoryKind kind) {
    const std::size_t N = kernel.size() - 1;
    if (kernel.size() < 3 || N % 2 != 0) throw Error(ErrorKind::GridMismatch, "kernel ODE needs an even N");
    const double h = 1.0 / static_cast<double>(N);
    Trajectory<State> out{kind, kernel.front().T, N / 2, {}};
    out.values.reserve(N / 2 + 1);
    out.values.push_back(y);
    for (std::size_t i = 0; i < N; i += 2) {
        const State k1 = -1.0 * (kernel[i].K * y);
        const State k2 = -1.0 * (kernel[i + 1].K * (y + Complex(h) * k1));
        const State k3 = -1.0 * (kernel[i + 1].K * (y + Complex(h) * k2));
        const State k4 = -1.0 * (kernel[i + 2].K * (y + Complex(2.0 * h) * k3));
        y = y + Complex(2.0 * h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.values.push_back(y);
    }
    return out;
}

}  // namespace

OperatorTrajectory kernel_ode(std::span<const KernelSample> kernel) {
    if (kernel.empty()) throw Error(ErrorKind::GridMismatch, "empty kernel");
    return kernel_rk4(kernel, ComplexMatrix::identity(kernel.front().K.dim()), TrajectoryKind::W);
}

StateTrajectory kernel_ode(std::span<const KernelSample> kernel, const ComplexVector& c0) {
    if (kernel.empty()) throw Error(ErrorKind::GridMismatch, "empty kernel");
    return kernel_rk4(kernel, c0, TrajectoryKind::Phi);
}

ExponentialDiagnostic ordinary_exponential_diagnostic(std::span<const KernelSample> kernel, std::size_t i,
                                                      const ComplexMatrix& W_volterra) {
    if (i >= kernel.size()) throw Error(ErrorKind::GridMismatch, "diagnostic index outside the kernel grid");
    const std::size_t d = kernel.front().K.dim();
    ComplexMatrix integral(d);
    if (i > 0) {
        const double h = kernel[1].s - kernel[0].s;
        std::vector<ComplexMatrix> values;
        const std::size_t count = std::max<std::size_t>(i + 1, 3);
        values.reserve(count);
        for (std::size_t k = 0; k < count && k < kernel.size(); ++k) values.push_back(kernel[k].K);
        integral = cumulative_simpson(values, h).at(i);
    }
    ExponentialDiagnostic out{matrix_exp(-integral), 0.0};
    out.discrepancy = frobenius_norm(out.W_exp - W_volterra);
    return out;
}

}  // namespace aqt
