#pragma once

// Numerical audits of the sufficient conditions for the adiabatic limit.
// Every "T -> infinity" limit becomes a log-log decay fit over a geometric
// T-grid with a three-way verdict.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqt/evolution.hpp"
#include "aqt/hamiltonians.hpp"
#include "aqt/numerics.hpp"
#include "aqt/spectral.hpp"

namespace aqt {

enum class Verdict { Vanishes, Persists, Inconclusive };

const char* to_string(Verdict verdict) noexcept;

/// Values at or below this are treated as exact zeros.
inline constexpr double kZeroFloor = 1e-12;

/// A quantity sampled over increasing T with its fitted decay exponent.
///
/// verdict = vanishes    iff slope <= -0.5 and values.back() < values.front() / 4,
///           persists    iff slope >= -0.1,
///           inconclusive otherwise.
/// A series whose values all lie at or below kZeroFloor is identically zero
/// and classified as vanishing with slope 0.
struct ConvergenceSeries {
    std::string label;
    std::vector<double> T_values;
    std::vector<double> values;
    double slope = 0.0;
    double slope_stderr = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    bool identically_zero = false;
};

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};

/// Least squares fit of log(value) against log(T).
SlopeFit fit_log_log(std::span<const double> T_values, std::span<const double> values);

/// Fits and classifies. Throws InvalidParameter unless T is strictly
/// increasing and positive and the sizes match.
ConvergenceSeries make_series(std::string label, std::vector<double> T_values, std::vector<double> values);

/// Slope of the fit over the first k + 1 points, empty for k = 0.
std::vector<std::optional<double>> running_slopes(const ConvergenceSeries& series);

/// 8 * 2^k for k = 0..6.
std::vector<double> default_T_grid();

/// Worst of several verdicts: persists > inconclusive > vanishes.
Verdict combine(std::span<const Verdict> verdicts);

struct AuditOptions {
    std::size_t grid_floor = 0;  ///< minimum s-grid size per T
    unsigned jobs = 1;
};

// ---------------------------------------------------------------- condition (b)

/// Sup-over-grid distances of one T's frames from the reference frames.
struct FrameDistance {
    double state = 0.0;       ///< max_{i,n} min_phase || |n_T> - |n_ref> ||
    double derivative = 0.0;  ///< same for d_s|n>, phase aligned by the states
};

FrameDistance frame_distance(const FrameTrajectory& frames, const FrameTrajectory& reference);

struct ConditionBReport {
    ConvergenceSeries series;      ///< max(state, derivative) per T
    ConvergenceSeries state;
    ConvergenceSeries derivative;
    double T_reference = 0.0;      ///< +inf when the family has a closed-form limit
};

/// Reference frames are the T = inf family when available; otherwise the
/// largest T of the grid, which is then left out of the series.
ConditionBReport check_condition_b(const HamiltonianFamily& family, std::span<const double> T_grid,
                                   const AuditOptions& options = {});

// ---------------------------------------------------------------- condition (c)

struct CouplingReport {
    std::size_t j = 0;
    std::size_t k = 0;
    double max_coupling = 0.0;  ///< max_s |<j|d_s k>|
    double s_at_max = 0.0;
    bool identically_zero = false;  ///< max_coupling < 1e-10
};

/// One entry per pair j < k.
std::vector<CouplingReport> check_condition_c(const FrameTrajectory& frames);

// ---------------------------------------------------------------- condition (d)

/// max over s_targets of |int_0^s exp(i Phi_jk(s')) ds'| at one T.
///
/// `effective` uses the full phase of the kernel entry K_jk: the dynamical
/// phase T int (E_j - E_k) plus the phase carried by the parallel-transported
/// coupling <j|d_s k>. `bare` uses the dynamical phase alone. The two agree
/// for families with real couplings of fixed sign; they differ when the
/// eigenframe itself carries T-dependent phases.
struct ConditionDPoint {
    double effective = 0.0;
    double bare = 0.0;
};

ConditionDPoint condition_d_point(const FrameTrajectory& frames, std::size_t j, std::size_t k,
                                  std::span<const double> s_targets);

struct ConditionDReport {
    std::size_t j = 0;
    std::size_t k = 0;
    ConvergenceSeries series;  ///< effective phase, carries the verdict
    ConvergenceSeries bare;
};

std::vector<double> default_s_targets();

/// Throws PairEqual for j == k.
ConditionDReport check_condition_d(std::span<const FrameTrajectory> per_T, std::size_t j, std::size_t k,
                                   std::span<const double> s_targets);

ConditionDReport check_condition_d(const HamiltonianFamily& family, std::span<const double> T_grid, std::size_t j,
                                   std::size_t k, std::span<const double> s_targets,
                                   const AuditOptions& options = {});

/// Condition (d) for a prescribed level difference E_j - E_k = gap(s, T),
/// for spectra that are easier to state than to realize as a Hamiltonian.
ConvergenceSeries check_condition_d(const std::function<double(double s, double T)>& level_difference,
                                    std::span<const double> T_grid, std::span<const double> s_targets,
                                    std::size_t grid_floor = 0);

// ---------------------------------------------------------------- kernel integrals

/// max over s_targets of || int_0^s K2 ||_F.
double offdiagonal_kernel_integral(std::span<const KernelSample> kernel, std::span<const double> s_targets);

/// int_0^1 K1 as its diagonal entries.
std::vector<Complex> diagonal_kernel_integral(std::span<const KernelSample> kernel);

// ---------------------------------------------------------------- Riemann-Lebesgue

using OscillatoryFamily = std::function<Complex(double T, double s)>;
using ScalarFunction = std::function<Complex(double s)>;

struct RiemannLebesgueReport {
    double max_modulus = 0.0;         ///< max sampled |g_T|, hypothesis (A)
    ConvergenceSeries primitive_sup;  ///< sup_c |int_0^c g_T|, hypothesis (B)
    ConvergenceSeries integral;       ///< |int_0^1 g_T f|
};

/// `rate` bounds |d_s phase| / T and sizes the quadrature panels.
/// Throws HypothesisAViolated when a sample of |g_T| exceeds `bound`.
RiemannLebesgueReport riemann_lebesgue_check(const OscillatoryFamily& g, double bound, const ScalarFunction& f,
                                             std::span<const double> T_grid, double rate = 1.0);

struct UniformFamilyReport {
    ConvergenceSeries sup_difference;   ///< sup_s |f_T - f|
    ConvergenceSeries integral_T;       ///< |int g_T f_T|
    ConvergenceSeries integral_limit;   ///< |int g_T f|
    bool bound_holds = true;            ///< |int g_T f_T - int g_T f| <= bound * sup|f_T - f| at every T
    bool shared_verdict = false;
};

UniformFamilyReport uniform_family_check(const OscillatoryFamily& f_T, const ScalarFunction& f,
                                         const OscillatoryFamily& g, double bound, std::span<const double> T_grid,
                                         double rate = 1.0);

// ---------------------------------------------------------------- step functions

/// Right-open piecewise constant function on [0, 1].
struct StepFunction {
    std::vector<double> breakpoints;  ///< 0 = x_0 < ... < x_p = 1
    std::vector<double> levels;       ///< y_1 .. y_p

    double operator()(double x) const;
};

struct StepApproximation {
    StepFunction step;
    double l1_error = 0.0;  ///< int_0^1 |f - step|
};

/// Uniform breakpoints with midpoint levels.
StepApproximation step_approximate(const std::function<double(double)>& f, std::size_t pieces);

/// The bound chain behind the general Riemann-Lebesgue lemma, run on
/// g_T = exp(i T s): pick p with L/(4p) < eps/(2M), predict the T at which
/// the step part is below eps/2, then check |int f g_T| < eps there.
struct StepChainReport {
    double epsilon = 0.0;
    double bound = 0.0;
    std::size_t pieces = 0;
    double l1_error = 0.0;
    double approximation_term = 0.0;  ///< M * l1_error, must be < eps/2
    double level_sum = 0.0;           ///< sum |y_i|
    double predicted_T = 0.0;         ///< 4 sum|y_i| / eps
    double step_integral = 0.0;       ///< |int step * g_T| at predicted_T
    double integral = 0.0;            ///< |int f * g_T| at predicted_T
    bool holds = false;
};

StepChainReport step_chain(const std::function<double(double)>& f, double lipschitz, double bound,
                                   double epsilon);

// ---------------------------------------------------------------- formalism gap

/// Limit operator sum_k exp(-int_0^s K1_kk) |k(0)><k(0)| from reference
/// frames, in the computational basis, at every node.
std::vector<ComplexMatrix> limit_propagator(const FrameTrajectory& reference);

struct FormalismGapPoint {
    double w_distance = 0.0;   ///< sup_s ||W_T(s) - W_lim(s)||_F
    double dW_magnitude = 0.0; ///< sup_s ||K_T(s) W_T(s)||_F
};

FormalismGapPoint formalism_gap_point(const FrameTrajectory& frames, const FrameTrajectory& reference);

struct FormalismGapReport {
    ConvergenceSeries w_convergence;
    ConvergenceSeries dW_magnitude;
    double T_reference = 0.0;
};

FormalismGapReport formalism_gap(const HamiltonianFamily& family, std::span<const double> T_grid,
                                 const AuditOptions& options = {});

// ---------------------------------------------------------------- Berry phase limit

struct BerrySeriesReport {
    std::vector<double> phases;   ///< gamma_T per T
    double reference_phase = 0.0; ///< gamma at T = inf or the largest T
    ConvergenceSeries deviation;  ///< |gamma_T - gamma_ref| (wrapped)
};

BerrySeriesReport berry_phase_series(const HamiltonianFamily& family, std::size_t level,
                                     std::span<const double> T_grid, const AuditOptions& options = {});

// ---------------------------------------------------------------- grids

/// Shared s-grid policy of the audits: default_grid_size(family, T, floor).
std::size_t audit_grid(const HamiltonianFamily& family, double T, const AuditOptions& options);

/// Reference time and grids for audits that compare against a limit:
/// T = inf with each T on its own grid when the family provides the limit,
/// otherwise the largest T with every entry on the reference grid or finer.
struct ReferencePlan {
    double T_reference = 0.0;
    std::vector<double> T_values;  ///< T values that enter the series
    std::vector<std::size_t> N;    ///< grid per series entry
    std::size_t N_reference = 0;   ///< finite reference only
};

/// With `keep_largest` false the finite reference T is left out of T_values.
ReferencePlan plan_reference(const HamiltonianFamily& family, std::span<const double> T_grid,
                             const AuditOptions& options, bool keep_largest);

}  // namespace aqt
