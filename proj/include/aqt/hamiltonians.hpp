#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aqt/numerics.hpp"

namespace aqt {

/// Coarse spectral size of a family at one T, used to size integration grids.
struct SpectralScale {
    double spread = 0.0;     ///< max over s of E_max - E_min
    double frobenius = 0.0;  ///< max over s of ||H(s, T)||_F
};

/// H(s, T) on s in [0, 1], time in units with hbar = 1.
///
/// Families are immutable values; copies share any internal caches.
/// `limit_available` means evaluate(s, +inf) is meaningful (the T -> inf
/// limit family exists in closed form).
class HamiltonianFamily {
public:
    using Evaluator = std::function<ComplexMatrix(double s, double T)>;
    using ScaleProbe = std::function<SpectralScale(double T)>;

    struct Traits {
        std::string name;
        std::size_t dim = 0;
        bool t_dependent = false;
        bool closed_loop = false;
        bool limit_available = true;
    };

    HamiltonianFamily(Traits traits, Evaluator evaluate, Evaluator derivative = {}, ScaleProbe scale = {});

    const std::string& name() const noexcept { return traits_.name; }
    std::size_t dim() const noexcept { return traits_.dim; }
    bool t_dependent() const noexcept { return traits_.t_dependent; }
    bool closed_loop() const noexcept { return traits_.closed_loop; }
    bool limit_available() const noexcept { return traits_.limit_available; }
    bool has_analytic_derivative() const noexcept { return static_cast<bool>(derivative_); }

    ComplexMatrix evaluate(double s, double T) const;
    /// Analytic when provided, otherwise central differences with step 1e-5
    /// (one-sided within one step of the interval ends).
    ComplexMatrix derivative_in_s(double s, double T) const;
    /// Sampled over 257 points unless the family supplies its own probe.
    SpectralScale spectral_scale(double T) const;

private:
    Traits traits_;
    Evaluator evaluate_;
    Evaluator derivative_;
    ScaleProbe scale_;
};

// ---------------------------------------------------------------- built-ins

/// Delta * sigma_x + v * (2s - 1) * sigma_z. Throws InvalidParameter for Delta <= 0.
ComplexMatrix eval_landau_zener(double s, double gap, double rate);

/// (omega0 / 2) * [sin(theta) cos(2 pi s) sigma_x + sin(theta) sin(2 pi s) sigma_y + cos(theta) sigma_z].
ComplexMatrix eval_rotating_cone(double s, double omega0, double theta);

HamiltonianFamily landau_zener_family(double gap, double rate);
HamiltonianFamily rotating_cone_family(double omega0, double theta);
HamiltonianFamily constant_family(const ComplexMatrix& matrix, std::string name = "constant");

/// One factor product c * s^a * T^-b * cos(2 pi k s) * sin(2 pi m s); a zero
/// frequency means the trigonometric factor is absent.
struct CoefficientTerm {
    double coefficient = 1.0;
    int s_power = 0;
    int inv_T_power = 0;
    int cos_freq = 0;
    int sin_freq = 0;
};

/// H(s, T) = sum_m c_m(s, T) B_m with each c_m a sum of CoefficientTerms.
HamiltonianFamily polynomial_family(std::vector<ComplexMatrix> basis,
                                    std::vector<std::vector<CoefficientTerm>> coefficients,
                                    std::string name = "custom");

/// (s, T) -> U(s, T), the evolution operator of some base family.
using PropagatorOracle = std::function<ComplexMatrix(double s, double T)>;

/// Dual family -U^dagger H U, whose exact propagator is U^dagger.
/// Evaluation throws NonUnitaryOracle when ||U^dagger U - I||_F > 1e-8.
HamiltonianFamily build_dual_family(const HamiltonianFamily& base, PropagatorOracle oracle);

// ---------------------------------------------------------------- config form

enum class FamilyKind { LandauZener, RotatingCone, Constant, DualOf, CustomMatrixPolynomial };

const char* to_string(FamilyKind kind) noexcept;
std::optional<FamilyKind> family_kind_from_string(const std::string& text);

struct FamilySpec {
    std::string name;
    FamilyKind kind = FamilyKind::Constant;
    std::map<std::string, double> parameters;
    std::optional<ComplexMatrix> matrix;                       ///< constant
    std::vector<ComplexMatrix> basis;                          ///< custom_matrix_polynomial
    std::vector<std::vector<CoefficientTerm>> coefficients;    ///< custom_matrix_polynomial
    std::shared_ptr<const FamilySpec> base;                    ///< dual_of
};

/// Throws SpecError for incomplete or inconsistent specs, InvalidParameter
/// for out-of-range parameters.
HamiltonianFamily parse_family(const FamilySpec& spec);

struct FamilyDescription {
    std::string kind;
    std::string parameters;
    std::string summary;
};

/// Built-in kinds in a stable order.
std::vector<FamilyDescription> list_families();

}  // namespace aqt
