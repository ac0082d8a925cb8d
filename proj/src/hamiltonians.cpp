#include "aqt/hamiltonians.hpp"

#include <cmath>
#include <numbers>

#include "aqt/errors.hpp"
#include "aqt/evolution.hpp"

namespace aqt {

HamiltonianFamily::HamiltonianFamily(Traits traits, Evaluator evaluate, Evaluator derivative, ScaleProbe scale)
    : traits_(std::move(traits)),
      evaluate_(std::move(evaluate)),
      derivative_(std::move(derivative)),
      scale_(std::move(scale)) {
    if (traits_.dim == 0 || traits_.dim > kMaxDim)
        throw Error(ErrorKind::SpecError, "family dimension must lie in [1, 16]");
    if (!evaluate_) throw Error(ErrorKind::SpecError, "family has no evaluator");
}

ComplexMatrix HamiltonianFamily::evaluate(double s, double T) const { return evaluate_(s, T); }

ComplexMatrix HamiltonianFamily::derivative_in_s(double s, double T) const {
    if (derivative_) return derivative_(s, T);
    constexpr double h = 1e-5;
    if (s - h < 0.0) {
        ComplexMatrix d = -3.0 * evaluate_(s, T) + 4.0 * evaluate_(s + h, T) - evaluate_(s + 2 * h, T);
        return (1.0 / (2 * h)) * d;
    }
    if (s + h > 1.0) {
        ComplexMatrix d = 3.0 * evaluate_(s, T) - 4.0 * evaluate_(s - h, T) + evaluate_(s - 2 * h, T);
        return (1.0 / (2 * h)) * d;
    }
    return (1.0 / (2 * h)) * (evaluate_(s + h, T) - evaluate_(s - h, T));
}

SpectralScale HamiltonianFamily::spectral_scale(double T) const {
    if (scale_) return scale_(T);
    SpectralScale out;
    constexpr int kSamples = 256;
    for (int i = 0; i <= kSamples; ++i) {
        const ComplexMatrix h = evaluate_(static_cast<double>(i) / kSamples, T);
        const EigenSystem eig = hermitian_eig(h);
        out.spread = std::max(out.spread, eig.values.back() - eig.values.front());
        out.frobenius = std::max(out.frobenius, frobenius_norm(h));
    }
    return out;
}

// ---------------------------------------------------------------- built-ins

ComplexMatrix eval_landau_zener(double s, double gap, double rate) {
    if (!(gap > 0.0) || !std::isfinite(rate))
        throw Error(ErrorKind::InvalidParameter, "landau_zener requires gap > 0 and a finite rate");
    const double bz = rate * (2.0 * s - 1.0);
    return {{bz, gap}, {gap, -bz}};
}

ComplexMatrix eval_rotating_cone(double s, double omega0, double theta) {
    if (!(omega0 > 0.0) || !(theta >= 0.0 && theta <= std::numbers::pi))
        throw Error(ErrorKind::InvalidParameter, "rotating_cone requires omega0 > 0 and 0 <= theta <= pi");
    const double phi = 2.0 * std::numbers::pi * s;
    const double half = 0.5 * omega0;
    const double bx = half * std::sin(theta) * std::cos(phi);
    const double by = half * std::sin(theta) * std::sin(phi);
    const double bz = half * std::cos(theta);
    return {{bz, Complex(bx, -by)}, {Complex(bx, by), -bz}};
}

HamiltonianFamily landau_zener_family(double gap, double rate) {
    eval_landau_zener(0.5, gap, rate);  // parameter validation
    HamiltonianFamily::Traits traits{"landau_zener", 2, false, false, true};
    const double spread = 2.0 * std::sqrt(gap * gap + rate * rate);
    return HamiltonianFamily(
        traits, [gap, rate](double s, double) { return eval_landau_zener(s, gap, rate); },
        [rate](double, double) { return (2.0 * rate) * pauli_z(); },
        [spread](double) { return SpectralScale{spread, spread / std::sqrt(2.0)}; });
}

HamiltonianFamily rotating_cone_family(double omega0, double theta) {
    eval_rotating_cone(0.0, omega0, theta);
    HamiltonianFamily::Traits traits{"rotating_cone", 2, false, true, true};
    auto derivative = [omega0, theta](double s, double) {
        const double phi = 2.0 * std::numbers::pi * s;
        const double k = 0.5 * omega0 * std::sin(theta) * 2.0 * std::numbers::pi;
        const double dbx = -k * std::sin(phi);
        const double dby = k * std::cos(phi);
        return ComplexMatrix{{0.0, Complex(dbx, -dby)}, {Complex(dbx, dby), 0.0}};
    };
    return HamiltonianFamily(
        traits, [omega0, theta](double s, double) { return eval_rotating_cone(s, omega0, theta); }, derivative,
        [omega0](double) { return SpectralScale{omega0, omega0 / std::sqrt(2.0)}; });
}

HamiltonianFamily constant_family(const ComplexMatrix& matrix, std::string name) {
    if (matrix.dim() == 0 || matrix.dim() > kMaxDim)
        throw Error(ErrorKind::SpecError, "constant matrix dimension must lie in [1, 16]");
    if (!all_finite(matrix) || !is_hermitian(matrix))
        throw Error(ErrorKind::SpecError, "constant matrix is not Hermitian");
    HamiltonianFamily::Traits traits{std::move(name), matrix.dim(), false, true, true};
    const ComplexMatrix zero(matrix.dim());
    return HamiltonianFamily(
        traits, [matrix](double, double) { return matrix; }, [zero](double, double) { return zero; });
}

// ---------------------------------------------------------------- polynomial

namespace {

double term_value(const CoefficientTerm& t, double s, double inv_T) {
    double v = t.coefficient * std::pow(s, t.s_power) * std::pow(inv_T, t.inv_T_power);
    if (t.cos_freq != 0) v *= std::cos(2.0 * std::numbers::pi * t.cos_freq * s);
    if (t.sin_freq != 0) v *= std::sin(2.0 * std::numbers::pi * t.sin_freq * s);
    return v;
}

double term_derivative(const CoefficientTerm& t, double s, double inv_T) {
    const double scale = t.coefficient * std::pow(inv_T, t.inv_T_power);
    const double two_pi = 2.0 * std::numbers::pi;
    const double p = std::pow(s, t.s_power);
    const double dp = t.s_power == 0 ? 0.0 : t.s_power * std::pow(s, t.s_power - 1);
    const double c = t.cos_freq != 0 ? std::cos(two_pi * t.cos_freq * s) : 1.0;
    const double dc = t.cos_freq != 0 ? -two_pi * t.cos_freq * std::sin(two_pi * t.cos_freq * s) : 0.0;
    const double sn = t.sin_freq != 0 ? std::sin(two_pi * t.sin_freq * s) : 1.0;
    const double dsn = t.sin_freq != 0 ? two_pi * t.sin_freq * std::cos(two_pi * t.sin_freq * s) : 0.0;
    return scale * (dp * c * sn + p * dc * sn + p * c * dsn);
}

double inverse_time(double T) { return std::isinf(T) ? 0.0 : 1.0 / T; }

}  // namespace

HamiltonianFamily polynomial_family(std::vector<ComplexMatrix> basis,
                                    std::vector<std::vector<CoefficientTerm>> coefficients, std::string name) {
    if (basis.empty()) throw Error(ErrorKind::SpecError, "custom family needs at least one basis matrix");
    if (basis.size() != coefficients.size())
        throw Error(ErrorKind::SpecError, "custom family needs one coefficient list per basis matrix");
    const std::size_t dim = basis.front().dim();
    if (dim == 0 || dim > kMaxDim) throw Error(ErrorKind::SpecError, "basis dimension must lie in [1, 16]");
    bool t_dependent = false;
    for (std::size_t m = 0; m < basis.size(); ++m) {
        if (basis[m].dim() != dim) throw Error(ErrorKind::SpecError, "basis matrices differ in dimension");
        if (!all_finite(basis[m]) || !is_hermitian(basis[m]))
            throw Error(ErrorKind::SpecError, "basis matrix " + std::to_string(m) + " is not Hermitian");
        for (const auto& t : coefficients[m]) {
            if (t.s_power < 0 || t.inv_T_power < 0)
                throw Error(ErrorKind::SpecError, "coefficient powers must be non-negative");
            if (t.cos_freq < 0 || t.sin_freq < 0)
                throw Error(ErrorKind::SpecError, "trigonometric frequencies must be non-negative");
            if (!std::isfinite(t.coefficient)) throw Error(ErrorKind::SpecError, "coefficient is not finite");
            if (t.inv_T_power > 0 && t.coefficient != 0.0) t_dependent = true;
        }
    }

    auto evaluate = [basis, coefficients](double s, double T) {
        const double inv_T = inverse_time(T);
        ComplexMatrix h(basis.front().dim());
        for (std::size_t m = 0; m < basis.size(); ++m) {
            double c = 0.0;
            for (const auto& t : coefficients[m]) c += term_value(t, s, inv_T);
            if (c != 0.0) h += c * basis[m];
        }
        return h;
    };
    auto derivative = [basis, coefficients](double s, double T) {
        const double inv_T = inverse_time(T);
        ComplexMatrix h(basis.front().dim());
        for (std::size_t m = 0; m < basis.size(); ++m) {
            double c = 0.0;
            for (const auto& t : coefficients[m]) c += term_derivative(t, s, inv_T);
            if (c != 0.0) h += c * basis[m];
        }
        return h;
    };

    bool closed = true;
    for (double T : {1.0, 10.0, 1000.0}) {
        if (frobenius_norm(evaluate(0.0, T) - evaluate(1.0, T)) > 1e-12) closed = false;
    }
    HamiltonianFamily::Traits traits{std::move(name), dim, t_dependent, closed, true};
    return HamiltonianFamily(traits, evaluate, derivative);
}

// ---------------------------------------------------------------- dual

HamiltonianFamily build_dual_family(const HamiltonianFamily& base, PropagatorOracle oracle) {
    if (!oracle) throw Error(ErrorKind::SpecError, "dual family needs a propagator oracle");
    auto checked = [oracle](double s, double T) {
        ComplexMatrix u = oracle(s, T);
        if (!all_finite(u) || unitarity_defect(u) > 1e-8)
            throw Error(ErrorKind::NonUnitaryOracle, "propagator oracle drifted from unitarity", s, T);
        return u;
    };
    auto evaluate = [base, checked](double s, double T) {
        const ComplexMatrix u = checked(s, T);
        return -(adjoint(u) * base.evaluate(s, T) * u);
    };
    // d/ds (U^dag H U) = U^dag (dH/ds) U: the -iT[H, H] terms cancel.
    auto derivative = [base, checked](double s, double T) {
        const ComplexMatrix u = checked(s, T);
        return -(adjoint(u) * base.derivative_in_s(s, T) * u);
    };
    auto scale = [base](double T) { return base.spectral_scale(T); };
    HamiltonianFamily::Traits traits{"dual_of(" + base.name() + ")", base.dim(), true, false, false};
    return HamiltonianFamily(traits, evaluate, derivative, scale);
}

// ---------------------------------------------------------------- config form

const char* to_string(FamilyKind kind) noexcept {
    switch (kind) {
        case FamilyKind::LandauZener: return "landau_zener";
        case FamilyKind::RotatingCone: return "rotating_cone";
        case FamilyKind::Constant: return "constant";
        case FamilyKind::DualOf: return "dual_of";
        case FamilyKind::CustomMatrixPolynomial: return "custom_matrix_polynomial";
    }
    return "unknown";
}

std::optional<FamilyKind> family_kind_from_string(const std::string& text) {
    for (auto kind : {FamilyKind::LandauZener, FamilyKind::RotatingCone, FamilyKind::Constant, FamilyKind::DualOf,
                      FamilyKind::CustomMatrixPolynomial}) {
        if (text == to_string(kind)) return kind;
    }
    return std::nullopt;
}

namespace {

double required(const FamilySpec& spec, const std::string& key) {
    const auto it = spec.parameters.find(key);
    if (it == spec.parameters.end())
        throw Error(ErrorKind::SpecError,
                    std::string(to_string(spec.kind)) + " family is missing parameter '" + key + "'");
    return it->second;
}

void reject_unknown(const FamilySpec& spec, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : spec.parameters) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok)
            throw Error(ErrorKind::SpecError,
                        std::string(to_string(spec.kind)) + " family has unknown parameter '" + key + "'");
    }
}

}  // namespace

HamiltonianFamily parse_family(const FamilySpec& spec) {
    switch (spec.kind) {
        case FamilyKind::LandauZener:
            reject_unknown(spec, {"gap", "rate"});
            return landau_zener_family(required(spec, "gap"), required(spec, "rate"));
        case FamilyKind::RotatingCone:
            reject_unknown(spec, {"omega0", "theta"});
            return rotating_cone_family(required(spec, "omega0"), required(spec, "theta"));
        case FamilyKind::Constant:
            reject_unknown(spec, {});
            if (!spec.matrix) throw Error(ErrorKind::SpecError, "constant family needs a matrix");
            return constant_family(*spec.matrix, spec.name.empty() ? "constant" : spec.name);
        case FamilyKind::CustomMatrixPolynomial:
            reject_unknown(spec, {});
            return polynomial_family(spec.basis, spec.coefficients, spec.name.empty() ? "custom" : spec.name);
        case FamilyKind::DualOf: {
            reject_unknown(spec, {});
            if (!spec.base) throw Error(ErrorKind::SpecError, "dual_of family needs a base");
            const HamiltonianFamily base = parse_family(*spec.base);
            return build_dual_family(base, PropagatorCache(base));
        }
    }
    throw Error(ErrorKind::SpecError, "unknown family kind");
}

std::vector<FamilyDescription> list_families() {
    return {
        {"landau_zener", "gap: real > 0, rate: real", "gap*sigma_x + rate*(2s-1)*sigma_z, T-independent"},
        {"rotating_cone", "omega0: real > 0, theta: real in [0, pi]",
         "(omega0/2) n(s).sigma with n on a cone of half-angle theta, closed loop"},
        {"constant", "matrix: Hermitian d x d", "s- and T-independent Hermitian matrix"},
        {"dual_of", "base: family spec", "-U^dag H U built from the base propagator U, T-dependent"},
        {"custom_matrix_polynomial", "basis: Hermitian matrices, coefficients: term lists",
         "sum_m c_m(s,T) B_m, terms c*s^a*T^-b*cos(2 pi k s)*sin(2 pi m s)"},
    };
}

}  // namespace aqt
