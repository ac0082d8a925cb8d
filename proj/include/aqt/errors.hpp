#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace aqt {

enum class ErrorKind {
    // numerics
    NotHermitian,
    NoConvergence,
    Overflow,
    DimensionMismatch,
    // hamiltonians
    InvalidParameter,
    NonUnitaryOracle,
    SpecError,
    // spectral / evolution / adiabatic / conditions
    DegenerateSpectrum,
    StepSizeTooLarge,
    NormDrift,
    GridMismatch,
    SolverDivergence,
    NotClosedLoop,
    NotNormalized,
    PairEqual,
    HypothesisAViolated,
    // cli
    ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

/// True for failures that mean "the configuration is wrong" rather than
/// "the numerics broke down".
bool is_configuration_error(ErrorKind kind) noexcept;

/// Single exception type for the library. The optional (s, T) pair locates
/// the failure on the scaled-time grid when it is known.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    Error(ErrorKind kind, const std::string& message, double s, double T);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<double> s() const noexcept { return s_; }
    std::optional<double> T() const noexcept { return T_; }

    /// Copy of this error with (s, T) attached, unless already present.
    Error located(double s, double T) const;

private:
    ErrorKind kind_;
    std::optional<double> s_;
    std::optional<double> T_;
};

}  // namespace aqt
