#include "aqt/errors.hpp"

#include <cstdio>

namespace aqt {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::Overflow: return "Overflow";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidParameter: return "InvalidParameter";
        case ErrorKind::NonUnitaryOracle: return "NonUnitaryOracle";
        case ErrorKind::SpecError: return "SpecError";
        case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorKind::StepSizeTooLarge: return "StepSizeTooLarge";
        case ErrorKind::NormDrift: return "NormDrift";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::SolverDivergence: return "SolverDivergence";
        case ErrorKind::NotClosedLoop: return "NotClosedLoop";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::PairEqual: return "PairEqual";
        case ErrorKind::HypothesisAViolated: return "HypothesisAViolated";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_configuration_error(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParameter:
        case ErrorKind::SpecError:
        case ErrorKind::ConfigError:
        case ErrorKind::NotClosedLoop:
        case ErrorKind::PairEqual:
            return true;
        default:
            return false;
    }
}

namespace {

std::string with_location(const std::string& message, double s, double T) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " (s=%.17g, T=%.17g)", s, T);
    return message + buf;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

Error::Error(ErrorKind kind, const std::string& message, double s, double T)
    : std::runtime_error(std::string(to_string(kind)) + ": " + with_location(message, s, T)),
      kind_(kind),
      s_(s),
      T_(T) {}

Error Error::located(double s, double T) const {
    if (s_) return *this;
    std::string msg = what();
    const std::string prefix = std::string(to_string(kind_)) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    return Error(kind_, msg, s, T);
}

}  // namespace aqt
