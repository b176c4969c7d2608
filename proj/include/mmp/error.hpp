#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmp {

enum class Errc {
    DimensionMismatch,
    CornerOrderViolation,
    NonFiniteEntry,
    EmptyList,
    NegativeWeight,
    DomainError,
    NonMonotoneMap,
    NegativityDetected,
    NonpositiveDenominator,
    MissingMonotoneSplit,
    ZeroDiameterBox,
    EvaluationError,
    InvalidProblem,
    InvalidConfig,
    InvalidNetwork,
    InnerSolveFailed,
    SpecError,
    IoError,
    ParseError,
    SchemaVersionError,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::CornerOrderViolation: return "CornerOrderViolation";
    case Errc::NonFiniteEntry: return "NonFiniteEntry";
    case Errc::EmptyList: return "EmptyList";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::DomainError: return "DomainError";
    case Errc::NonMonotoneMap: return "NonMonotoneMap";
    case Errc::NegativityDetected: return "NegativityDetected";
    case Errc::NonpositiveDenominator: return "NonpositiveDenominator";
    case Errc::MissingMonotoneSplit: return "MissingMonotoneSplit";
    case Errc::ZeroDiameterBox: return "ZeroDiameterBox";
    case Errc::EvaluationError: return "EvaluationError";
    case Errc::InvalidProblem: return "InvalidProblem";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidNetwork: return "InvalidNetwork";
    case Errc::InnerSolveFailed: return "InnerSolveFailed";
    case Errc::SpecError: return "SpecError";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaVersionError: return "SchemaVersionError";
    }
    return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace mmp
