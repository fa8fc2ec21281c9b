#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsecure {

enum class ErrorCode {
    NonHermitian,
    NonSymmetric,
    DimensionMismatch,
    EmptyInput,
    SingularMatrix,
    ShapeMismatch,
    ScenarioMismatch,
    WrongScenario,
    UnsupportedN,
    InvalidBehavior,
    TooLarge,
    LPStall,
    AngleOutOfRange,
    InvalidState,
    BudgetExceeded,
    SingularPsiHat,
    ConditionViolated,
    DegenerateDenominator,
    NonRealState,
    InvalidTable,
    HullMismatch,
    PreconditionNotMet,
    ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NonSymmetric: return "NonSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorCode::WrongScenario: return "WrongScenario";
    case ErrorCode::UnsupportedN: return "UnsupportedN";
    case ErrorCode::InvalidBehavior: return "InvalidBehavior";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::LPStall: return "LPStall";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::SingularPsiHat: return "SingularPsiHat";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::NonRealState: return "NonRealState";
    case ErrorCode::InvalidTable: return "InvalidTable";
    case ErrorCode::HullMismatch: return "HullMismatch";
    case ErrorCode::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qsecure
