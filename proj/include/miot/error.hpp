#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace miot {

enum class ErrorCode {
    NonPositiveRate,
    NegativeRate,
    InvalidAtomCount,
    InconsistentZeeman,
    FluctuationTooLarge,
    SingularSystem,
    StepTooLarge,
    ConvergenceFailure,
    ZeroRaman,
    InvalidQuantumNumbers,
    UnsupportedTransition,
    NoPeak,
    BracketFailure,
    InvalidGrid,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::InvalidAtomCount: return "InvalidAtomCount";
    case ErrorCode::InconsistentZeeman: return "InconsistentZeeman";
    case ErrorCode::FluctuationTooLarge: return "FluctuationTooLarge";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ZeroRaman: return "ZeroRaman";
    case ErrorCode::InvalidQuantumNumbers: return "InvalidQuantumNumbers";
    case ErrorCode::UnsupportedTransition: return "UnsupportedTransition";
    case ErrorCode::NoPeak: return "NoPeak";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
/// `what()` reads "<Code>: <detail>", e.g. "NonPositiveRate: kappa".
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace miot
