#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace filcol {

enum class ErrorCode {
    SeparationZero,
    InversionFailure,
    OnSingularLine,
    Divergent,
    OffLevelSet,
    DomainError,
    RegimeError,
    StepLimitExceeded,
    InvalidInitialState,
    EmptyTrajectory,
    ConfigInvalid,
    NumericalFailure,
};

constexpr std::string_view to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::SeparationZero: return "SeparationZero";
    case ErrorCode::InversionFailure: return "InversionFailure";
    case ErrorCode::OnSingularLine: return "OnSingularLine";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::OffLevelSet: return "OffLevelSet";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RegimeError: return "RegimeError";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::InvalidInitialState: return "InvalidInitialState";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace filcol
