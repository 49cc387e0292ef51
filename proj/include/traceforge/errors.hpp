#pragma once

/// @file errors.hpp
/// @brief Error codes and the exception type thrown by every traceforge module.

#include <stdexcept>
#include <string>
#include <string_view>

namespace traceforge {

enum class ErrorCode {
    SingularModel,
    SingularCurve,
    InvalidInput,
    AmbiguousOrder,
    NotSplit,
    NotEliminated,
    CacheMismatch,
    OutOfRange,
    DegenerateFiber,
    EmptySeries,
    MissingRank,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::SingularModel: return "SingularModel";
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::AmbiguousOrder: return "AmbiguousOrder";
    case ErrorCode::NotSplit: return "NotSplit";
    case ErrorCode::NotEliminated: return "NotEliminated";
    case ErrorCode::CacheMismatch: return "CacheMismatch";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateFiber: return "DegenerateFiber";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::MissingRank: return "MissingRank";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace traceforge
