#pragma once

#include <stdexcept>
#include <string>

namespace bm {

/// Failure categories surfaced by the solvers. The numeric values are part of
/// the C API (`bm_status`) and the CLI exit-code mapping.
enum class ErrorCode : int {
    kInvalidArgument = 1,
    kConfig = 2,
    kNoConvergence = 3,
    kAuditFailed = 4,
    kRegularityViolated = 5,
    kDegenerate = 6,
    kIo = 7,
    kInternal = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidArgument: return "InvalidArgument";
        case ErrorCode::kConfig: return "ConfigError";
        case ErrorCode::kNoConvergence: return "NoConvergence";
        case ErrorCode::kAuditFailed: return "AuditFailed";
        case ErrorCode::kRegularityViolated: return "RegularityViolated";
        case ErrorCode::kDegenerate: return "Degenerate";
        case ErrorCode::kIo: return "IoError";
        case ErrorCode::kInternal: return "InternalError";
    }
    return "Unknown";
}

}  // namespace bm
