#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adbl2 {

enum class ErrorCode {
    EmptyText,
    UnknownParent,
    UnknownArgument,
    CannotRemoveRoot,
    NoParentEdge,
    DuplicateId,
    ParseError,
    TemplateError,
    BackendUnavailable,
    BackendProtocolError,
    Timeout,
    LengthMismatch,
    EmptyStratum,
    InvalidArgument,
    IoError,
    NotFound,
    StaleRevision,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library. The code is the machine-readable part;
/// the service maps it to an HTTP status and the CLI to an exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline bool is_backend_error(ErrorCode code) noexcept {
    return code == ErrorCode::BackendUnavailable || code == ErrorCode::BackendProtocolError ||
           code == ErrorCode::Timeout;
}

}  // namespace adbl2
