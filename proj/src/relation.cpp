#include "adbl2/relation.hpp"
#include "adbl2/error.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace adbl2 {

std::optional<RelationType> parse_relation(std::string_view text) noexcept {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "attack") return RelationType::Attack;
    if (lower == "support") return RelationType::Support;
    return std::nullopt;
}

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::UnknownParent: return "UnknownParent";
        case ErrorCode::UnknownArgument: return "UnknownArgument";
        case ErrorCode::CannotRemoveRoot: return "CannotRemoveRoot";
        case ErrorCode::NoParentEdge: return "NoParentEdge";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::TemplateError: return "TemplateError";
        case ErrorCode::BackendUnavailable: return "BackendUnavailable";
        case ErrorCode::BackendProtocolError: return "BackendProtocolError";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::EmptyStratum: return "EmptyStratum";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::StaleRevision: return "StaleRevision";
    }
    return "Unknown";
}

}  // namespace adbl2
