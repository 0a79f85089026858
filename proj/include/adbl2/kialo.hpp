#pragma once

#include "adbl2/debate_tree.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adbl2::kialo {

enum class Stance { Thesis, Pro, Con };

enum class Severity { Error, Warning };

enum class DiagnosticKind {
    MissingThesis,
    MultipleTheses,
    DanglingNumber,
    DuplicateNumber,
    UnknownStance,
    EmptyClaim,
    OrphanText,
    DuplicateReference,
};

std::string_view to_string(DiagnosticKind kind) noexcept;

struct ParseDiagnostic {
    std::size_t line_number = 0;  // 1-based
    Severity severity = Severity::Error;
    DiagnosticKind kind = DiagnosticKind::MissingThesis;
    std::string message;
};

/// One claim of an outline export. `number` holds the dotted path, e.g. {1, 2, 3} for "1.2.3.".
struct OutlineLine {
    std::vector<unsigned> number;
    Stance stance = Stance::Thesis;
    std::string text;
    std::size_t line_number = 0;
};

/// Line-level view of an export before tree construction.
struct KialoDocument {
    std::optional<std::string> title;
    std::vector<OutlineLine> lines;
    /// Numbers of duplicate-reference lines that were dropped.
    std::vector<std::vector<unsigned>> skipped;
};

struct ParseResult {
    std::optional<DebateTree> tree;
    std::optional<std::string> title;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const noexcept { return tree.has_value(); }
    bool has_errors() const noexcept;
};

/// Tokenizes the export into outline lines. Line-level problems (unknown stance,
/// orphan text, duplicate references) are reported here.
KialoDocument parse_document(std::string_view text, std::vector<ParseDiagnostic>& diagnostics);

/// Full import: Pro lines become Support edges, Con lines Attack edges, "1." is the root.
/// Any Error diagnostic leaves `tree` empty. Never throws on malformed input.
ParseResult parse_kialo(std::string_view text);

/// Canonical export: optional title header plus blank line, then one line per
/// argument in pre-order with freshly computed dense numbering. Line breaks
/// inside texts are written as single spaces. No trailing newline.
std::string serialize_kialo(const DebateTree& tree, const std::optional<std::string>& title = std::nullopt);

/// Ordered (filename key, domain tag) pairs; keys are lowercase, hyphen separated.
using DomainMap = std::vector<std::pair<std::string, std::string>>;

const DomainMap& default_domain_map();

/// Reads a JSON object {"key": "tag", ...}.
DomainMap load_domain_map(std::string_view json_text);

/// Maps a filename or a title header to a lowercase domain tag. An explicit
/// override always wins.
std::optional<std::string> detect_domain(std::string_view filename_or_header,
                                         const DomainMap& map = default_domain_map(),
                                         const std::optional<std::string>& override_tag = std::nullopt);

}  // namespace adbl2::kialo
