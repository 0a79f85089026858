#include "adbl2/kialo.hpp"
#include "adbl2/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace adbl2::kialo {

namespace {

constexpr std::string_view kTitlePrefix = "Discussion Title:";
constexpr std::string_view kDuplicateMarker = "-> See";

std::string number_to_string(const std::vector<unsigned>& number) {
    std::string out;
    for (auto n : number) {
        out += std::to_string(n);
        out += '.';
    }
    return out;
}

/// Recognizes a leading "N.N.N." outline number followed by whitespace or end of line.
std::optional<std::vector<unsigned>> read_number(std::string_view line, std::size_t& consumed) {
    std::vector<unsigned> number;
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        std::size_t start = i;
        unsigned long value = 0;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
            if (i - start >= 9) return std::nullopt;
            value = value * 10 + static_cast<unsigned>(line[i] - '0');
            ++i;
        }
        if (i >= line.size() || line[i] != '.' || value == 0) return std::nullopt;
        ++i;
        number.push_back(static_cast<unsigned>(value));
    }
    if (number.empty()) return std::nullopt;
    if (i < line.size() && line[i] != ' ' && line[i] != '\t') return std::nullopt;
    consumed = i;
    return number;
}

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.substr(0, prefix.size()) == prefix;
}

std::string single_line(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_break = false;
    for (char c : text) {
        if (c == '\n' || c == '\r') {
            pending_break = true;
            continue;
        }
        if (pending_break) {
            while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
            out += ' ';
            pending_break = false;
            if (c == ' ' || c == '\t') continue;
        }
        out += c;
    }
    return out;
}

}  // namespace

std::string_view to_string(DiagnosticKind kind) noexcept {
    switch (kind) {
        case DiagnosticKind::MissingThesis: return "MissingThesis";
        case DiagnosticKind::MultipleTheses: return "MultipleTheses";
        case DiagnosticKind::DanglingNumber: return "DanglingNumber";
        case DiagnosticKind::DuplicateNumber: return "DuplicateNumber";
        case DiagnosticKind::UnknownStance: return "UnknownStance";
        case DiagnosticKind::EmptyClaim: return "EmptyClaim";
        case DiagnosticKind::OrphanText: return "OrphanText";
        case DiagnosticKind::DuplicateReference: return "DuplicateReference";
    }
    return "Unknown";
}

bool ParseResult::has_errors() const noexcept {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
}

KialoDocument parse_document(std::string_view text, std::vector<ParseDiagnostic>& diagnostics) {
    KialoDocument doc;
    if (starts_with(text, "\xEF\xBB\xBF")) text.remove_prefix(3);

    // Continuations of a skipped duplicate-reference line are dropped with it.
    enum class Last { None, Claim, Skipped } last = Last::None;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto line = trim_text(raw);
        if (line.empty()) continue;

        if (last == Last::None && !doc.title && doc.lines.empty() && starts_with(line, kTitlePrefix)) {
            doc.title = trim_text(std::string_view(line).substr(kTitlePrefix.size()));
            continue;
        }

        std::size_t consumed = 0;
        auto number = read_number(line, consumed);
        if (!number) {
            if (last == Last::Claim) {
                auto& prev = doc.lines.back().text;
                if (!prev.empty()) prev += ' ';
                prev += line;
            } else if (last == Last::None) {
                diagnostics.push_back({line_no, Severity::Error, DiagnosticKind::OrphanText,
                                       "text outside of any numbered claim"});
            }
            continue;
        }

        OutlineLine out;
        out.number = std::move(*number);
        out.line_number = line_no;
        auto rest = trim_text(std::string_view(line).substr(consumed));

        bool is_thesis = out.number.size() == 1;
        if (is_thesis) {
            out.stance = Stance::Thesis;
        } else if (starts_with(rest, "Pro:")) {
            out.stance = Stance::Pro;
            rest = trim_text(std::string_view(rest).substr(4));
        } else if (starts_with(rest, "Con:")) {
            out.stance = Stance::Con;
            rest = trim_text(std::string_view(rest).substr(4));
        } else {
            diagnostics.push_back({line_no, Severity::Error, DiagnosticKind::UnknownStance,
                                   "claim " + number_to_string(out.number) + " lacks a Pro:/Con: prefix"});
            last = Last::Skipped;
            continue;
        }

        if (starts_with(rest, kDuplicateMarker)) {
            diagnostics.push_back({line_no, Severity::Warning, DiagnosticKind::DuplicateReference,
                                   "duplicate reference " + number_to_string(out.number) + " skipped"});
            doc.skipped.push_back(std::move(out.number));
            last = Last::Skipped;
            continue;
        }

        out.text = std::move(rest);
        doc.lines.push_back(std::move(out));
        last = Last::Claim;
    }
    return doc;
}

ParseResult parse_kialo(std::string_view text) {
    ParseResult result;
    auto doc = parse_document(text, result.diagnostics);
    result.title = doc.title;

    // Pass 1: structural checks on the numbering.
    std::set<std::vector<unsigned>> seen;
    std::set<std::vector<unsigned>> skipped;
    for (const auto& number : doc.skipped) {
        seen.insert(number);
        skipped.insert(number);
    }
    std::vector<const OutlineLine*> accepted;
    bool have_thesis = false;
    for (const auto& line : doc.lines) {
        auto label = number_to_string(line.number);
        if (seen.contains(line.number)) {
            result.diagnostics.push_back({line.line_number, Severity::Error, DiagnosticKind::DuplicateNumber,
                                          "claim number " + label + " appears more than once"});
            continue;
        }
        seen.insert(line.number);
        if (line.number.size() == 1) {
            if (line.number[0] != 1 || have_thesis) {
                result.diagnostics.push_back({line.line_number, Severity::Error, DiagnosticKind::MultipleTheses,
                                              "only a single thesis numbered 1. is allowed, got " + label});
                continue;
            }
            have_thesis = true;
        } else {
            std::vector<unsigned> parent(line.number.begin(), line.number.end() - 1);
            if (!seen.contains(parent)) {
                result.diagnostics.push_back({line.line_number, Severity::Error, DiagnosticKind::DanglingNumber,
                                              "claim " + label + " has no parent " + number_to_string(parent)});
                continue;
            }
            if (skipped.contains(parent)) {
                skipped.insert(line.number);
                result.diagnostics.push_back({line.line_number, Severity::Warning, DiagnosticKind::DuplicateReference,
                                              "claim " + label + " sits under a skipped line"});
                continue;
            }
        }
        if (line.text.empty()) {
            result.diagnostics.push_back({line.line_number, Severity::Error, DiagnosticKind::EmptyClaim,
                                          "claim " + label + " has no text"});
            continue;
        }
        accepted.push_back(&line);
    }
    if (!have_thesis) {
        result.diagnostics.push_back({0, Severity::Error, DiagnosticKind::MissingThesis, "no thesis line numbered 1."});
    }
    if (result.has_errors()) return result;

    // Pass 2: build the tree. Every parent is known to precede its children.
    std::map<std::vector<unsigned>, ArgumentId> ids;
    std::optional<DebateTree> tree;
    for (const auto* line : accepted) {
        ArgumentId id;
        if (line->number.size() == 1) {
            tree.emplace(line->text);
            id = tree->root();
        } else {
            std::vector<unsigned> parent(line->number.begin(), line->number.end() - 1);
            auto rel = line->stance == Stance::Pro ? RelationType::Support : RelationType::Attack;
            id = tree->add_argument(ids.at(parent), line->text, rel);
        }
        auto& meta = tree->argument_mut(id).meta;
        meta["line"] = std::to_string(line->line_number);
        meta["outline"] = number_to_string(line->number);
        ids.emplace(line->number, id);
    }
    result.tree = std::move(tree);
    return result;
}

std::string serialize_kialo(const DebateTree& tree, const std::optional<std::string>& title) {
    std::string out;
    if (title) {
        out += std::string(kTitlePrefix) + " " + single_line(*title) + "\n\n";
    }

    struct Frame {
        ArgumentId id;
        std::string number;
    };
    std::vector<Frame> stack{{tree.root(), "1."}};
    bool first = true;
    while (!stack.empty()) {
        auto frame = std::move(stack.back());
        stack.pop_back();
        if (!first) out += '\n';
        first = false;

        out += frame.number;
        out += ' ';
        if (auto edge = tree.edge_of(frame.id)) {
            out += edge->relation == RelationType::Support ? "Pro: " : "Con: ";
        }
        out += single_line(tree.argument(frame.id).text);

        auto kids = tree.children(frame.id);
        for (std::size_t i = kids.size(); i-- > 0;) {
            stack.push_back({kids[i], frame.number + std::to_string(i + 1) + "."});
        }
    }
    return out;
}

const DomainMap& default_domain_map() {
    static const DomainMap map = {
        {"law-politics-sports", "law, politics, sports"},
        {"climate-change", "climate change"},
        {"entertainment", "entertainment"},
        {"technology", "technology"},
        {"economics", "economics"},
        {"politics", "politics"},
        {"privacy", "privacy"},
        {"health", "health"},
        {"sports", "sports"},
        {"lgbtq", "lgbtq"},
        {"life", "life"},
        {"law", "law"},
        {"art", "art"},
    };
    return map;
}

DomainMap load_domain_map(std::string_view json_text) {
    auto j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::InvalidArgument, "domain map must be a JSON object of key -> tag");
    }
    DomainMap map;
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) throw Error(ErrorCode::InvalidArgument, "domain tag for '" + key + "' is not a string");
        map.emplace_back(key, value.get<std::string>());
    }
    // Longest key first so "law-politics-sports" beats "law".
    std::stable_sort(map.begin(), map.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    return map;
}

std::optional<std::string> detect_domain(std::string_view filename_or_header, const DomainMap& map,
                                         const std::optional<std::string>& override_tag) {
    auto lower = [](std::string s) {
        for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        return s;
    };
    if (override_tag) {
        auto tag = trim_text(lower(*override_tag));
        if (!tag.empty()) return tag;
    }

    std::string_view name = filename_or_header;
    if (starts_with(name, kTitlePrefix)) name.remove_prefix(kTitlePrefix.size());
    if (auto slash = name.find_last_of("/\\"); slash != std::string_view::npos) name.remove_prefix(slash + 1);

    // Normalize to hyphen-separated lowercase words: "Climate Change" and
    // "climate_change-x.txt" both start with "climate-change".
    std::string key;
    for (char c : lower(trim_text(name))) {
        bool word = std::isalnum(static_cast<unsigned char>(c)) != 0 || (static_cast<unsigned char>(c) & 0x80);
        if (word) {
            key += c;
        } else if (c == '.') {
            key += '.';
        } else if (!key.empty() && key.back() != '-') {
            key += '-';
        }
    }

    for (const auto& [prefix, tag] : map) {
        if (!starts_with(key, prefix)) continue;
        if (key.size() == prefix.size()) return tag;
        char next = key[prefix.size()];
        if (next == '-' || next == '.') return tag;
    }
    return std::nullopt;
}

}  // namespace adbl2::kialo
