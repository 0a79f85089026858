#include "adbl2/prompt.hpp"
#include "adbl2/debate_tree.hpp"
#include "adbl2/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdint>

namespace adbl2 {

namespace {

constexpr std::string_view kParent = "{parent}";
constexpr std::string_view kChild = "{child}";

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

// Single pass so argument texts that contain "{child}" are never re-expanded.
std::string render_instance(std::string_view format, std::string_view parent, std::string_view child) {
    auto p = format.find(kParent);
    auto c = format.find(kChild);
    std::string out;
    out.reserve(format.size() + parent.size() + child.size());
    if (p < c) {
        out += format.substr(0, p);
        out += parent;
        out += format.substr(p + kParent.size(), c - p - kParent.size());
        out += child;
        out += format.substr(c + kChild.size());
    } else {
        out += format.substr(0, c);
        out += child;
        out += format.substr(c + kChild.size(), p - c - kChild.size());
        out += parent;
        out += format.substr(p + kParent.size());
    }
    return out;
}

RelationType relation_from_json(const nlohmann::json& j) {
    auto r = parse_relation(j.get<std::string>());
    if (!r) throw Error(ErrorCode::InvalidArgument, "label must be \"attack\" or \"support\"");
    return *r;
}

}  // namespace

PromptTechnique PromptTechnique::few_shot(std::vector<FewShotExample> examples) {
    if (examples.empty()) throw Error(ErrorCode::InvalidArgument, "few-shot technique needs at least one example");
    for (const auto& ex : examples) {
        if (trim_text(ex.parent_text).empty() || trim_text(ex.child_text).empty()) {
            throw Error(ErrorCode::InvalidArgument, "few-shot example with empty text");
        }
    }
    PromptTechnique t;
    t.kind_ = Kind::FewShot;
    t.examples_ = std::move(examples);
    return t;
}

void validate_template(const PromptTemplate& tmpl) {
    if (count_occurrences(tmpl.instance_format, kParent) != 1 || count_occurrences(tmpl.instance_format, kChild) != 1) {
        throw Error(ErrorCode::TemplateError,
                    fmt::format("template '{}': instance_format needs exactly one {{parent}} and one {{child}}", tmpl.name));
    }
    if (tmpl.attack_word.empty() || tmpl.support_word.empty() || tmpl.attack_word == tmpl.support_word) {
        throw Error(ErrorCode::TemplateError,
                    fmt::format("template '{}': label words must be distinct and non-empty", tmpl.name));
    }
}

const PromptTemplate& default_template() {
    static const PromptTemplate tmpl{
        "default",
        "You are given two arguments from an online debate. The child argument was posted as a reply to the "
        "parent argument. Decide whether the child argument attacks or supports the parent argument. "
        "Answer with a single word: attack or support.",
        "Parent argument: {parent}\nChild argument: {child}",
        "The relation of the child to the parent is:",
        "attack",
        "support",
    };
    return tmpl;
}

const std::vector<FewShotExample>& default_few_shot_examples() {
    static const std::vector<FewShotExample> examples{
        {"Cities should ban private cars from their centres.",
         "Many residents depend on cars because public transport does not reach their neighbourhoods.",
         RelationType::Attack},
        {"Schools should teach financial literacy.",
         "Young adults who understand budgeting are less likely to fall into debt.", RelationType::Support},
        {"Remote work improves productivity.",
         "Employees working from home report more interruptions from household duties.", RelationType::Attack},
        {"Public libraries deserve more funding.",
         "Libraries provide free internet access to people who cannot afford it at home.", RelationType::Support},
    };
    return examples;
}

std::string build_prompt(const PromptTemplate& tmpl, const PromptTechnique& technique, std::string_view parent_text,
                         std::string_view child_text) {
    validate_template(tmpl);
    auto parent = trim_text(parent_text);
    auto child = trim_text(child_text);
    if (parent.empty() || child.empty()) throw Error(ErrorCode::EmptyText, "argument text is empty");

    std::string prompt;
    if (!tmpl.system_preamble.empty()) {
        prompt += tmpl.system_preamble;
        prompt += "\n\n";
    }
    for (const auto& ex : technique.examples()) {
        prompt += render_instance(tmpl.instance_format, trim_text(ex.parent_text), trim_text(ex.child_text));
        prompt += '\n';
        prompt += tmpl.label_cue;
        prompt += ' ';
        prompt += tmpl.word_for(ex.label);
        prompt += "\n\n";
    }
    prompt += render_instance(tmpl.instance_format, parent, child);
    prompt += '\n';
    prompt += tmpl.label_cue;
    return prompt;
}

std::pair<std::string, std::string> label_continuations(const PromptTemplate& tmpl) {
    return {" " + tmpl.attack_word, " " + tmpl.support_word};
}

std::string prompt_fingerprint(std::string_view prompt) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : prompt) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("fnv1a64:{:016x}", h);
}

PromptTemplate parse_template_json(std::string_view json_text) {
    try {
        auto j = nlohmann::json::parse(json_text);
        PromptTemplate t;
        t.name = j.value("name", std::string("custom"));
        t.system_preamble = j.value("system_preamble", std::string());
        t.instance_format = j.at("instance_format").get<std::string>();
        t.label_cue = j.at("label_cue").get<std::string>();
        const auto& words = j.at("label_words");
        t.attack_word = words.at("attack").get<std::string>();
        t.support_word = words.at("support").get<std::string>();
        validate_template(t);
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::TemplateError, std::string("invalid template JSON: ") + e.what());
    }
}

std::vector<FewShotExample> parse_few_shot_json(std::string_view json_text) {
    try {
        auto j = nlohmann::json::parse(json_text);
        const auto& arr = j.is_object() ? j.at("examples") : j;
        std::vector<FewShotExample> out;
        for (const auto& e : arr) {
            out.push_back({e.at("parent").get<std::string>(), e.at("child").get<std::string>(),
                           relation_from_json(e.at("label"))});
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("invalid few-shot JSON: ") + e.what());
    }
}

}  // namespace adbl2
