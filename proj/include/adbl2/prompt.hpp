#pragma once

#include "adbl2/relation.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adbl2 {

struct FewShotExample {
    std::string parent_text;
    std::string child_text;
    RelationType label;
};

/// Zero-shot, or few-shot with a non-empty list of labelled priming pairs.
class PromptTechnique {
public:
    enum class Kind { ZeroShot, FewShot };

    static PromptTechnique zero_shot() { return PromptTechnique{}; }
    /// Throws InvalidArgument on an empty list or an example with blank text.
    static PromptTechnique few_shot(std::vector<FewShotExample> examples);

    Kind kind() const noexcept { return kind_; }
    const std::vector<FewShotExample>& examples() const noexcept { return examples_; }

private:
    PromptTechnique() = default;

    Kind kind_ = Kind::ZeroShot;
    std::vector<FewShotExample> examples_;
};

/// Model-specific prompt wording. `instance_format` must contain {parent} and
/// {child} exactly once each.
struct PromptTemplate {
    std::string name;
    std::string system_preamble;
    std::string instance_format;
    std::string label_cue;
    std::string attack_word;
    std::string support_word;

    const std::string& word_for(RelationType r) const noexcept {
        return r == RelationType::Attack ? attack_word : support_word;
    }
};

/// Throws TemplateError when a placeholder is missing or repeated, or the label
/// words are empty or equal.
void validate_template(const PromptTemplate& tmpl);

/// Built-in instruction template with "attack"/"support" label words.
const PromptTemplate& default_template();

/// Four neutral priming pairs ordered attack, support, attack, support.
const std::vector<FewShotExample>& default_few_shot_examples();

/// Assembles preamble, rendered priming examples (each followed by cue and label
/// word), and the unlabelled query ending in the cue. Byte-identical output for
/// identical inputs. Throws EmptyText or TemplateError.
std::string build_prompt(const PromptTemplate& tmpl, const PromptTechnique& technique,
                         std::string_view parent_text, std::string_view child_text);

/// The two scored continuations, attack first: the label words with a leading space.
std::pair<std::string, std::string> label_continuations(const PromptTemplate& tmpl);

/// "fnv1a64:" followed by 16 lowercase hex digits.
std::string prompt_fingerprint(std::string_view prompt);

/// Loaders for the JSON configuration files (see config/).
PromptTemplate parse_template_json(std::string_view json_text);
std::vector<FewShotExample> parse_few_shot_json(std::string_view json_text);

}  // namespace adbl2
