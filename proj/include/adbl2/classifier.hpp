#pragma once

#include "adbl2/backend.hpp"
#include "adbl2/prompt.hpp"
#include "adbl2/relation.hpp"

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <string_view>

namespace adbl2 {

/// Log-scale scores for the two label continuations.
struct LabelScores {
    double raw_attack = 0.0;
    double raw_support = 0.0;
};

struct LabelProbabilities {
    double p_attack = 0.5;
    double p_support = 0.5;
};

struct RelationClassification {
    double p_attack = 0.5;
    double p_support = 0.5;
    RelationType predicted = RelationType::Attack;
    bool tie = false;  // raw scores equal; predicted falls back to Attack
    LabelScores scores;
    std::string backend_id;
    std::string prompt_fingerprint;

    double probability_of(RelationType r) const noexcept {
        return r == RelationType::Attack ? p_attack : p_support;
    }
};

/// Everything needed to classify one pair: which model, how to talk to it.
struct BackendConfig {
    std::string backend_id;
    std::shared_ptr<const ScoringBackend> backend;
    std::chrono::milliseconds timeout{10000};
    std::size_t max_in_flight = 4;
    PromptTemplate prompt_template = default_template();
    PromptTechnique technique = PromptTechnique::zero_shot();
};

/// Throws InvalidArgument/TemplateError when the config is unusable.
void validate(const BackendConfig& config);

/// Asks the backend for both continuation log-likelihoods. Non-finite scores
/// are a protocol error.
LabelScores score_labels(const ScoringBackend& backend, const ScoreRequest& request);

/// Two-way softmax, shifted by the max score so large magnitudes never overflow.
/// Throws InvalidArgument on non-finite input.
LabelProbabilities normalize(const LabelScores& scores);

/// build_prompt -> score_labels -> normalize. Ties resolve to Attack.
RelationClassification classify(const BackendConfig& config, std::string_view parent_text,
                                std::string_view child_text);

}  // namespace adbl2
