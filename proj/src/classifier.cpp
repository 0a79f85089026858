#include "adbl2/classifier.hpp"
#include "adbl2/debate_tree.hpp"
#include "adbl2/error.hpp"

#include <algorithm>
#include <cmath>

namespace adbl2 {

void validate(const BackendConfig& config) {
    if (!config.backend) throw Error(ErrorCode::InvalidArgument, "backend '" + config.backend_id + "' is not configured");
    if (config.timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "timeout must be positive");
    if (config.max_in_flight == 0) throw Error(ErrorCode::InvalidArgument, "max_in_flight must be at least 1");
    validate_template(config.prompt_template);
}

LabelScores score_labels(const ScoringBackend& backend, const ScoreRequest& request) {
    auto raw = backend.score(request);
    if (!std::isfinite(raw[0]) || !std::isfinite(raw[1])) {
        throw Error(ErrorCode::BackendProtocolError, "backend returned a non-finite score");
    }
    return {raw[0], raw[1]};
}

LabelProbabilities normalize(const LabelScores& scores) {
    if (!std::isfinite(scores.raw_attack) || !std::isfinite(scores.raw_support)) {
        throw Error(ErrorCode::InvalidArgument, "label scores must be finite");
    }
    auto top = std::max(scores.raw_attack, scores.raw_support);
    auto ea = std::exp(scores.raw_attack - top);
    auto es = std::exp(scores.raw_support - top);
    auto z = ea + es;
    return {ea / z, es / z};
}

RelationClassification classify(const BackendConfig& config, std::string_view parent_text,
                                std::string_view child_text) {
    validate(config);
    ScoreRequest request;
    request.prompt = build_prompt(config.prompt_template, config.technique, parent_text, child_text);
    auto [attack, support] = label_continuations(config.prompt_template);
    request.continuations = {std::move(attack), std::move(support)};
    request.parent_text = trim_text(parent_text);
    request.child_text = trim_text(child_text);

    RelationClassification out;
    out.scores = score_labels(*config.backend, request);
    auto probs = normalize(out.scores);
    out.p_attack = probs.p_attack;
    out.p_support = probs.p_support;
    out.tie = out.scores.raw_attack == out.scores.raw_support;
    out.predicted = out.scores.raw_attack >= out.scores.raw_support ? RelationType::Attack : RelationType::Support;
    out.backend_id = config.backend_id;
    out.prompt_fingerprint = prompt_fingerprint(request.prompt);
    return out;
}

}  // namespace adbl2
