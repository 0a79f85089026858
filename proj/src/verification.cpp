#include "adbl2/verification.hpp"
#include "adbl2/error.hpp"
#include "adbl2/parallel.hpp"

#include <fmt/format.h>

namespace adbl2 {

namespace {

void check_threshold(double value, std::string_view name) {
    if (!(value >= 0.5 && value < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("{} must lie in [0.5, 1), got {}", name, value));
    }
}

/// Resolves an edge against the tree; the stored label is whatever the tree holds now.
RelationEdge current_edge(const DebateTree& tree, const RelationEdge& edge) {
    auto stored = tree.contains(edge.child) ? tree.edge_of(edge.child) : std::nullopt;
    if (!stored || stored->parent != edge.parent) {
        throw Error(ErrorCode::UnknownArgument,
                    fmt::format("edge {} -> {} does not exist in the tree", edge.child.value, edge.parent.value));
    }
    return *stored;
}

std::string suggestion_for(RelationType intended, AssistVerdict verdict) {
    if (verdict == AssistVerdict::Achieves) {
        return intended == RelationType::Support ? "The draft reads as support for the parent."
                                                 : "The draft reads as an attack on the parent.";
    }
    if (intended == RelationType::Support) {
        return "The draft does not clearly support the parent yet. State how it strengthens the parent's claim, "
               "for instance by giving a reason or evidence for it.";
    }
    return "The draft does not clearly attack the parent yet. State what it disputes in the parent's claim, "
           "for instance with a counter-example or an overlooked consequence.";
}

}  // namespace

std::string_view to_string(VerificationStatus s) noexcept {
    switch (s) {
        case VerificationStatus::Confirmed: return "confirmed";
        case VerificationStatus::Mismatch: return "mismatch";
        case VerificationStatus::LowConfidence: return "low_confidence";
    }
    return "unknown";
}

std::string_view to_string(AssistVerdict v) noexcept {
    return v == AssistVerdict::Achieves ? "achieves" : "misses";
}

VerificationStatus verification_status(RelationType stored, RelationType predicted, double probability_of_stored,
                                       double confidence_floor) {
    if (predicted != stored) return VerificationStatus::Mismatch;
    return probability_of_stored >= confidence_floor ? VerificationStatus::Confirmed : VerificationStatus::LowConfidence;
}

VerificationResult verify_edge(const DebateTree& tree, const RelationEdge& edge, const BackendConfig& config,
                               double confidence_floor) {
    check_threshold(confidence_floor, "confidence_floor");
    auto stored = current_edge(tree, edge);

    VerificationResult r;
    r.classification = classify(config, tree.argument(stored.parent).text, tree.argument(stored.child).text);
    r.edge = stored;
    r.stored = stored.relation;
    r.predicted = r.classification.predicted;
    r.probability_of_stored = r.classification.probability_of(stored.relation);
    r.status = verification_status(r.stored, r.predicted, r.probability_of_stored, confidence_floor);
    return r;
}

std::vector<WorklistEntry> verify_worklist(const DebateTree& tree, std::span<const RelationEdge> edges,
                                           const BackendConfig& config, double confidence_floor) {
    check_threshold(confidence_floor, "confidence_floor");
    validate(config);
    for (const auto& e : edges) current_edge(tree, e);

    std::vector<WorklistEntry> out(edges.size());
    parallel_for_index(edges.size(), config.max_in_flight, [&](std::size_t i) {
        out[i].edge = edges[i];
        try {
            out[i].result = verify_edge(tree, edges[i], config, confidence_floor);
        } catch (const Error& e) {
            out[i].error_code = e.code();
            out[i].error = e.what();
        } catch (const std::exception& e) {
            out[i].error_code = ErrorCode::BackendProtocolError;
            out[i].error = e.what();
        }
    });
    return out;
}

TreeVerification verify_tree(const DebateTree& tree, const BackendConfig& config, double confidence_floor) {
    auto edges = tree.edges();
    TreeVerification summary;
    summary.results = verify_worklist(tree, edges, config, confidence_floor);
    summary.total = summary.results.size();
    for (const auto& entry : summary.results) {
        if (!entry.result) {
            ++summary.failed;
            continue;
        }
        switch (entry.result->status) {
            case VerificationStatus::Confirmed: ++summary.confirmed; break;
            case VerificationStatus::Mismatch: ++summary.mismatched; break;
            case VerificationStatus::LowConfidence: ++summary.low_confidence; break;
        }
    }
    return summary;
}

AssistFeedback assist_new_argument(const DebateTree& tree, const ArgumentId& parent_id, std::string_view draft_text,
                                   RelationType intended, const BackendConfig& config, double assist_threshold) {
    check_threshold(assist_threshold, "assist_threshold");
    if (!tree.contains(parent_id)) throw Error(ErrorCode::UnknownParent, "unknown parent '" + parent_id.value + "'");
    auto draft = trim_text(draft_text);
    if (draft.empty()) throw Error(ErrorCode::EmptyText, "draft text is empty");

    AssistFeedback fb;
    fb.classification = classify(config, tree.argument(parent_id).text, draft);
    fb.draft_text = std::move(draft);
    fb.intended = intended;
    fb.p_intended = fb.classification.probability_of(intended);
    fb.verdict = fb.p_intended >= assist_threshold ? AssistVerdict::Achieves : AssistVerdict::Misses;
    fb.suggestion = suggestion_for(intended, fb.verdict);
    return fb;
}

}  // namespace adbl2
