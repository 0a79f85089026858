#pragma once

#include "adbl2/classifier.hpp"
#include "adbl2/debate_tree.hpp"
#include "adbl2/error.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adbl2 {

inline constexpr double kDefaultConfidenceFloor = 0.6;
inline constexpr double kDefaultAssistThreshold = 0.6;

enum class VerificationStatus { Confirmed, Mismatch, LowConfidence };

std::string_view to_string(VerificationStatus s) noexcept;

struct VerificationResult {
    RelationEdge edge;
    RelationType stored;
    RelationType predicted;
    double probability_of_stored = 0.0;
    VerificationStatus status = VerificationStatus::Confirmed;
    RelationClassification classification;
};

/// Slot for one worklist edge: a result, or the error that prevented it.
struct WorklistEntry {
    RelationEdge edge;
    std::optional<VerificationResult> result;
    std::optional<ErrorCode> error_code;
    std::string error;

    bool ok() const noexcept { return result.has_value(); }
};

struct TreeVerification {
    std::size_t total = 0;
    std::size_t confirmed = 0;
    std::size_t mismatched = 0;
    std::size_t low_confidence = 0;
    std::size_t failed = 0;  // edges the backend could not classify
    std::vector<WorklistEntry> results;
};

enum class AssistVerdict { Achieves, Misses };

std::string_view to_string(AssistVerdict v) noexcept;

struct AssistFeedback {
    std::string draft_text;
    RelationType intended;
    double p_intended = 0.0;
    AssistVerdict verdict = AssistVerdict::Misses;
    std::string suggestion;
    RelationClassification classification;
};

/// Status rule: Mismatch if predicted != stored, else Confirmed when the stored
/// label's probability reaches the floor, else LowConfidence.
VerificationStatus verification_status(RelationType stored, RelationType predicted, double probability_of_stored,
                                       double confidence_floor);

/// Re-classifies (child text, parent text) for an edge of the tree.
VerificationResult verify_edge(const DebateTree& tree, const RelationEdge& edge, const BackendConfig& config,
                               double confidence_floor = kDefaultConfidenceFloor);

/// One entry per edge in input order. Backend failures are recorded inline and
/// do not stop the remaining edges. Edges run concurrently up to max_in_flight.
std::vector<WorklistEntry> verify_worklist(const DebateTree& tree, std::span<const RelationEdge> edges,
                                           const BackendConfig& config,
                                           double confidence_floor = kDefaultConfidenceFloor);

TreeVerification verify_tree(const DebateTree& tree, const BackendConfig& config,
                             double confidence_floor = kDefaultConfidenceFloor);

/// Classifies a draft against its intended parent without touching the tree.
AssistFeedback assist_new_argument(const DebateTree& tree, const ArgumentId& parent_id, std::string_view draft_text,
                                   RelationType intended, const BackendConfig& config,
                                   double assist_threshold = kDefaultAssistThreshold);

}  // namespace adbl2
