#pragma once

#include "adbl2/relation.hpp"

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace adbl2 {

/// One scoring call: the prompt and the two candidate continuations (attack
/// first). The query texts are only visible to in-process backends; the HTTP
/// wire carries prompt and continuations alone.
struct ScoreRequest {
    std::string prompt;
    std::array<std::string, 2> continuations;
    std::string parent_text;
    std::string child_text;
};

/// Returns one log-likelihood per continuation, aligned by index.
/// Implementations are safe to call concurrently.
class ScoringBackend {
public:
    virtual ~ScoringBackend() = default;
    virtual std::array<double, 2> score(const ScoreRequest& request) const = 0;
};

// ---------------------------------------------------------------------------
// In-process backends

struct StubRule {
    std::string pattern;  // substring of the child text; empty matches anything
    RelationType label;
    double margin;        // score gap between the chosen label and the other one
};

/// Deterministic rule table. First matching rule wins; the last rule must have
/// an empty pattern so every query is answered.
class StubRuleBackend final : public ScoringBackend {
public:
    explicit StubRuleBackend(std::vector<StubRule> rules);

    std::array<double, 2> score(const ScoreRequest& request) const override;
    const std::vector<StubRule>& rules() const noexcept { return rules_; }

private:
    std::vector<StubRule> rules_;
};

/// Parses `[{"pattern": "...", "label": "attack"|"support", "margin": 2.0}, ...]`.
std::vector<StubRule> parse_stub_rules(std::string_view json_text);

/// Answers from known (parent, child) labels: the self-consistency oracle.
/// Unknown pairs raise BackendProtocolError.
class LabelOracleBackend final : public ScoringBackend {
public:
    explicit LabelOracleBackend(double margin = 1000.0) : margin_(margin) {}

    /// Keeps the first label seen for a pair.
    void add(std::string_view parent_text, std::string_view child_text, RelationType label);
    std::size_t size() const noexcept { return labels_.size(); }

    std::array<double, 2> score(const ScoreRequest& request) const override;

private:
    double margin_;
    std::map<std::pair<std::string, std::string>, RelationType> labels_;
};

/// Same scores for every query.
class ConstantBackend final : public ScoringBackend {
public:
    ConstantBackend(double raw_attack, double raw_support) : scores_{raw_attack, raw_support} {}

    std::array<double, 2> score(const ScoreRequest&) const override { return scores_; }

private:
    std::array<double, 2> scores_;
};

// ---------------------------------------------------------------------------
// Remote backends

/// Counting gate bounding outstanding requests.
class InFlightLimiter {
public:
    explicit InFlightLimiter(std::size_t limit) : available_(limit) {}

    void acquire();
    void release();

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t available_;
};

struct HttpEndpoint {
    std::string host;
    int port = 80;
    std::string base_path;  // no trailing slash
};

/// Accepts "http://host[:port][/path]". Throws InvalidArgument otherwise.
HttpEndpoint parse_endpoint(std::string_view url);

/// Client for the scoring wire protocol:
///   POST {base}/score  {"prompt": s, "continuations": [a, b]}  ->  {"logprobs": [x, y]}
class HttpScoreBackend final : public ScoringBackend {
public:
    HttpScoreBackend(std::string_view endpoint, std::chrono::milliseconds timeout, std::size_t max_in_flight);

    std::array<double, 2> score(const ScoreRequest& request) const override;

private:
    HttpEndpoint endpoint_;
    std::chrono::milliseconds timeout_;
    mutable InFlightLimiter limiter_;
};

/// Adapter for OpenAI-compatible /completions servers that echo prompt tokens
/// with logprobs. Each continuation is scored as the sum of the log-likelihoods
/// of the tokens that overlap it.
class OpenAiCompletionBackend final : public ScoringBackend {
public:
    OpenAiCompletionBackend(std::string_view endpoint, std::string model, std::chrono::milliseconds timeout,
                            std::size_t max_in_flight);

    std::array<double, 2> score(const ScoreRequest& request) const override;

private:
    double score_one(const std::string& prompt, const std::string& continuation) const;

    HttpEndpoint endpoint_;
    std::string model_;
    std::chrono::milliseconds timeout_;
    mutable InFlightLimiter limiter_;
};

/// Sums echoed token logprobs that fall at or past `prompt_length` (character
/// offsets). Exposed for testing.
double sum_continuation_logprobs(std::string_view response_body, std::size_t prompt_length);

}  // namespace adbl2
