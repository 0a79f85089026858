#include "adbl2/backend.hpp"
#include "adbl2/debate_tree.hpp"
#include "adbl2/error.hpp"

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>

namespace adbl2 {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::array<double, 2> scores_for(RelationType label, double margin) {
    return label == RelationType::Attack ? std::array<double, 2>{0.0, -margin} : std::array<double, 2>{-margin, 0.0};
}

class LimiterGuard {
public:
    explicit LimiterGuard(InFlightLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
    ~LimiterGuard() { limiter_.release(); }
    LimiterGuard(const LimiterGuard&) = delete;
    LimiterGuard& operator=(const LimiterGuard&) = delete;

private:
    InFlightLimiter& limiter_;
};

std::size_t codepoint_count(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

/// Posts JSON and returns the parsed response body, mapping transport
/// failures onto backend error codes.
json post_json(const HttpEndpoint& ep, const std::string& path, const json& body, std::chrono::milliseconds timeout) {
    httplib::Client client(ep.host, ep.port);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto started = Clock::now();
    auto res = client.Post(ep.base_path + path, body.dump(), "application/json");
    if (!res) {
        auto err = res.error();
        auto elapsed = Clock::now() - started;
        auto where = fmt::format("{}:{}{}{}", ep.host, ep.port, ep.base_path, path);
        if (err == httplib::Error::Read && elapsed >= timeout * 9 / 10) {
            throw Error(ErrorCode::Timeout, fmt::format("backend {} did not answer within {} ms", where, timeout.count()));
        }
        throw Error(ErrorCode::BackendUnavailable,
                    fmt::format("backend {} unavailable: {}", where, httplib::to_string(err)));
    }
    if (res->status < 200 || res->status >= 300) {
        throw Error(ErrorCode::BackendProtocolError, fmt::format("backend returned HTTP {}", res->status));
    }
    auto parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw Error(ErrorCode::BackendProtocolError, "backend returned malformed JSON");
    return parsed;
}

}  // namespace

StubRuleBackend::StubRuleBackend(std::vector<StubRule> rules) : rules_(std::move(rules)) {
    if (rules_.empty() || !rules_.back().pattern.empty()) {
        throw Error(ErrorCode::InvalidArgument, "stub rule table must end with a default rule (empty pattern)");
    }
    for (const auto& r : rules_) {
        if (!std::isfinite(r.margin) || r.margin < 0) {
            throw Error(ErrorCode::InvalidArgument, "stub rule margin must be finite and non-negative");
        }
    }
}

std::array<double, 2> StubRuleBackend::score(const ScoreRequest& request) const {
    for (const auto& rule : rules_) {
        if (request.child_text.find(rule.pattern) != std::string::npos) return scores_for(rule.label, rule.margin);
    }
    return {0.0, 0.0};  // unreachable: the default rule matches everything
}

std::vector<StubRule> parse_stub_rules(std::string_view json_text) {
    try {
        auto j = json::parse(json_text);
        const auto& arr = j.is_object() ? j.at("rules") : j;
        std::vector<StubRule> rules;
        for (const auto& e : arr) {
            auto label = parse_relation(e.at("label").get<std::string>());
            if (!label) throw Error(ErrorCode::InvalidArgument, "stub rule label must be attack or support");
            rules.push_back({e.value("pattern", std::string()), *label, e.value("margin", 1.0)});
        }
        return rules;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("invalid stub rule JSON: ") + e.what());
    }
}

void LabelOracleBackend::add(std::string_view parent_text, std::string_view child_text, RelationType label) {
    labels_.try_emplace({trim_text(parent_text), trim_text(child_text)}, label);
}

std::array<double, 2> LabelOracleBackend::score(const ScoreRequest& request) const {
    auto it = labels_.find({trim_text(request.parent_text), trim_text(request.child_text)});
    if (it == labels_.end()) {
        throw Error(ErrorCode::BackendProtocolError, "label oracle has no entry for this argument pair");
    }
    return scores_for(it->second, margin_);
}

void InFlightLimiter::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
}

void InFlightLimiter::release() {
    {
        std::lock_guard lock(mutex_);
        ++available_;
    }
    cv_.notify_one();
}

HttpEndpoint parse_endpoint(std::string_view url) {
    constexpr std::string_view scheme = "http://";
    if (url.substr(0, scheme.size()) != scheme) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("unsupported endpoint '{}': expected http://host[:port]", url));
    }
    url.remove_prefix(scheme.size());
    HttpEndpoint ep;
    auto slash = url.find('/');
    auto authority = url.substr(0, slash);
    if (slash != std::string_view::npos) ep.base_path = std::string(url.substr(slash));
    while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();

    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        ep.host = std::string(authority.substr(0, colon));
        try {
            ep.port = std::stoi(std::string(authority.substr(colon + 1)));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("bad port in endpoint '{}'", url));
        }
    } else {
        ep.host = std::string(authority);
    }
    if (ep.host.empty() || ep.port <= 0 || ep.port > 65535) {
        throw Error(ErrorCode::InvalidArgument, fmt::format("bad endpoint '{}'", url));
    }
    return ep;
}

HttpScoreBackend::HttpScoreBackend(std::string_view endpoint, std::chrono::milliseconds timeout,
                                   std::size_t max_in_flight)
    : endpoint_(parse_endpoint(endpoint)), timeout_(timeout), limiter_(max_in_flight) {
    if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "backend timeout must be positive");
    if (max_in_flight == 0) throw Error(ErrorCode::InvalidArgument, "max_in_flight must be at least 1");
}

std::array<double, 2> HttpScoreBackend::score(const ScoreRequest& request) const {
    json body = {{"prompt", request.prompt}, {"continuations", request.continuations}};
    LimiterGuard guard(limiter_);
    auto reply = post_json(endpoint_, "/score", body, timeout_);

    auto it = reply.find("logprobs");
    if (it == reply.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
        throw Error(ErrorCode::BackendProtocolError, "backend reply lacks a two-element numeric \"logprobs\" array");
    }
    return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

OpenAiCompletionBackend::OpenAiCompletionBackend(std::string_view endpoint, std::string model,
                                                 std::chrono::milliseconds timeout, std::size_t max_in_flight)
    : endpoint_(parse_endpoint(endpoint)), model_(std::move(model)), timeout_(timeout), limiter_(max_in_flight) {
    if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "backend timeout must be positive");
    if (max_in_flight == 0) throw Error(ErrorCode::InvalidArgument, "max_in_flight must be at least 1");
}

double OpenAiCompletionBackend::score_one(const std::string& prompt, const std::string& continuation) const {
    json body = {{"model", model_},   {"prompt", prompt + continuation}, {"max_tokens", 0},
                 {"echo", true},      {"logprobs", 0},                   {"temperature", 0}};
    LimiterGuard guard(limiter_);
    auto reply = post_json(endpoint_, "/completions", body, timeout_);
    return sum_continuation_logprobs(reply.dump(), codepoint_count(prompt));
}

std::array<double, 2> OpenAiCompletionBackend::score(const ScoreRequest& request) const {
    return {score_one(request.prompt, request.continuations[0]), score_one(request.prompt, request.continuations[1])};
}

double sum_continuation_logprobs(std::string_view response_body, std::size_t prompt_length) {
    auto reply = json::parse(response_body, nullptr, false);
    try {
        const auto& lp = reply.at("choices").at(0).at("logprobs");
        const auto& tokens = lp.at("tokens");
        const auto& values = lp.at("token_logprobs");
        const auto& offsets = lp.at("text_offset");
        if (tokens.size() != values.size() || tokens.size() != offsets.size()) {
            throw Error(ErrorCode::BackendProtocolError, "logprobs arrays have different lengths");
        }
        double total = 0.0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            auto start = offsets[i].get<std::size_t>();
            auto end = start + codepoint_count(tokens[i].get<std::string>());
            if (end <= prompt_length) continue;
            if (!values[i].is_number()) throw Error(ErrorCode::BackendProtocolError, "continuation token lacks a logprob");
            total += values[i].get<double>();
            ++used;
        }
        if (used == 0) throw Error(ErrorCode::BackendProtocolError, "no continuation tokens in echoed logprobs");
        return total;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::BackendProtocolError, std::string("unexpected completion reply: ") + e.what());
    }
}

}  // namespace adbl2
