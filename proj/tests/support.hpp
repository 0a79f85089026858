#pragma once

// Test-only helpers: random tree generation, independent oracles and a mock
// scoring server speaking the backend wire protocol.

#include "adbl2/debate_tree.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

namespace adbl2::test {

inline std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> words = {
        "athletes", "level", "field", "mental", "health", "never", "beat", "policy", "climate", "tax",
        "privacy", "data", "café", "naïve", "über", "1.2.", "Pro:", "Con:", "(see", "note)", "\xE2\x80\x94", "x",
        "it's", "\"quoted\"", "50%", "e.g.", "日本", "{child}", "{parent}", "-", "->", "#tag"};
    std::uniform_int_distribution<std::size_t> len(1, 12);
    std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
    std::string s;
    auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        if (i) s += (rng() % 7 == 0) ? "  " : " ";
        s += words[pick(rng)];
    }
    // Leading "->" text would read as a duplicate reference; keep claims ordinary.
    if (s.rfind("->", 0) == 0) s = "a " + s;
    return s;
}

/// Random tree with `nodes` arguments and depth at most `max_depth`.
inline DebateTree random_tree(std::mt19937_64& rng, std::size_t nodes, std::size_t max_depth) {
    DebateTree tree(random_text(rng));
    std::vector<std::pair<ArgumentId, std::size_t>> pool{{tree.root(), 0}};
    while (max_depth > 0 && tree.size() < nodes) {
        auto [parent, d] = pool[rng() % pool.size()];
        if (d >= max_depth) continue;
        auto rel = (rng() & 1) ? RelationType::Support : RelationType::Attack;
        auto id = tree.add_argument(parent, random_text(rng), rel);
        pool.emplace_back(id, d + 1);
    }
    return tree;
}

/// Chain root <- 1 <- 2 <- ... of `length` edges; returns ids from the root down.
inline std::vector<ArgumentId> build_chain(DebateTree& tree, std::size_t length) {
    std::vector<ArgumentId> ids{tree.root()};
    for (std::size_t i = 0; i < length; ++i) {
        auto rel = i % 2 ? RelationType::Support : RelationType::Attack;
        ids.push_back(tree.add_argument(ids.back(), "link " + std::to_string(i + 1), rel));
    }
    return ids;
}

/// Depth by walking a parent map rebuilt from the edge list.
inline std::map<ArgumentId, std::size_t> depth_oracle(const DebateTree& tree) {
    std::map<ArgumentId, ArgumentId> parent;
    for (const auto& e : tree.edges()) parent.emplace(e.child, e.parent);
    std::map<ArgumentId, std::size_t> out;
    for (const auto& id : tree.preorder()) {
        std::size_t d = 0;
        for (auto cur = id; parent.contains(cur); cur = parent.at(cur)) ++d;
        out[id] = d;
    }
    return out;
}

/// Subtree size by breadth-first traversal over children().
inline std::size_t subtree_size(const DebateTree& tree, const ArgumentId& id) {
    std::size_t n = 0;
    std::vector<ArgumentId> queue{id};
    for (std::size_t i = 0; i < queue.size(); ++i) {
        ++n;
        for (const auto& c : tree.children(queue[i])) queue.push_back(c);
    }
    return n;
}

/// F1 through precision and recall.
inline double f1_oracle(double tp, double fp, double fn) {
    double p = tp / (tp + fp);
    double r = tp / (tp + fn);
    return 2 * p * r / (p + r);
}

/// In-process HTTP server implementing POST /score, plus an OpenAI-style
/// /v1/completions echo endpoint for the adapter.
class MockScoringServer {
public:
    using Handler = std::function<nlohmann::json(const nlohmann::json& request)>;

    explicit MockScoringServer(Handler handler, std::chrono::milliseconds delay = std::chrono::milliseconds(0))
        : handler_(std::move(handler)), delay_(delay) {
        server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
            auto now = ++in_flight_;
            {
                std::lock_guard lock(mutex_);
                max_in_flight_ = std::max(max_in_flight_, now);
                ++requests_;
            }
            if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
            auto body = nlohmann::json::parse(req.body, nullptr, false);
            auto reply = handler_(body);
            --in_flight_;
            if (reply.is_null()) {
                res.status = 500;
                res.set_content("{\"error\":\"injected\"}", "application/json");
                return;
            }
            res.set_content(reply.dump(), "application/json");
        });
        server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = nlohmann::json::parse(req.body);
            res.set_content(completion_reply(body.at("prompt").get<std::string>()).dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockScoringServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int port() const { return port_; }
    int max_in_flight() const {
        std::lock_guard lock(mutex_);
        return max_in_flight_;
    }
    int requests() const {
        std::lock_guard lock(mutex_);
        return requests_;
    }

    /// Fake tokenizer: each word and each run of spaces+word is a token; every
    /// token scores -0.1, except the final word which scores -0.5 for " attack"
    /// and -1.5 for " support".
    static nlohmann::json completion_reply(const std::string& text) {
        std::vector<std::string> tokens;
        std::vector<std::size_t> offsets;
        std::size_t i = 0;
        while (i < text.size()) {
            std::size_t start = i;
            while (i < text.size() && text[i] == ' ') ++i;
            while (i < text.size() && text[i] != ' ') ++i;
            tokens.push_back(text.substr(start, i - start));
            offsets.push_back(start);
        }
        nlohmann::json lps = nlohmann::json::array();
        for (std::size_t k = 0; k < tokens.size(); ++k) {
            if (k == 0) {
                lps.push_back(nullptr);
            } else if (k + 1 == tokens.size() && tokens[k] == " attack") {
                lps.push_back(-0.5);
            } else if (k + 1 == tokens.size() && tokens[k] == " support") {
                lps.push_back(-1.5);
            } else {
                lps.push_back(-0.1);
            }
        }
        return {{"choices", {{{"text", text},
                              {"logprobs", {{"tokens", tokens}, {"token_logprobs", lps}, {"text_offset", offsets}}}}}}};
    }

private:
    Handler handler_;
    std::chrono::milliseconds delay_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> in_flight_{0};
    mutable std::mutex mutex_;
    int max_in_flight_ = 0;
    int requests_ = 0;
};

/// Fixed logprobs for every request.
inline MockScoringServer::Handler constant_logprobs(double attack, double support) {
    return [=](const nlohmann::json&) { return nlohmann::json{{"logprobs", {attack, support}}}; };
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("adbl2-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace adbl2::test
