#pragma once

#include "adbl2/registry.hpp"
#include "adbl2/store.hpp"
#include "adbl2/verification.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <string>

namespace adbl2 {

namespace api {

/// HTTP status for a library error code.
int http_status(ErrorCode code) noexcept;

nlohmann::json error_body(int status, std::string_view code, std::string_view message);

nlohmann::json to_json(const RelationEdge& edge);
nlohmann::json to_json(const DebateSnapshot& snapshot);
nlohmann::json to_json(const RelationClassification& c);
nlohmann::json to_json(const VerificationResult& r);
nlohmann::json to_json(const WorklistEntry& e);
nlohmann::json to_json(const TreeVerification& v);
nlohmann::json to_json(const AssistFeedback& f);

}  // namespace api

struct ServiceConfig {
    std::filesystem::path data_dir;  // empty: in-memory only
    BackendRegistry registry = BackendRegistry::builtin();
    double confidence_floor = kDefaultConfidenceFloor;
    double assist_threshold = kDefaultAssistThreshold;
};

/// JSON-over-HTTP front end for the debate store and the classifier.
///
///   POST   /debates/import?domain=D          Kialo text body
///   GET    /debates                          list ids
///   GET    /debates/{id}                     tree as JSON
///   GET    /debates/{id}/export              Kialo text
///   POST   /debates/{id}/arguments           {parent_id, text, relation}
///   PATCH  /debates/{id}/arguments/{aid}     {text}
///   DELETE /debates/{id}/arguments/{aid}
///   POST   /debates/{id}/relations/{aid}     {relation}
///   POST   /debates/{id}/verify              {backend?, technique?, confidence_floor?}
///   POST   /debates/{id}/assist              {parent_id, draft_text, intended, backend?, ...}
///   POST   /classify                         {parent_text, child_text, backend?, technique?}
///
/// Mutations accept `if_revision` (body field or query parameter); a stale value
/// yields 409 and leaves the debate untouched.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the listening socket; port 0 picks a free port. Returns the bound port.
    int bind(const std::string& host, int port);
    /// Serves until stop() is called. bind() must have succeeded.
    void run();
    void stop();
    void wait_until_ready() const;

    DebateStore& store() noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace adbl2
