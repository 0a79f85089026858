#include "adbl2/service.hpp"
#include "adbl2/error.hpp"
#include "adbl2/kialo.hpp"

#include <fmt/format.h>
#include <httplib.h>

namespace adbl2 {

using nlohmann::json;

namespace api {

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NotFound:
        case ErrorCode::UnknownArgument:
        case ErrorCode::UnknownParent: return 404;
        case ErrorCode::StaleRevision: return 409;
        case ErrorCode::BackendUnavailable:
        case ErrorCode::BackendProtocolError: return 502;
        case ErrorCode::Timeout: return 504;
        case ErrorCode::IoError: return 500;
        default: return 422;
    }
}

json error_body(int status, std::string_view code, std::string_view message) {
    return {{"error", {{"status", status}, {"code", code}, {"message", message}}}};
}

json to_json(const RelationEdge& edge) {
    return {{"child", edge.child.value}, {"parent", edge.parent.value}, {"relation", to_string(edge.relation)}};
}

json to_json(const DebateSnapshot& s) {
    const auto& tree = s.tree;
    json nodes = json::array();
    json edges = json::array();
    for (const auto& id : tree.preorder()) {
        auto edge = tree.edge_of(id);
        json children = json::array();
        for (const auto& c : tree.children(id)) children.push_back(c.value);
        nodes.push_back({{"id", id.value},
                         {"text", tree.argument(id).text},
                         {"depth", tree.depth(id)},
                         {"parent", edge ? json(edge->parent.value) : json(nullptr)},
                         {"relation", edge ? json(to_string(edge->relation)) : json(nullptr)},
                         {"children", children}});
        if (edge) edges.push_back(to_json(*edge));
    }
    return {{"debate_id", s.debate_id},
            {"revision", s.revision},
            {"title", s.title ? json(*s.title) : json(nullptr)},
            {"domain", tree.domain() ? json(*tree.domain()) : json(nullptr)},
            {"root", tree.root().value},
            {"nodes", nodes},
            {"edges", edges}};
}

json to_json(const RelationClassification& c) {
    return {{"p_attack", c.p_attack},
            {"p_support", c.p_support},
            {"predicted", to_string(c.predicted)},
            {"tie", c.tie},
            {"raw_attack", c.scores.raw_attack},
            {"raw_support", c.scores.raw_support},
            {"backend_id", c.backend_id},
            {"prompt_fingerprint", c.prompt_fingerprint}};
}

json to_json(const VerificationResult& r) {
    return {{"edge", to_json(r.edge)},
            {"stored", to_string(r.stored)},
            {"predicted", to_string(r.predicted)},
            {"probability_of_stored", r.probability_of_stored},
            {"status", to_string(r.status)},
            {"classification", to_json(r.classification)}};
}

json to_json(const WorklistEntry& e) {
    if (e.result) return to_json(*e.result);
    return {{"edge", to_json(e.edge)},
            {"status", "error"},
            {"error", {{"code", e.error_code ? to_string(*e.error_code) : "Unknown"}, {"message", e.error}}}};
}

json to_json(const TreeVerification& v) {
    json results = json::array();
    for (const auto& e : v.results) results.push_back(to_json(e));
    return {{"total", v.total},
            {"confirmed", v.confirmed},
            {"mismatched", v.mismatched},
            {"low_confidence", v.low_confidence},
            {"failed", v.failed},
            {"results", results}};
}

json to_json(const AssistFeedback& f) {
    return {{"draft_text", f.draft_text},
            {"intended", to_string(f.intended)},
            {"p_intended", f.p_intended},
            {"verdict", to_string(f.verdict)},
            {"suggestion", f.suggestion},
            {"classification", to_json(f.classification)}};
}

}  // namespace api

namespace {

class HttpError : public std::runtime_error {
public:
    HttpError(int status, std::string code, const std::string& message, json extra = json::object())
        : std::runtime_error(message), status(status), code(std::move(code)), extra(std::move(extra)) {}

    int status;
    std::string code;
    json extra;
};

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw HttpError(422, "InvalidJson", "request body must be a JSON object");
    return j;
}

std::string required_string(const json& body, const char* field) {
    auto it = body.find(field);
    if (it == body.end() || !it->is_string()) {
        throw HttpError(422, "MissingField", fmt::format("field '{}' (string) is required", field));
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* field) {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw HttpError(422, "InvalidField", fmt::format("field '{}' must be a string", field));
    return it->get<std::string>();
}

double optional_number(const json& body, const char* field, double fallback) {
    auto it = body.find(field);
    if (it == body.end() || it->is_null()) return fallback;
    if (!it->is_number()) throw HttpError(422, "InvalidField", fmt::format("field '{}' must be a number", field));
    return it->get<double>();
}

RelationType required_relation(const json& body, const char* field) {
    auto r = parse_relation(required_string(body, field));
    if (!r) throw HttpError(422, "InvalidRelation", fmt::format("field '{}' must be attack or support", field));
    return *r;
}

std::optional<std::uint64_t> if_revision(const httplib::Request& req, const json& body) {
    if (auto it = body.find("if_revision"); it != body.end() && !it->is_null()) {
        if (!it->is_number_unsigned()) throw HttpError(422, "InvalidField", "if_revision must be a non-negative integer");
        return it->get<std::uint64_t>();
    }
    if (req.has_param("if_revision")) {
        try {
            return std::stoull(req.get_param_value("if_revision"));
        } catch (const std::exception&) {
            throw HttpError(422, "InvalidField", "if_revision must be a non-negative integer");
        }
    }
    return std::nullopt;
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

json diagnostics_json(const std::vector<kialo::ParseDiagnostic>& diags) {
    json out = json::array();
    for (const auto& d : diags) {
        out.push_back({{"line", d.line_number},
                       {"severity", d.severity == kialo::Severity::Error ? "error" : "warning"},
                       {"kind", kialo::to_string(d.kind)},
                       {"message", d.message}});
    }
    return out;
}

}  // namespace

struct Service::Impl {
    explicit Impl(ServiceConfig cfg) : config(std::move(cfg)), store(config.data_dir) {}

    ServiceConfig config;
    DebateStore store;
    httplib::Server server;

    BackendConfig backend_for(const json& body) const {
        return config.registry.resolve(optional_string(body, "backend"), optional_string(body, "technique"));
    }

    /// Runs a handler, translating library and request errors into JSON error bodies.
    template <typename Fn>
    httplib::Server::Handler wrap(Fn fn) {
        return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const HttpError& e) {
                auto body = api::error_body(e.status, e.code, e.what());
                body.update(e.extra);
                reply(res, e.status, body);
            } catch (const Error& e) {
                auto status = api::http_status(e.code());
                reply(res, status, api::error_body(status, to_string(e.code()), e.what()));
            } catch (const std::exception& e) {
                reply(res, 500, api::error_body(500, "Internal", e.what()));
            }
        };
    }

    void routes() {
        server.Get("/health", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, {{"ok", true}}); });

        server.Post("/debates/import", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto parsed = kialo::parse_kialo(req.body);
            auto diags = diagnostics_json(parsed.diagnostics);
            if (!parsed.ok()) {
                throw HttpError(422, "ParseError", "the Kialo export has errors", {{"diagnostics", diags}});
            }
            std::optional<std::string> override_tag;
            if (req.has_param("domain")) override_tag = req.get_param_value("domain");
            auto domain = kialo::detect_domain(parsed.title.value_or(""), kialo::default_domain_map(), override_tag);
            parsed.tree->set_domain(domain);
            auto id = store.create(std::move(*parsed.tree), parsed.title);
            reply(res, 201, {{"debate_id", id}, {"revision", 1}, {"diagnostics", diags}});
        }));

        server.Get("/debates", wrap([this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, {{"debates", store.list()}});
        }));

        server.Get(R"(/debates/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, api::to_json(store.get(req.matches[1])));
        }));

        server.Get(R"(/debates/([^/]+)/export)", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto snap = store.get(req.matches[1]);
            res.status = 200;
            res.set_content(kialo::serialize_kialo(snap.tree, snap.title), "text/plain; charset=utf-8");
        }));

        server.Post(R"(/debates/([^/]+)/arguments)", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req);
            ArgumentId parent{required_string(body, "parent_id")};
            auto text = required_string(body, "text");
            auto relation = required_relation(body, "relation");
            ArgumentId created;
            auto rev = store.mutate(req.matches[1], if_revision(req, body),
                                    [&](DebateTree& t) { created = t.add_argument(parent, text, relation); });
            reply(res, 201, {{"argument_id", created.value}, {"revision", rev}});
        }));

        server.Patch(R"(/debates/([^/]+)/arguments/([^/]+))",
                     wrap([this](const httplib::Request& req, httplib::Response& res) {
                         auto body = parse_body(req);
                         auto text = required_string(body, "text");
                         std::vector<RelationEdge> worklist;
                         auto rev = store.mutate(req.matches[1], if_revision(req, body), [&](DebateTree& t) {
                             worklist = t.edit_argument_text(ArgumentId{req.matches[2]}, text);
                         });
                         json edges = json::array();
                         for (const auto& e : worklist) edges.push_back(api::to_json(e));
                         reply(res, 200, {{"worklist", edges}, {"revision", rev}});
                     }));

        server.Delete(R"(/debates/([^/]+)/arguments/([^/]+))",
                      wrap([this](const httplib::Request& req, httplib::Response& res) {
                          auto body = parse_body(req);
                          std::size_t removed = 0;
                          auto rev = store.mutate(req.matches[1], if_revision(req, body), [&](DebateTree& t) {
                              removed = t.remove_argument(ArgumentId{req.matches[2]});
                          });
                          reply(res, 200, {{"removed", removed}, {"revision", rev}});
                      }));

        server.Post(R"(/debates/([^/]+)/relations/([^/]+))",
                    wrap([this](const httplib::Request& req, httplib::Response& res) {
                        auto body = parse_body(req);
                        auto relation = required_relation(body, "relation");
                        RelationType previous{};
                        auto rev = store.mutate(req.matches[1], if_revision(req, body), [&](DebateTree& t) {
                            previous = t.set_relation(ArgumentId{req.matches[2]}, relation);
                        });
                        reply(res, 200, {{"previous", to_string(previous)}, {"revision", rev}});
                    }));

        server.Post("/classify", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req);
            auto parent = required_string(body, "parent_text");
            auto child = required_string(body, "child_text");
            auto result = classify(backend_for(body), parent, child);
            reply(res, 200, api::to_json(result));
        }));

        server.Post(R"(/debates/([^/]+)/verify)", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req);
            auto floor = optional_number(body, "confidence_floor", config.confidence_floor);
            auto snap = store.get(req.matches[1]);
            auto summary = verify_tree(snap.tree, backend_for(body), floor);

            // Every edge failing for the same backend reason is a backend outage, not a finding.
            if (summary.total > 0 && summary.failed == summary.total) {
                auto code = summary.results.front().error_code;
                bool same = std::all_of(summary.results.begin(), summary.results.end(),
                                        [&](const WorklistEntry& e) { return e.error_code == code; });
                if (same && code && is_backend_error(*code)) {
                    throw Error(*code, summary.results.front().error);
                }
            }
            auto out = api::to_json(summary);
            out["revision"] = snap.revision;
            reply(res, 200, out);
        }));

        server.Post(R"(/debates/([^/]+)/assist)", wrap([this](const httplib::Request& req, httplib::Response& res) {
            auto body = parse_body(req);
            ArgumentId parent{required_string(body, "parent_id")};
            auto draft = required_string(body, "draft_text");
            auto intended = required_relation(body, "intended");
            auto threshold = optional_number(body, "assist_threshold", config.assist_threshold);
            auto snap = store.get(req.matches[1]);
            auto feedback = assist_new_argument(snap.tree, parent, draft, intended, backend_for(body), threshold);
            reply(res, 200, api::to_json(feedback));
        }));
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) { impl_->routes(); }

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
    if (port == 0) {
        auto bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::IoError, fmt::format("cannot bind {}", host));
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw Error(ErrorCode::IoError, fmt::format("cannot bind {}:{}", host, port));
    }
    return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

DebateStore& Service::store() noexcept { return impl_->store; }

}  // namespace adbl2
