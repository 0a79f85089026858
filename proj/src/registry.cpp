#include "adbl2/registry.hpp"
#include "adbl2/dataset.hpp"
#include "adbl2/error.hpp"
#include "adbl2/kialo.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace adbl2 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kDefaultStubRules = R"([
  {"pattern": "never beat", "label": "support", "margin": 3.0},
  {"pattern": "weed out", "label": "attack", "margin": 3.0},
  {"pattern": "", "label": "attack", "margin": 0.0}
])";

fs::path resolve_path(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_relative() ? base / path : path;
}

PromptTechnique technique_from(std::string_view name, const std::vector<FewShotExample>& pack) {
    if (name == "zero" || name == "zero-shot") return PromptTechnique::zero_shot();
    if (name == "few" || name == "few-shot") {
        return PromptTechnique::few_shot(pack.empty() ? default_few_shot_examples() : pack);
    }
    throw Error(ErrorCode::InvalidArgument, fmt::format("unknown technique '{}' (expected zero or few)", name));
}

}  // namespace

std::string_view default_stub_rules_json() { return kDefaultStubRules; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot read '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", tmp.string()));
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, fmt::format("short write to '{}'", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot replace '{}': {}", path.string(), ec.message()));
}

std::shared_ptr<LabelOracleBackend> oracle_from_file(const fs::path& path) {
    auto text = read_file(path);
    auto oracle = std::make_shared<LabelOracleBackend>();
    if (path.extension() == ".jsonl") {
        for (const auto& t : dataset::read_jsonl(text).triples) oracle->add(t.parent_text, t.child_text, t.label);
        return oracle;
    }
    auto parsed = kialo::parse_kialo(text);
    if (!parsed.ok()) throw Error(ErrorCode::ParseError, fmt::format("'{}' is not a valid Kialo export", path.string()));
    const auto& tree = *parsed.tree;
    for (const auto& e : tree.edges()) {
        oracle->add(tree.argument(e.parent).text, tree.argument(e.child).text, e.relation);
    }
    return oracle;
}

BackendRegistry BackendRegistry::builtin() {
    BackendRegistry reg;
    BackendConfig stub;
    stub.backend_id = "stub";
    stub.backend = std::make_shared<StubRuleBackend>(parse_stub_rules(kDefaultStubRules));
    reg.add(std::move(stub));

    BackendConfig attack;
    attack.backend_id = "constant-attack";
    attack.backend = std::make_shared<ConstantBackend>(0.0, -5.0);
    reg.add(std::move(attack));

    BackendConfig support;
    support.backend_id = "constant-support";
    support.backend = std::make_shared<ConstantBackend>(-5.0, 0.0);
    reg.add(std::move(support));

    BackendConfig tie;
    tie.backend_id = "tie";
    tie.backend = std::make_shared<ConstantBackend>(0.0, 0.0);
    reg.add(std::move(tie));
    return reg;
}

BackendRegistry BackendRegistry::load_file(const fs::path& path) {
    auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return parse(read_file(path), base);
}

BackendRegistry BackendRegistry::parse(std::string_view json_text, const fs::path& base_dir) {
    BackendRegistry reg;
    try {
        auto root = json::parse(json_text);
        for (const auto& e : root.at("backends")) {
            BackendConfig cfg;
            cfg.backend_id = e.at("id").get<std::string>();
            cfg.timeout = std::chrono::milliseconds(e.value("timeout_ms", 10000));
            cfg.max_in_flight = e.value("max_in_flight", std::size_t{4});

            if (e.contains("template")) {
                cfg.prompt_template = parse_template_json(e.at("template").dump());
            } else if (e.contains("template_file")) {
                cfg.prompt_template = parse_template_json(read_file(resolve_path(base_dir, e.at("template_file"))));
            }
            std::vector<FewShotExample> pack;
            if (e.contains("few_shot_file")) {
                pack = parse_few_shot_json(read_file(resolve_path(base_dir, e.at("few_shot_file"))));
            }
            cfg.technique = technique_from(e.value("technique", std::string("zero")), pack);

            auto kind = e.at("kind").get<std::string>();
            if (kind == "stub") {
                auto rules = e.contains("rules_file") ? read_file(resolve_path(base_dir, e.at("rules_file")))
                             : e.contains("rules")   ? e.at("rules").dump()
                                                     : std::string(kDefaultStubRules);
                cfg.backend = std::make_shared<StubRuleBackend>(parse_stub_rules(rules));
            } else if (kind == "http") {
                cfg.backend = std::make_shared<HttpScoreBackend>(e.at("endpoint").get<std::string>(), cfg.timeout,
                                                                 cfg.max_in_flight);
            } else if (kind == "openai") {
                cfg.backend = std::make_shared<OpenAiCompletionBackend>(
                    e.at("endpoint").get<std::string>(), e.value("model", std::string()), cfg.timeout, cfg.max_in_flight);
            } else if (kind == "constant") {
                cfg.backend = std::make_shared<ConstantBackend>(e.at("raw_attack").get<double>(),
                                                                e.at("raw_support").get<double>());
            } else if (kind == "oracle") {
                cfg.backend = oracle_from_file(resolve_path(base_dir, e.at("source")));
            } else {
                throw Error(ErrorCode::InvalidArgument, fmt::format("unknown backend kind '{}'", kind));
            }
            validate(cfg);
            reg.add(std::move(cfg), std::move(pack));
        }
        if (root.contains("default")) reg.set_default(root.at("default").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("invalid backend registry: ") + e.what());
    }
    if (reg.entries_.empty()) throw Error(ErrorCode::InvalidArgument, "backend registry lists no backends");
    return reg;
}

void BackendRegistry::add(BackendConfig config, std::vector<FewShotExample> few_shot_pack) {
    auto id = config.backend_id;
    if (default_id_.empty()) default_id_ = id;
    entries_.insert_or_assign(id, Entry{std::move(config), std::move(few_shot_pack)});
}

void BackendRegistry::set_default(std::string id) {
    if (!entries_.contains(id)) throw Error(ErrorCode::NotFound, fmt::format("unknown default backend '{}'", id));
    default_id_ = std::move(id);
}

std::vector<std::string> BackendRegistry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, e] : entries_) out.push_back(id);
    return out;
}

BackendConfig BackendRegistry::resolve(const std::optional<std::string>& id,
                                       const std::optional<std::string>& technique) const {
    const auto& name = id ? *id : default_id_;
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error(ErrorCode::NotFound, fmt::format("unknown backend '{}'", name));
    auto cfg = it->second.config;
    if (technique) cfg.technique = technique_from(*technique, it->second.few_shot_pack);
    return cfg;
}

}  // namespace adbl2
