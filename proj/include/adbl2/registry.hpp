#pragma once

#include "adbl2/classifier.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adbl2 {

/// Named backends selectable per request. Loaded from a JSON file:
///
///   {"default": "stub",
///    "backends": [
///      {"id": "stub", "kind": "stub", "rules_file": "stub_rules.json"},
///      {"id": "finetuned", "kind": "http", "endpoint": "http://127.0.0.1:8081",
///       "timeout_ms": 10000, "max_in_flight": 4, "technique": "few"},
///      {"id": "vllm", "kind": "openai", "endpoint": "http://127.0.0.1:8000/v1", "model": "..."},
///      {"id": "const", "kind": "constant", "raw_attack": 0, "raw_support": -5},
///      {"id": "ref", "kind": "oracle", "source": "reference.txt"}]}
///
/// Relative paths resolve against the registry file's directory. Optional per
/// entry: "template" (inline object) or "template_file", "few_shot_file".
class BackendRegistry {
public:
    /// stub (shipped worked-example rules), constant-attack, constant-support, tie.
    static BackendRegistry builtin();
    static BackendRegistry load_file(const std::filesystem::path& path);
    static BackendRegistry parse(std::string_view json_text, const std::filesystem::path& base_dir);

    /// Adds or replaces an entry. The first entry added becomes the default.
    void add(BackendConfig config, std::vector<FewShotExample> few_shot_pack = {});

    bool contains(const std::string& id) const { return entries_.contains(id); }
    const std::string& default_id() const noexcept { return default_id_; }
    void set_default(std::string id);
    std::vector<std::string> ids() const;

    /// Looks up `id` (or the default) and applies an optional technique
    /// override ("zero" or "few"). Throws NotFound / InvalidArgument.
    BackendConfig resolve(const std::optional<std::string>& id = std::nullopt,
                          const std::optional<std::string>& technique = std::nullopt) const;

private:
    struct Entry {
        BackendConfig config;
        std::vector<FewShotExample> few_shot_pack;
    };

    std::map<std::string, Entry> entries_;
    std::string default_id_;
};

/// Shipped rule table reproducing the two worked-example relations
/// ("never beat" -> support, "weed out" -> attack; default tie -> attack).
std::string_view default_stub_rules_json();

/// Oracle built from a Kialo export (.txt) or a triples file (.jsonl).
std::shared_ptr<LabelOracleBackend> oracle_from_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace adbl2
