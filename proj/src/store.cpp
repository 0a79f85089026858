#include "adbl2/store.hpp"
#include "adbl2/error.hpp"
#include "adbl2/kialo.hpp"
#include "adbl2/prompt.hpp"
#include "adbl2/registry.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <mutex>

namespace adbl2 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Rebuilds `parsed` with the ids recorded in the manifest (export order).
DebateTree with_ids(const DebateTree& parsed, const std::vector<std::string>& ids) {
    auto order = parsed.preorder();
    std::map<ArgumentId, ArgumentId> rename;
    for (std::size_t i = 0; i < order.size(); ++i) rename.emplace(order[i], ArgumentId{ids[i]});

    DebateTree tree(parsed.argument(parsed.root()).text, rename.at(parsed.root()));
    for (std::size_t i = 1; i < order.size(); ++i) {
        auto edge = *parsed.edge_of(order[i]);
        tree.add_argument(rename.at(edge.parent), parsed.argument(order[i]).text, edge.relation, rename.at(order[i]));
    }
    return tree;
}

std::optional<std::uint64_t> debate_number(const std::string& id) {
    if (id.size() < 2 || id[0] != 'd') return std::nullopt;
    try {
        return std::stoull(id.substr(1));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

DebateStore::DebateStore(fs::path directory) : directory_(std::move(directory)) {
    if (directory_.empty()) return;
    std::error_code ec;
    fs::create_directories(directory_, ec);
    if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create data directory '{}'", directory_.string()));
    load_all();
}

void DebateStore::load_all() {
    for (const auto& dirent : fs::directory_iterator(directory_)) {
        const auto& path = dirent.path();
        if (path.extension() != ".json") continue;
        auto manifest = json::parse(read_file(path), nullptr, false);
        if (manifest.is_discarded() || !manifest.contains("debate_id")) continue;

        auto id = manifest.at("debate_id").get<std::string>();
        auto snapshot_path = directory_ / (id + ".txt");
        if (!fs::exists(snapshot_path)) continue;
        auto text = read_file(snapshot_path);
        auto parsed = kialo::parse_kialo(text);
        if (!parsed.ok()) {
            throw Error(ErrorCode::IoError, fmt::format("snapshot '{}' does not parse", snapshot_path.string()));
        }

        auto revision = manifest.value("revision", std::uint64_t{1});

        // The snapshot is authoritative; ids are only reused when the manifest
        // was written for exactly this snapshot.
        auto ids = manifest.value("ids", std::vector<std::string>{});
        bool ids_match = manifest.value("snapshot_fingerprint", std::string()) == prompt_fingerprint(text) &&
                         ids.size() == parsed.tree->size();
        auto tree = ids_match ? with_ids(*parsed.tree, ids) : std::move(*parsed.tree);
        if (ids_match) {
            tree.set_id_counter(manifest.value("id_counter", std::uint64_t{1}));
        } else {
            ++revision;
        }
        if (manifest.contains("domain") && manifest["domain"].is_string()) {
            tree.set_domain(manifest["domain"].get<std::string>());
        }
        auto entry = std::make_shared<Entry>(DebateSnapshot{id, std::move(tree), revision, parsed.title});

        if (auto n = debate_number(id)) next_debate_ = std::max(next_debate_, *n + 1);
        entries_.emplace(id, std::move(entry));
    }
}

void DebateStore::persist(const DebateSnapshot& s) const {
    if (directory_.empty()) return;
    auto text = kialo::serialize_kialo(s.tree, s.title);
    std::vector<std::string> ids;
    for (const auto& id : s.tree.preorder()) ids.push_back(id.value);

    json manifest = {{"debate_id", s.debate_id},
                     {"revision", s.revision},
                     {"domain", s.tree.domain() ? json(*s.tree.domain()) : json(nullptr)},
                     {"title", s.title ? json(*s.title) : json(nullptr)},
                     {"ids", ids},
                     {"id_counter", s.tree.id_counter()},
                     {"snapshot_fingerprint", prompt_fingerprint(text)}};
    write_file_atomic(directory_ / (s.debate_id + ".txt"), text);
    write_file_atomic(directory_ / (s.debate_id + ".json"), manifest.dump(2) + "\n");
}

std::string DebateStore::create(DebateTree tree, std::optional<std::string> title) {
    std::unique_lock lock(mutex_);
    auto id = fmt::format("d{}", next_debate_);
    auto entry = std::make_shared<Entry>(DebateSnapshot{id, std::move(tree), 1, std::move(title)});
    persist(entry->state);
    ++next_debate_;
    entries_.emplace(id, std::move(entry));
    return id;
}

std::shared_ptr<DebateStore::Entry> DebateStore::find(const std::string& debate_id) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(debate_id);
    if (it == entries_.end()) throw Error(ErrorCode::NotFound, fmt::format("unknown debate '{}'", debate_id));
    return it->second;
}

DebateSnapshot DebateStore::get(const std::string& debate_id) const {
    auto entry = find(debate_id);
    std::shared_lock lock(entry->mutex);
    return entry->state;
}

std::uint64_t DebateStore::mutate(const std::string& debate_id, std::optional<std::uint64_t> if_revision,
                                  const std::function<void(DebateTree&)>& mutation) {
    auto entry = find(debate_id);
    std::unique_lock lock(entry->mutex);
    auto& state = entry->state;
    if (if_revision && *if_revision != state.revision) {
        throw Error(ErrorCode::StaleRevision, fmt::format("debate '{}' is at revision {}, request expected {}",
                                                          debate_id, state.revision, *if_revision));
    }
    auto next = state;
    mutation(next.tree);
    ++next.revision;
    persist(next);
    state = std::move(next);
    return state.revision;
}

std::vector<std::string> DebateStore::list() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, e] : entries_) out.push_back(id);
    return out;
}

}  // namespace adbl2
