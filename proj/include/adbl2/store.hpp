#pragma once

#include "adbl2/debate_tree.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace adbl2 {

struct DebateSnapshot {
    std::string debate_id;
    DebateTree tree;
    std::uint64_t revision = 0;
    std::optional<std::string> title;
};

/// Revisioned debate trees with snapshot-on-mutate persistence: each debate is
/// `<dir>/<id>.txt` (Kialo export) plus `<dir>/<id>.json` (revision, domain,
/// title, argument ids in export order). An empty directory path keeps
/// everything in memory.
class DebateStore {
public:
    explicit DebateStore(std::filesystem::path directory = {});

    /// Stores a new debate at revision 1 and returns its id.
    std::string create(DebateTree tree, std::optional<std::string> title = std::nullopt);

    /// Copy of the current state. Throws NotFound.
    DebateSnapshot get(const std::string& debate_id) const;

    /// Applies `mutation` to a copy of the tree under exclusive access, persists
    /// it and bumps the revision. A supplied `if_revision` that differs from the
    /// current revision fails with StaleRevision. If the mutation or the write
    /// throws, the stored state is unchanged. Returns the new revision.
    std::uint64_t mutate(const std::string& debate_id, std::optional<std::uint64_t> if_revision,
                         const std::function<void(DebateTree&)>& mutation);

    std::vector<std::string> list() const;

private:
    struct Entry {
        explicit Entry(DebateSnapshot s) : state(std::move(s)) {}

        mutable std::shared_mutex mutex;
        DebateSnapshot state;
    };

    std::shared_ptr<Entry> find(const std::string& debate_id) const;
    void persist(const DebateSnapshot& snapshot) const;
    void load_all();

    std::filesystem::path directory_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
    std::uint64_t next_debate_ = 1;
};

}  // namespace adbl2
