#pragma once

#include "adbl2/relation.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adbl2 {

/// Opaque argument identifier, unique within one tree.
struct ArgumentId {
    std::string value;

    friend auto operator<=>(const ArgumentId&, const ArgumentId&) = default;
};

struct Argument {
    ArgumentId id;
    std::string text;
    std::map<std::string, std::string> meta;
};

/// Directed child -> parent edge.
struct RelationEdge {
    ArgumentId child;
    ArgumentId parent;
    RelationType relation;

    friend bool operator==(const RelationEdge&, const RelationEdge&) = default;
};

/// Strips leading/trailing whitespace; inner whitespace is kept.
std::string trim_text(std::string_view text);

/// Rooted bipolar argumentation tree. Every non-root argument has exactly one
/// parent edge labelled Attack or Support; children keep insertion order.
class DebateTree {
public:
    /// Throws EmptyText if the trimmed root text is empty.
    explicit DebateTree(std::string_view root_text, std::optional<ArgumentId> root_id = std::nullopt);

    const ArgumentId& root() const noexcept { return root_; }
    const std::optional<std::string>& domain() const noexcept { return domain_; }
    void set_domain(std::optional<std::string> domain) { domain_ = std::move(domain); }

    std::size_t size() const noexcept { return nodes_.size(); }
    bool contains(const ArgumentId& id) const { return nodes_.contains(id); }

    const Argument& argument(const ArgumentId& id) const;
    Argument& argument_mut(const ArgumentId& id);
    std::span<const ArgumentId> children(const ArgumentId& id) const;

    ArgumentId add_argument(const ArgumentId& parent, std::string_view text, RelationType relation);
    /// Restores an argument under a caller-chosen id (used when reloading snapshots).
    ArgumentId add_argument(const ArgumentId& parent, std::string_view text, RelationType relation,
                            ArgumentId id);

    /// Replaces the text and returns every incident edge (parent edge first, then
    /// child edges in insertion order) for re-verification.
    std::vector<RelationEdge> edit_argument_text(const ArgumentId& id, std::string_view new_text);

    /// Cascade-deletes the subtree rooted at id. Returns the number of arguments removed.
    std::size_t remove_argument(const ArgumentId& id);

    std::size_t depth(const ArgumentId& id) const;
    std::optional<RelationEdge> edge_of(const ArgumentId& id) const;

    /// Returns the previous label.
    RelationType set_relation(const ArgumentId& child, RelationType relation);

    /// Pre-order, children in insertion order.
    std::vector<ArgumentId> preorder() const;
    /// One edge per non-root argument, in pre-order of the child.
    std::vector<RelationEdge> edges() const;

    /// Returns a description of the first violated invariant, or nullopt.
    std::optional<std::string> validate() const;

    /// Next id the generator would try; persisted so ids are never reused.
    std::uint64_t id_counter() const noexcept { return next_id_; }
    void set_id_counter(std::uint64_t next) noexcept { next_id_ = next; }

private:
    struct Node {
        Argument arg;
        std::optional<ArgumentId> parent;
        RelationType relation = RelationType::Support;
        std::vector<ArgumentId> children;
    };

    const Node& node(const ArgumentId& id) const;
    Node& node(const ArgumentId& id);
    ArgumentId fresh_id();

    std::map<ArgumentId, Node> nodes_;
    ArgumentId root_;
    std::optional<std::string> domain_;
    std::uint64_t next_id_ = 1;
};

/// Equality up to id renaming: same texts, labels and child order.
bool same_structure(const DebateTree& a, const DebateTree& b);

}  // namespace adbl2
