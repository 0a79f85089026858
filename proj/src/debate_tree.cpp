#include "adbl2/debate_tree.hpp"
#include "adbl2/error.hpp"

#include <algorithm>
#include <set>

namespace adbl2 {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string require_text(std::string_view text) {
    auto trimmed = trim_text(text);
    if (trimmed.empty()) throw Error(ErrorCode::EmptyText, "argument text is empty");
    return trimmed;
}

}  // namespace

std::string trim_text(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    return std::string(text.substr(begin, end - begin));
}

DebateTree::DebateTree(std::string_view root_text, std::optional<ArgumentId> root_id) {
    auto text = require_text(root_text);
    root_ = root_id ? std::move(*root_id) : fresh_id();
    if (root_.value.empty()) throw Error(ErrorCode::InvalidArgument, "argument id is empty");
    Node n;
    n.arg = Argument{root_, std::move(text), {}};
    nodes_.emplace(root_, std::move(n));
}

const DebateTree::Node& DebateTree::node(const ArgumentId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(ErrorCode::UnknownArgument, "unknown argument '" + id.value + "'");
    return it->second;
}

DebateTree::Node& DebateTree::node(const ArgumentId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(ErrorCode::UnknownArgument, "unknown argument '" + id.value + "'");
    return it->second;
}

ArgumentId DebateTree::fresh_id() {
    for (;;) {
        ArgumentId id{"a" + std::to_string(next_id_++)};
        if (!nodes_.contains(id)) return id;
    }
}

const Argument& DebateTree::argument(const ArgumentId& id) const { return node(id).arg; }

Argument& DebateTree::argument_mut(const ArgumentId& id) { return node(id).arg; }

std::span<const ArgumentId> DebateTree::children(const ArgumentId& id) const { return node(id).children; }

ArgumentId DebateTree::add_argument(const ArgumentId& parent, std::string_view text, RelationType relation) {
    if (!nodes_.contains(parent)) throw Error(ErrorCode::UnknownParent, "unknown parent '" + parent.value + "'");
    auto clean = require_text(text);
    return add_argument(parent, clean, relation, fresh_id());
}

ArgumentId DebateTree::add_argument(const ArgumentId& parent, std::string_view text, RelationType relation,
                                    ArgumentId id) {
    auto pit = nodes_.find(parent);
    if (pit == nodes_.end()) throw Error(ErrorCode::UnknownParent, "unknown parent '" + parent.value + "'");
    auto clean = require_text(text);
    if (id.value.empty()) throw Error(ErrorCode::InvalidArgument, "argument id is empty");
    if (nodes_.contains(id)) throw Error(ErrorCode::DuplicateId, "duplicate argument id '" + id.value + "'");

    Node n;
    n.arg = Argument{id, std::move(clean), {}};
    n.parent = parent;
    n.relation = relation;
    pit->second.children.push_back(id);
    nodes_.emplace(id, std::move(n));
    return id;
}

std::vector<RelationEdge> DebateTree::edit_argument_text(const ArgumentId& id, std::string_view new_text) {
    auto& n = node(id);
    n.arg.text = require_text(new_text);

    std::vector<RelationEdge> worklist;
    if (n.parent) worklist.push_back({id, *n.parent, n.relation});
    for (const auto& child : n.children) worklist.push_back({child, id, node(child).relation});
    return worklist;
}

std::size_t DebateTree::remove_argument(const ArgumentId& id) {
    auto& n = node(id);
    if (!n.parent) throw Error(ErrorCode::CannotRemoveRoot, "the root argument cannot be removed");

    auto& siblings = node(*n.parent).children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), id));

    std::vector<ArgumentId> stack{id};
    std::size_t removed = 0;
    while (!stack.empty()) {
        auto current = std::move(stack.back());
        stack.pop_back();
        auto it = nodes_.find(current);
        for (const auto& c : it->second.children) stack.push_back(c);
        nodes_.erase(it);
        ++removed;
    }
    return removed;
}

std::size_t DebateTree::depth(const ArgumentId& id) const {
    std::size_t d = 0;
    const Node* n = &node(id);
    while (n->parent) {
        n = &node(*n->parent);
        ++d;
    }
    return d;
}

std::optional<RelationEdge> DebateTree::edge_of(const ArgumentId& id) const {
    const auto& n = node(id);
    if (!n.parent) return std::nullopt;
    return RelationEdge{id, *n.parent, n.relation};
}

RelationType DebateTree::set_relation(const ArgumentId& child, RelationType relation) {
    auto& n = node(child);
    if (!n.parent) throw Error(ErrorCode::NoParentEdge, "the root argument has no parent edge");
    auto previous = n.relation;
    n.relation = relation;
    return previous;
}

std::vector<ArgumentId> DebateTree::preorder() const {
    std::vector<ArgumentId> order;
    order.reserve(nodes_.size());
    std::vector<const ArgumentId*> stack{&root_};
    while (!stack.empty()) {
        const auto* id = stack.back();
        stack.pop_back();
        order.push_back(*id);
        const auto& kids = node(*id).children;
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(&*it);
    }
    return order;
}

std::vector<RelationEdge> DebateTree::edges() const {
    std::vector<RelationEdge> out;
    out.reserve(nodes_.size());
    for (const auto& id : preorder()) {
        if (auto e = edge_of(id)) out.push_back(std::move(*e));
    }
    return out;
}

std::optional<std::string> DebateTree::validate() const {
    if (!nodes_.contains(root_)) return "root is missing";
    if (node(root_).parent) return "root has a parent edge";
    for (const auto& [id, n] : nodes_) {
        if (n.arg.id != id) return "argument id mismatch for '" + id.value + "'";
        if (trim_text(n.arg.text).empty()) return "argument '" + id.value + "' has empty text";
        if (id == root_) continue;
        if (!n.parent) return "argument '" + id.value + "' has no parent edge";
        if (*n.parent == id) return "argument '" + id.value + "' is its own parent";
        auto pit = nodes_.find(*n.parent);
        if (pit == nodes_.end()) return "argument '" + id.value + "' points to a missing parent";
        const auto& kids = pit->second.children;
        if (std::count(kids.begin(), kids.end(), id) != 1) return "child list of '" + n.parent->value + "' is inconsistent";
    }
    // Connected and acyclic: a walk from the root reaches every node exactly once.
    std::set<ArgumentId> seen;
    std::vector<ArgumentId> stack{root_};
    while (!stack.empty()) {
        auto id = stack.back();
        stack.pop_back();
        if (!seen.insert(id).second) return "cycle through '" + id.value + "'";
        auto it = nodes_.find(id);
        if (it == nodes_.end()) return "dangling child '" + id.value + "'";
        for (const auto& c : it->second.children) stack.push_back(c);
    }
    if (seen.size() != nodes_.size()) return "tree is not connected";
    return std::nullopt;
}

bool same_structure(const DebateTree& a, const DebateTree& b) {
    if (a.size() != b.size()) return false;
    std::vector<std::pair<ArgumentId, ArgumentId>> stack{{a.root(), b.root()}};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        if (a.argument(x).text != b.argument(y).text) return false;
        auto ex = a.edge_of(x);
        auto ey = b.edge_of(y);
        if (ex.has_value() != ey.has_value()) return false;
        if (ex && ex->relation != ey->relation) return false;
        auto kx = a.children(x);
        auto ky = b.children(y);
        if (kx.size() != ky.size()) return false;
        for (std::size_t i = 0; i < kx.size(); ++i) stack.emplace_back(kx[i], ky[i]);
    }
    return true;
}

}  // namespace adbl2
