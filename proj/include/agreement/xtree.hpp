#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "agreement/error.hpp"
#include "agreement/label.hpp"

namespace agreement {

using NodeIndex = std::uint32_t;

struct XNode {
    std::optional<NodeIndex> parent;
    std::vector<NodeIndex> children;
    std::vector<LabelId> labels; // sorted
};

/// Rooted tree whose nodes carry (possibly empty) label sets. Nodes are only
/// ever appended below an existing node, so the structure is acyclic by
/// construction.
class XTree {
public:
    XTree() = default;

    NodeIndex add_node(std::optional<NodeIndex> parent, std::vector<LabelId> labels = {})
    {
        const auto index = static_cast<NodeIndex>(nodes_.size());
        if (parent) {
            if (*parent >= nodes_.size()) {
                throw Error(ErrorCode::InvalidTree, "parent node does not exist");
            }
        } else if (!nodes_.empty()) {
            throw Error(ErrorCode::InvalidTree, "tree already has a root");
        }
        std::sort(labels.begin(), labels.end());
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if ((j > 0 && labels[j] == labels[j - 1]) || node_of_.contains(labels[j])) {
                throw Error(ErrorCode::DuplicateLabel, "label id " + std::to_string(labels[j].value) + " used twice");
            }
        }
        for (LabelId l : labels) {
            node_of_.emplace(l, index);
        }
        nodes_.push_back(XNode{parent, {}, std::move(labels)});
        if (parent) {
            nodes_[*parent].children.push_back(index);
        }
        return index;
    }

    void add_label(NodeIndex node, LabelId label)
    {
        if (node_of_.contains(label)) {
            throw Error(ErrorCode::DuplicateLabel, "label id " + std::to_string(label.value) + " used twice");
        }
        auto& labels = nodes_.at(node).labels;
        labels.insert(std::upper_bound(labels.begin(), labels.end(), label), label);
        node_of_.emplace(label, node);
    }

    bool empty() const noexcept { return nodes_.empty(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    NodeIndex root() const noexcept { return 0; }

    const XNode& node(NodeIndex i) const { return nodes_[i]; }
    std::optional<NodeIndex> parent(NodeIndex i) const { return nodes_[i].parent; }
    std::span<const NodeIndex> children(NodeIndex i) const { return nodes_[i].children; }
    std::span<const LabelId> labels_of(NodeIndex i) const { return nodes_[i].labels; }

    std::optional<NodeIndex> node_of(LabelId label) const
    {
        if (auto it = node_of_.find(label); it != node_of_.end()) {
            return it->second;
        }
        return std::nullopt;
    }
    bool contains(LabelId label) const { return node_of_.contains(label); }
    std::size_t label_count() const noexcept { return node_of_.size(); }

    /// All labels of the tree, sorted.
    std::vector<LabelId> labels() const
    {
        std::vector<LabelId> out;
        out.reserve(node_of_.size());
        for (const auto& [label, node] : node_of_) {
            out.push_back(label);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<NodeIndex> preorder() const
    {
        std::vector<NodeIndex> order;
        if (nodes_.empty()) {
            return order;
        }
        order.reserve(nodes_.size());
        std::vector<NodeIndex> stack{root()};
        while (!stack.empty()) {
            NodeIndex u = stack.back();
            stack.pop_back();
            order.push_back(u);
            const auto& ch = nodes_[u].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
                stack.push_back(*it);
            }
        }
        return order;
    }

    std::vector<NodeIndex> postorder() const
    {
        std::vector<NodeIndex> order;
        if (nodes_.empty()) {
            return order;
        }
        order.reserve(nodes_.size());
        std::vector<std::pair<NodeIndex, std::size_t>> stack{{root(), 0}};
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            if (next < nodes_[u].children.size()) {
                NodeIndex c = nodes_[u].children[next++];
                stack.emplace_back(c, 0);
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
        return order;
    }

    /// Structural X-tree check: leaves and single-child nodes must be labeled.
    bool is_valid() const
    {
        if (nodes_.empty()) {
            return false;
        }
        for (const auto& n : nodes_) {
            if (n.children.size() < 2 && n.labels.empty()) {
                return false;
            }
        }
        return true;
    }

    void validate() const
    {
        if (nodes_.empty()) {
            throw Error(ErrorCode::InvalidTree, "empty tree");
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].children.size() < 2 && nodes_[i].labels.empty()) {
                throw Error(ErrorCode::InvalidTree,
                    "node " + std::to_string(i) + " has fewer than two children and no label");
            }
        }
    }

    /// Reorders children by the minimum label id in their subtrees and
    /// renumbers nodes in preorder.
    void canonicalize()
    {
        if (nodes_.empty()) {
            return;
        }
        std::vector<std::uint32_t> min_label(nodes_.size(), std::numeric_limits<std::uint32_t>::max());
        for (NodeIndex u : postorder()) {
            auto& n = nodes_[u];
            if (!n.labels.empty()) {
                min_label[u] = n.labels.front().value;
            }
            for (NodeIndex c : n.children) {
                min_label[u] = std::min(min_label[u], min_label[c]);
            }
        }
        for (auto& n : nodes_) {
            std::stable_sort(n.children.begin(), n.children.end(),
                [&](NodeIndex a, NodeIndex b) { return min_label[a] < min_label[b]; });
        }
        const auto order = preorder();
        std::vector<NodeIndex> renumber(nodes_.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            renumber[order[i]] = static_cast<NodeIndex>(i);
        }
        std::vector<XNode> fresh(nodes_.size());
        for (std::size_t old = 0; old < nodes_.size(); ++old) {
            auto& n = fresh[renumber[old]];
            n.labels = std::move(nodes_[old].labels);
            if (nodes_[old].parent) {
                n.parent = renumber[*nodes_[old].parent];
            }
            for (NodeIndex c : nodes_[old].children) {
                n.children.push_back(renumber[c]);
            }
        }
        nodes_ = std::move(fresh);
        for (auto& [label, node] : node_of_) {
            node = renumber[node];
        }
    }

private:
    std::vector<XNode> nodes_;
    std::unordered_map<LabelId, NodeIndex, LabelIdHash> node_of_;
};

using Cluster = std::vector<LabelId>;
/// Sorted, duplicate-free list of sorted clusters.
using ClusterSet = std::vector<Cluster>;

inline ClusterSet normalized(ClusterSet set)
{
    for (auto& c : set) {
        std::sort(c.begin(), c.end());
    }
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

/// Cluster of every node, indexed by node.
inline std::vector<Cluster> node_clusters(const XTree& tree)
{
    std::vector<Cluster> out(tree.size());
    for (NodeIndex u : tree.postorder()) {
        Cluster c(tree.labels_of(u).begin(), tree.labels_of(u).end());
        for (NodeIndex child : tree.children(u)) {
            Cluster merged;
            merged.reserve(c.size() + out[child].size());
            std::merge(c.begin(), c.end(), out[child].begin(), out[child].end(), std::back_inserter(merged));
            c = std::move(merged);
        }
        out[u] = std::move(c);
    }
    return out;
}

inline Cluster cluster_of(const XTree& tree, NodeIndex u)
{
    Cluster c;
    std::vector<NodeIndex> stack{u};
    while (!stack.empty()) {
        NodeIndex v = stack.back();
        stack.pop_back();
        c.insert(c.end(), tree.labels_of(v).begin(), tree.labels_of(v).end());
        for (NodeIndex w : tree.children(v)) {
            stack.push_back(w);
        }
    }
    std::sort(c.begin(), c.end());
    return c;
}

inline ClusterSet clusters(const XTree& tree)
{
    return normalized(node_clusters(tree));
}

/// Subtree induced by the labels accepted by `keep`: other labels are dropped,
/// unlabeled leaves removed and unlabeled single-child nodes spliced out.
/// Returns an empty tree if no label is kept.
template <typename Pred>
XTree induced_tree(const XTree& tree, Pred keep)
{
    constexpr NodeIndex none = std::numeric_limits<NodeIndex>::max();
    std::vector<NodeIndex> rep(tree.size(), none);
    std::vector<std::vector<LabelId>> kept(tree.size());
    for (NodeIndex u : tree.postorder()) {
        for (LabelId l : tree.labels_of(u)) {
            if (keep(l)) {
                kept[u].push_back(l);
            }
        }
        std::size_t live_children = 0;
        NodeIndex last = none;
        for (NodeIndex c : tree.children(u)) {
            if (rep[c] != none) {
                ++live_children;
                last = rep[c];
            }
        }
        if (!kept[u].empty() || live_children >= 2) {
            rep[u] = u;
        } else if (live_children == 1) {
            rep[u] = last;
        }
    }
    XTree out;
    if (tree.empty() || rep[tree.root()] == none) {
        return out;
    }
    std::vector<std::pair<NodeIndex, std::optional<NodeIndex>>> stack{{rep[tree.root()], std::nullopt}};
    while (!stack.empty()) {
        auto [old, parent] = stack.back();
        stack.pop_back();
        NodeIndex fresh = out.add_node(parent, kept[old]);
        const auto ch = tree.children(old);
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
            if (rep[*it] != none) {
                stack.emplace_back(rep[*it], fresh);
            }
        }
    }
    return out;
}

/// Restriction of `tree` to the label set `keep` (need not be sorted).
inline XTree restrict_to(const XTree& tree, std::span<const LabelId> keep)
{
    std::unordered_set<LabelId, LabelIdHash> wanted(keep.begin(), keep.end());
    XTree out = induced_tree(tree, [&](LabelId l) { return wanted.contains(l); });
    if (out.empty()) {
        throw Error(ErrorCode::EmptyRestriction, "restriction label set misses the tree");
    }
    return out;
}

/// Deepest common ancestor of a non-empty node set.
inline NodeIndex lca(const XTree& tree, std::span<const NodeIndex> nodes)
{
    if (nodes.empty()) {
        throw Error(ErrorCode::InvalidTree, "lca of an empty set");
    }
    auto depth_of = [&](NodeIndex u) {
        std::size_t d = 0;
        while (auto p = tree.parent(u)) {
            u = *p;
            ++d;
        }
        return d;
    };
    NodeIndex acc = nodes.front();
    std::size_t acc_depth = depth_of(acc);
    for (NodeIndex v : nodes.subspan(1)) {
        std::size_t v_depth = depth_of(v);
        while (v_depth > acc_depth) {
            v = *tree.parent(v);
            --v_depth;
        }
        while (acc_depth > v_depth) {
            acc = *tree.parent(acc);
            --acc_depth;
        }
        while (acc != v) {
            acc = *tree.parent(acc);
            v = *tree.parent(v);
            --acc_depth;
        }
    }
    return acc;
}

inline NodeIndex lca_of_labels(const XTree& tree, std::span<const LabelId> labels)
{
    std::vector<NodeIndex> nodes;
    nodes.reserve(labels.size());
    for (LabelId l : labels) {
        auto n = tree.node_of(l);
        if (!n) {
            throw Error(ErrorCode::LabelNotCovered, "label id " + std::to_string(l.value) + " not in tree");
        }
        nodes.push_back(*n);
    }
    return lca(tree, nodes);
}

/// True iff `supertree` restricted to the labels of `input` has exactly the
/// clusters of `input`.
inline bool trees_agree_on(const XTree& supertree, const XTree& input)
{
    const auto input_labels = input.labels();
    for (LabelId l : input_labels) {
        if (!supertree.contains(l)) {
            throw Error(ErrorCode::LabelNotCovered, "label id " + std::to_string(l.value) + " missing from supertree");
        }
    }
    return clusters(restrict_to(supertree, input_labels)) == clusters(input);
}

} // namespace agreement
