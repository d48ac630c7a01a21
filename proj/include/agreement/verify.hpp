#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "agreement/error.hpp"
#include "agreement/profile.hpp"
#include "agreement/xtree.hpp"

namespace agreement {

/// Constant-time LCA queries on a fixed tree (Euler tour + sparse table).
class LcaIndex {
public:
    explicit LcaIndex(const XTree& tree)
        : tin_(tree.size())
        , tout_(tree.size())
        , depth_(tree.size())
        , first_(tree.size())
    {
        if (tree.empty()) {
            return;
        }
        std::vector<std::pair<NodeIndex, std::size_t>> stack{{tree.root(), 0}};
        std::uint32_t clock = 0;
        tin_[tree.root()] = clock++;
        first_[tree.root()] = 0;
        euler_.push_back(tree.root());
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            if (next < tree.children(u).size()) {
                NodeIndex c = tree.children(u)[next++];
                depth_[c] = depth_[u] + 1;
                tin_[c] = clock++;
                first_[c] = static_cast<std::uint32_t>(euler_.size());
                euler_.push_back(c);
                stack.emplace_back(c, 0);
            } else {
                tout_[u] = clock;
                stack.pop_back();
                if (!stack.empty()) {
                    euler_.push_back(stack.back().first);
                }
            }
        }
        const std::size_t m = euler_.size();
        table_.push_back(euler_);
        for (std::size_t w = 1; (std::size_t{1} << w) <= m; ++w) {
            const std::size_t half = std::size_t{1} << (w - 1);
            std::vector<NodeIndex> row(m - (std::size_t{1} << w) + 1);
            for (std::size_t j = 0; j < row.size(); ++j) {
                row[j] = shallower(table_[w - 1][j], table_[w - 1][j + half]);
            }
            table_.push_back(std::move(row));
        }
    }

    NodeIndex lca(NodeIndex a, NodeIndex b) const
    {
        std::size_t l = first_[a];
        std::size_t r = first_[b];
        if (l > r) {
            std::swap(l, r);
        }
        const std::size_t w = std::bit_width(r - l + 1) - 1;
        return shallower(table_[w][l], table_[w][r - (std::size_t{1} << w) + 1]);
    }

    /// Ancestor-or-self test.
    bool is_ancestor(NodeIndex a, NodeIndex b) const { return tin_[a] <= tin_[b] && tout_[b] <= tout_[a]; }
    std::uint32_t tin(NodeIndex u) const { return tin_[u]; }

private:
    NodeIndex shallower(NodeIndex a, NodeIndex b) const { return depth_[a] <= depth_[b] ? a : b; }

    std::vector<std::uint32_t> tin_, tout_, depth_, first_;
    std::vector<NodeIndex> euler_;
    std::vector<std::vector<NodeIndex>> table_;
};

/// Per input node u, the candidate node LCA(X(u)). For a labeled node this is
/// the image of each of its labels.
using NodeEmbedding = std::vector<NodeIndex>;
using EmbeddingMap = std::unordered_map<LabelId, NodeIndex, LabelIdHash>;

namespace verify_detail {

inline NodeEmbedding embed_nodes(const XTree& input, const XTree& candidate, const LcaIndex& index)
{
    NodeEmbedding phi(input.size());
    for (NodeIndex u : input.postorder()) {
        std::optional<NodeIndex> acc;
        auto fold = [&](NodeIndex v) { acc = acc ? index.lca(*acc, v) : v; };
        for (LabelId l : input.labels_of(u)) {
            auto at = candidate.node_of(l);
            if (!at) {
                throw Error(ErrorCode::LabelNotCovered, "label id " + std::to_string(l.value) + " missing from candidate");
            }
            fold(*at);
        }
        for (NodeIndex c : input.children(u)) {
            fold(phi[c]);
        }
        if (!acc) {
            throw Error(ErrorCode::InvalidTree, "input tree has an unlabeled leaf");
        }
        phi[u] = *acc;
    }
    return phi;
}

inline void require_universe(const Profile& profile, const XTree& candidate)
{
    if (candidate.labels() != profile.label_universe()) {
        throw Error(ErrorCode::LabelUniverseMismatch, "candidate label set differs from the profile label set");
    }
}

} // namespace verify_detail

/// phi(a) = LCA of X_i(a) in the candidate, for every label a of the input.
inline EmbeddingMap compute_embedding(const XTree& input, const XTree& candidate)
{
    LcaIndex index(candidate);
    const auto phi = verify_detail::embed_nodes(input, candidate, index);
    EmbeddingMap out;
    for (NodeIndex u = 0; u < input.size(); ++u) {
        for (LabelId l : input.labels_of(u)) {
            out.emplace(l, phi[u]);
        }
    }
    return out;
}

inline bool verify_by_clusters(const Profile& profile, const XTree& candidate)
{
    verify_detail::require_universe(profile, candidate);
    for (const XTree& t : profile.trees()) {
        if (!trees_agree_on(candidate, t)) {
            return false;
        }
    }
    return true;
}

struct EmbeddingViolation {
    enum class Condition { E1, E2, E3 };
    std::size_t tree = 0;
    NodeIndex node = 0;
    Condition condition = Condition::E2;
};

/// Checks every input node u: its labels sit at phi(u) in the candidate,
/// each child maps strictly below
/// phi(u), and distinct children map into distinct child subtrees of phi(u).
/// Returns the first violation found, if any.
inline std::optional<EmbeddingViolation> find_embedding_violation(const Profile& profile, const XTree& candidate)
{
    verify_detail::require_universe(profile, candidate);
    LcaIndex index(candidate);
    std::vector<std::uint32_t> child_tins;
    std::vector<std::size_t> used;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const XTree& t = profile.tree(i);
        const auto phi = verify_detail::embed_nodes(t, candidate, index);
        for (NodeIndex u = 0; u < t.size(); ++u) {
            const NodeIndex image = phi[u];
            for (LabelId l : t.labels_of(u)) {
                if (*candidate.node_of(l) != image) {
                    return EmbeddingViolation{i, u, EmbeddingViolation::Condition::E1};
                }
            }
            if (t.children(u).empty()) {
                continue;
            }
            const auto cand_children = candidate.children(image);
            child_tins.clear();
            for (NodeIndex c : cand_children) {
                child_tins.push_back(index.tin(c));
            }
            used.clear();
            for (NodeIndex c : t.children(u)) {
                const NodeIndex below = phi[c];
                if (below == image || !index.is_ancestor(image, below)) {
                    return EmbeddingViolation{i, u, EmbeddingViolation::Condition::E2};
                }
                auto it = std::upper_bound(child_tins.begin(), child_tins.end(), index.tin(below));
                used.push_back(static_cast<std::size_t>(it - child_tins.begin()) - 1);
            }
            std::sort(used.begin(), used.end());
            if (std::adjacent_find(used.begin(), used.end()) != used.end()) {
                return EmbeddingViolation{i, u, EmbeddingViolation::Condition::E3};
            }
        }
    }
    return std::nullopt;
}

inline bool verify_by_embedding(const Profile& profile, const XTree& candidate)
{
    return !find_embedding_violation(profile, candidate).has_value();
}

} // namespace agreement
