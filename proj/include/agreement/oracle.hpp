#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "agreement/error.hpp"
#include "agreement/profile.hpp"
#include "agreement/verify.hpp"
#include "agreement/xtree.hpp"

namespace agreement {

constexpr std::size_t kDefaultOracleCap = 6;

/// Calls visit(tree) for every rooted tree whose nodes are the blocks of a set
/// partition of `labels`. Order: set partitions as restricted growth strings,
/// then root block, then parent arrays as an odometer. visit returns false to
/// stop. Returns the number of candidates visited.
inline std::uint64_t for_each_candidate(const std::vector<LabelId>& labels, const std::function<bool(const XTree&)>& visit,
    std::size_t cap = kDefaultOracleCap)
{
    const std::size_t n = labels.size();
    if (n > cap) {
        throw Error(ErrorCode::CapExceeded, std::to_string(n) + " labels exceed the oracle cap of " + std::to_string(cap));
    }
    if (n == 0) {
        return 0;
    }
    std::uint64_t visited = 0;
    std::vector<std::uint32_t> rgs(n, 0);
    std::vector<std::uint32_t> prefix_max(n, 0);
    std::vector<std::vector<LabelId>> blocks;
    std::vector<std::uint32_t> parent;
    std::vector<std::uint8_t> state;
    std::vector<std::uint32_t> order;
    for (;;) {
        const std::uint32_t b = prefix_max[n - 1] + 1;
        blocks.assign(b, {});
        for (std::size_t j = 0; j < n; ++j) {
            blocks[rgs[j]].push_back(labels[j]);
        }
        for (std::uint32_t root = 0; root < b; ++root) {
            parent.assign(b, 0);
            parent[root] = root;
            for (;;) {
                // Acyclic iff every block reaches the root.
                state.assign(b, 0);
                state[root] = 2;
                bool ok = true;
                for (std::uint32_t s = 0; s < b && ok; ++s) {
                    std::uint32_t x = s;
                    std::vector<std::uint32_t> path;
                    while (state[x] == 0) {
                        state[x] = 1;
                        path.push_back(x);
                        x = parent[x];
                    }
                    if (state[x] == 1) {
                        ok = false;
                    }
                    for (std::uint32_t y : path) {
                        state[y] = 2;
                    }
                }
                bool self_loop = false;
                for (std::uint32_t s = 0; s < b; ++s) {
                    if (s != root && parent[s] == s) {
                        self_loop = true;
                    }
                }
                if (ok && !self_loop) {
                    XTree t;
                    std::vector<NodeIndex> node_of_block(b);
                    order.assign(1, root);
                    node_of_block[root] = t.add_node(std::nullopt, blocks[root]);
                    for (std::size_t h = 0; h < order.size(); ++h) {
                        for (std::uint32_t s = 0; s < b; ++s) {
                            if (s != root && parent[s] == order[h]) {
                                node_of_block[s] = t.add_node(node_of_block[order[h]], blocks[s]);
                                order.push_back(s);
                            }
                        }
                    }
                    ++visited;
                    if (!visit(t)) {
                        return visited;
                    }
                }
                // Odometer over the non-root entries.
                std::uint32_t s = 0;
                for (; s < b; ++s) {
                    if (s == root) {
                        continue;
                    }
                    if (++parent[s] < b) {
                        break;
                    }
                    parent[s] = 0;
                }
                if (s == b) {
                    break;
                }
            }
        }
        // Next restricted growth string.
        std::size_t j = n;
        while (j-- > 1) {
            if (rgs[j] <= prefix_max[j - 1]) {
                ++rgs[j];
                prefix_max[j] = std::max(prefix_max[j - 1], rgs[j]);
                for (std::size_t t = j + 1; t < n; ++t) {
                    rgs[t] = 0;
                    prefix_max[t] = prefix_max[j];
                }
                break;
            }
        }
        if (j == 0) {
            return visited;
        }
    }
}

inline std::vector<XTree> enumerate_candidates(const std::vector<LabelId>& labels, std::size_t cap = kDefaultOracleCap)
{
    std::vector<XTree> out;
    for_each_candidate(labels, [&](const XTree& t) {
        out.push_back(t);
        return true;
    }, cap);
    return out;
}

/// First candidate over X_P that agrees with every tree, or nothing.
inline std::optional<XTree> brute_force_agreement(const Profile& profile, std::size_t cap = kDefaultOracleCap)
{
    const auto& universe = profile.label_universe();
    if (universe.size() > cap) {
        throw Error(ErrorCode::CapExceeded,
            std::to_string(universe.size()) + " labels exceed the oracle cap of " + std::to_string(cap));
    }
    std::vector<ClusterSet> wanted;
    std::vector<std::vector<LabelId>> tree_labels;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        wanted.push_back(clusters(profile.tree(i)));
        tree_labels.push_back(profile.tree_labels(i));
    }
    std::optional<XTree> found;
    for_each_candidate(universe, [&](const XTree& t) {
        for (std::size_t i = 0; i < wanted.size(); ++i) {
            if (clusters(restrict_to(t, tree_labels[i])) != wanted[i]) {
                return true;
            }
        }
        found = t;
        return false;
    }, cap);
    return found;
}

} // namespace agreement
