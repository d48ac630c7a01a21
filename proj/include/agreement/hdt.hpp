#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "agreement/connectivity.hpp"
#include "agreement/error.hpp"

namespace agreement {

namespace hdt_detail {

constexpr std::uint8_t kHasNonTree = 1; // vertex node: has non-tree edges at this level
constexpr std::uint8_t kLevelEdge = 2;  // arc node: its tree edge lives exactly at this level

struct Node {
    std::uint32_t left = 0, right = 0, parent = 0;
    std::uint32_t prio = 0;
    std::uint32_t count = 1;
    std::uint32_t vsize = 0;
    std::uint8_t self = 0, agg = 0;
    bool is_vertex = false;
    std::uint32_t id = 0; // vertex or edge id
};

/// Pool of implicit treap nodes; index 0 is the null node. Every Euler tour
/// of every level lives in this one pool.
class TourPool {
public:
    explicit TourPool(std::uint64_t seed) : rng_(seed) { nodes_.emplace_back(); nodes_[0].count = 0; }

    std::uint32_t make(bool is_vertex, std::uint32_t id)
    {
        std::uint32_t x;
        if (!free_.empty()) {
            x = free_.back();
            free_.pop_back();
            nodes_[x] = Node{};
        } else {
            x = static_cast<std::uint32_t>(nodes_.size());
            nodes_.emplace_back();
        }
        Node& n = nodes_[x];
        n.prio = static_cast<std::uint32_t>(rng_());
        n.is_vertex = is_vertex;
        n.vsize = is_vertex ? 1 : 0;
        n.id = id;
        return x;
    }

    void release(std::uint32_t x) { free_.push_back(x); }

    Node& operator[](std::uint32_t x) { return nodes_[x]; }
    const Node& operator[](std::uint32_t x) const { return nodes_[x]; }

    void pull(std::uint32_t x)
    {
        Node& n = nodes_[x];
        const Node& l = nodes_[n.left];
        const Node& r = nodes_[n.right];
        n.count = 1 + l.count + r.count;
        n.vsize = (n.is_vertex ? 1 : 0) + l.vsize + r.vsize;
        n.agg = n.self | l.agg | r.agg;
    }

    std::uint32_t root(std::uint32_t x) const
    {
        while (nodes_[x].parent) {
            x = nodes_[x].parent;
        }
        return x;
    }

    // (root, position of x in its sequence)
    std::pair<std::uint32_t, std::uint32_t> locate(std::uint32_t x) const
    {
        std::uint32_t i = nodes_[nodes_[x].left].count;
        while (nodes_[x].parent) {
            const std::uint32_t p = nodes_[x].parent;
            if (nodes_[p].right == x) {
                i += nodes_[nodes_[p].left].count + 1;
            }
            x = p;
        }
        return {x, i};
    }

    void set_flag(std::uint32_t x, std::uint8_t bit, bool on)
    {
        Node& n = nodes_[x];
        const std::uint8_t want = on ? (n.self | bit) : (n.self & ~bit);
        if (want == n.self) {
            return;
        }
        n.self = want;
        for (; x; x = nodes_[x].parent) {
            pull(x);
        }
    }

    // First k nodes go left.
    std::pair<std::uint32_t, std::uint32_t> split(std::uint32_t t, std::uint32_t k)
    {
        if (!t) {
            return {0, 0};
        }
        nodes_[t].parent = 0;
        std::uint32_t l = nodes_[t].left;
        if (nodes_[l].count >= k) {
            auto [a, b] = split(l, k);
            nodes_[t].left = b;
            if (b) {
                nodes_[b].parent = t;
            }
            pull(t);
            if (a) {
                nodes_[a].parent = 0;
            }
            return {a, t};
        }
        auto [a, b] = split(nodes_[t].right, k - nodes_[l].count - 1);
        nodes_[t].right = a;
        if (a) {
            nodes_[a].parent = t;
        }
        pull(t);
        if (b) {
            nodes_[b].parent = 0;
        }
        return {t, b};
    }

    std::uint32_t merge(std::uint32_t a, std::uint32_t b)
    {
        if (!a || !b) {
            const std::uint32_t r = a ? a : b;
            if (r) {
                nodes_[r].parent = 0;
            }
            return r;
        }
        if (nodes_[a].prio > nodes_[b].prio) {
            const std::uint32_t r = merge(nodes_[a].right, b);
            nodes_[a].right = r;
            nodes_[r].parent = a;
            pull(a);
            nodes_[a].parent = 0;
            return a;
        }
        const std::uint32_t l = merge(a, nodes_[b].left);
        nodes_[b].left = l;
        nodes_[l].parent = b;
        pull(b);
        nodes_[b].parent = 0;
        return b;
    }

    // Some node in the subtree of t whose own flags contain bit, or 0.
    std::uint32_t find_flagged(std::uint32_t t, std::uint8_t bit) const
    {
        if (!(nodes_[t].agg & bit)) {
            return 0;
        }
        for (;;) {
            const Node& n = nodes_[t];
            if (n.self & bit) {
                return t;
            }
            t = (nodes_[n.left].agg & bit) ? n.left : n.right;
        }
    }

    void collect_vertices(std::uint32_t t, std::vector<Vertex>& out) const
    {
        std::vector<std::uint32_t> stack;
        if (t) {
            stack.push_back(t);
        }
        while (!stack.empty()) {
            const std::uint32_t x = stack.back();
            stack.pop_back();
            const Node& n = nodes_[x];
            if (n.is_vertex) {
                out.push_back(n.id);
            }
            if (n.left) {
                stack.push_back(n.left);
            }
            if (n.right) {
                stack.push_back(n.right);
            }
        }
    }

private:
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_;
    std::mt19937 rng_;
};

} // namespace hdt_detail

/// Poly-logarithmic amortized decremental connectivity: a spanning forest per
/// level kept as Euler tours in treaps, edge levels that only increase, and
/// replacement search from the smaller tree.
class HdtConnectivity {
public:
    static constexpr const char* name = "hdt";

    HdtConnectivity(std::size_t n, const std::vector<Edge>& edges, std::uint64_t seed = 0x9e3779b97f4a7c15ULL)
        : n_(n)
        , edges_(edges)
        , level_(edges.size(), 0)
        , tree_(edges.size(), false)
        , alive_(edges.size(), true)
        , arcs_(edges.size())
        , slot_(edges.size())
        , pool_(seed)
    {
        ensure_level(0);
        std::vector<Vertex> uf(n);
        std::iota(uf.begin(), uf.end(), 0);
        auto find = [&](Vertex x) {
            while (uf[x] != x) {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            return x;
        };
        for (EdgeId e = 0; e < edges_.size(); ++e) {
            auto [u, v] = edges_[e];
            const Vertex a = find(u);
            const Vertex b = find(v);
            if (a != b) {
                uf[a] = b;
                tree_[e] = true;
                link(e, 0);
                pool_.set_flag(arcs_[e][0], hdt_detail::kLevelEdge, true);
            } else if (u != v) {
                add_nontree(e, 0);
            }
        }
    }

    std::size_t vertex_count() const { return n_; }

    bool connected(Vertex u, Vertex v) const
    {
        if (u == v) {
            return true;
        }
        const std::uint32_t a = vnode_[0][u];
        const std::uint32_t b = vnode_[0][v];
        return a && b && pool_.root(a) == pool_.root(b);
    }

    std::optional<std::vector<Vertex>> remove_edge(EdgeId e)
    {
        if (!alive_.at(e)) {
            throw Error(ErrorCode::AlreadyDeleted, "edge " + std::to_string(e) + " already deleted");
        }
        alive_[e] = false;
        auto [u, v] = edges_[e];
        if (u == v) {
            return std::nullopt;
        }
        const std::uint32_t lev = level_[e];
        if (!tree_[e]) {
            remove_nontree(e);
            return std::nullopt;
        }
        for (std::uint32_t i = 0; i <= lev; ++i) {
            cut(e, i);
        }
        tree_[e] = false;
        for (std::uint32_t i = lev + 1; i-- > 0;) {
            if (replace(u, v, i)) {
                return std::nullopt;
            }
        }
        const std::uint32_t ru = pool_.root(vertex_node(0, u));
        const std::uint32_t rv = pool_.root(vertex_node(0, v));
        const std::uint32_t small = pool_[ru].vsize <= pool_[rv].vsize ? ru : rv;
        std::vector<Vertex> side;
        side.reserve(pool_[small].vsize);
        pool_.collect_vertices(small, side);
        return side;
    }

    std::uint32_t level_count() const { return static_cast<std::uint32_t>(vnode_.size()); }

private:
    void ensure_level(std::uint32_t i)
    {
        while (vnode_.size() <= i) {
            vnode_.emplace_back(n_, 0);
            nontree_.emplace_back(n_);
        }
    }

    std::uint32_t vertex_node(std::uint32_t i, Vertex v)
    {
        ensure_level(i);
        std::uint32_t& x = vnode_[i][v];
        if (!x) {
            x = pool_.make(true, v);
            if (!nontree_[i][v].empty()) {
                pool_.set_flag(x, hdt_detail::kHasNonTree, true);
            }
        }
        return x;
    }

    // v's tour, rotated to start at v, goes right after u's vertex node.
    void link(EdgeId e, std::uint32_t i)
    {
        auto [u, v] = edges_[e];
        const std::uint32_t xv = vertex_node(i, v);
        const auto [ru, pu] = pool_.locate(vertex_node(i, u));
        const auto [rv, pv] = pool_.locate(xv);
        auto [before_v, from_v] = pool_.split(rv, pv);
        const std::uint32_t tv = pool_.merge(from_v, before_v);
        const std::uint32_t a1 = pool_.make(false, e);
        const std::uint32_t a2 = pool_.make(false, e);
        auto& arcs = arcs_[e];
        if (arcs.size() < 2 * (i + 1)) {
            arcs.resize(2 * (i + 1), 0);
        }
        arcs[2 * i] = a1;
        arcs[2 * i + 1] = a2;
        auto [left, right] = pool_.split(ru, pu + 1);
        pool_.merge(pool_.merge(pool_.merge(pool_.merge(left, a1), tv), a2), right);
    }

    void cut(EdgeId e, std::uint32_t i)
    {
        std::uint32_t a1 = arcs_[e][2 * i];
        std::uint32_t a2 = arcs_[e][2 * i + 1];
        auto [r, p1] = pool_.locate(a1);
        std::uint32_t p2 = pool_.locate(a2).second;
        if (p1 > p2) {
            std::swap(p1, p2);
            std::swap(a1, a2);
        }
        auto [left, rest] = pool_.split(r, p1);
        auto [first_arc, rest2] = pool_.split(rest, 1);
        auto [middle, rest3] = pool_.split(rest2, p2 - p1 - 1);
        auto [second_arc, right] = pool_.split(rest3, 1);
        (void)middle;
        pool_.merge(left, right);
        pool_.release(first_arc);
        pool_.release(second_arc);
        arcs_[e][2 * i] = 0;
        arcs_[e][2 * i + 1] = 0;
    }

    void add_nontree(EdgeId e, std::uint32_t i)
    {
        ensure_level(i);
        level_[e] = i;
        auto [u, v] = edges_[e];
        auto push = [&](Vertex x) {
            auto& list = nontree_[i][x];
            list.push_back(e);
            if (list.size() == 1 && vnode_[i][x]) {
                pool_.set_flag(vnode_[i][x], hdt_detail::kHasNonTree, true);
            }
            return static_cast<std::uint32_t>(list.size() - 1);
        };
        slot_[e] = {push(u), push(v)};
    }

    void remove_nontree(EdgeId e)
    {
        const std::uint32_t i = level_[e];
        auto [u, v] = edges_[e];
        auto drop = [&](Vertex x, std::uint32_t pos) {
            auto& list = nontree_[i][x];
            const EdgeId last = list.back();
            list[pos] = last;
            list.pop_back();
            if (last != e) {
                auto& s = slot_[last];
                if (edges_[last].first == x && s.first == list.size()) {
                    s.first = pos;
                } else {
                    s.second = pos;
                }
            }
            if (list.empty() && vnode_[i][x]) {
                pool_.set_flag(vnode_[i][x], hdt_detail::kHasNonTree, false);
            }
        };
        drop(u, slot_[e].first);
        drop(v, slot_[e].second);
    }

    void make_tree(EdgeId f, std::uint32_t i)
    {
        tree_[f] = true;
        level_[f] = i;
        for (std::uint32_t j = 0; j <= i; ++j) {
            link(f, j);
        }
        pool_.set_flag(arcs_[f][2 * i], hdt_detail::kLevelEdge, true);
    }

    // Looks for a replacement edge at level i after the tree edge between u
    // and v was cut. Pushes the smaller tree's level-i edges one level up.
    bool replace(Vertex u, Vertex v, std::uint32_t i)
    {
        const std::uint32_t ru = pool_.root(vertex_node(i, u));
        const std::uint32_t rv = pool_.root(vertex_node(i, v));
        std::uint32_t small = pool_[ru].vsize <= pool_[rv].vsize ? ru : rv;
        if (!(pool_[small].agg & hdt_detail::kHasNonTree)) {
            return false;
        }

        bool promoted = false;
        for (;;) {
            const std::uint32_t x = pool_.find_flagged(small, hdt_detail::kHasNonTree);
            if (!x) {
                return false;
            }
            const Vertex w = pool_[x].id;
            while (!nontree_[i][w].empty()) {
                const EdgeId f = nontree_[i][w].back();
                const Vertex y = edges_[f].first == w ? edges_[f].second : edges_[f].first;
                remove_nontree(f);
                if (pool_.root(vertex_node(i, y)) != small) {
                    make_tree(f, i);
                    return true;
                }
                if (!promoted) {
                    promote_tree_edges(small, i);
                    promoted = true;
                }
                add_nontree(f, i + 1);
            }
        }
    }

    void promote_tree_edges(std::uint32_t small, std::uint32_t i)
    {
        std::vector<EdgeId>& promote = promote_;
        promote.clear();
        for (;;) {
            const std::uint32_t arc = pool_.find_flagged(small, hdt_detail::kLevelEdge);
            if (!arc) {
                break;
            }
            const EdgeId f = pool_[arc].id;
            pool_.set_flag(arc, hdt_detail::kLevelEdge, false);
            promote.push_back(f);
        }
        ensure_level(i + 1);
        for (EdgeId f : promote) {
            level_[f] = i + 1;
            link(f, i + 1);
            pool_.set_flag(arcs_[f][2 * (i + 1)], hdt_detail::kLevelEdge, true);
        }
    }

    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> level_;
    std::vector<bool> tree_;
    std::vector<bool> alive_;
    std::vector<std::vector<std::uint32_t>> arcs_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> slot_;
    std::vector<std::vector<std::uint32_t>> vnode_;
    std::vector<std::vector<std::vector<EdgeId>>> nontree_;
    hdt_detail::TourPool pool_;
    std::vector<EdgeId> promote_;
};

} // namespace agreement
