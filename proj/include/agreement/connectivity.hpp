#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "agreement/error.hpp"

namespace agreement {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Decremental connectivity over a fixed vertex set. remove_edge returns the
/// vertices of the smaller side when the deletion disconnects the endpoints.
template <typename B>
concept ConnectivityBackend = requires(B b, const B cb, Vertex u, EdgeId e) {
    { cb.connected(u, u) } -> std::same_as<bool>;
    { b.remove_edge(e) } -> std::same_as<std::optional<std::vector<Vertex>>>;
    { cb.vertex_count() } -> std::same_as<std::size_t>;
};

/// Keeps only the alive adjacency. A deletion runs two interleaved searches
/// from the endpoints; the search that runs out first has found the smaller
/// side, so the work is proportional to that side.
class RescanConnectivity {
public:
    static constexpr const char* name = "rescan";

    RescanConnectivity(std::size_t n, const std::vector<Edge>& edges)
        : edges_(edges)
        , alive_(edges.size(), true)
        , adj_(n)
        , slot_(edges.size())
        , mark_(n, 0)
        , side_(n, 0)
    {
        for (EdgeId e = 0; e < edges_.size(); ++e) {
            auto [u, v] = edges_[e];
            slot_[e] = {static_cast<std::uint32_t>(adj_[u].size()), static_cast<std::uint32_t>(adj_[v].size())};
            adj_[u].push_back(e);
            adj_[v].push_back(e);
        }
    }

    std::size_t vertex_count() const { return adj_.size(); }

    bool connected(Vertex u, Vertex v) const
    {
        if (u == v) {
            return true;
        }
        return !search(u, v).has_value();
    }

    std::optional<std::vector<Vertex>> remove_edge(EdgeId e)
    {
        if (!alive_.at(e)) {
            throw Error(ErrorCode::AlreadyDeleted, "edge " + std::to_string(e) + " already deleted");
        }
        alive_[e] = false;
        auto [u, v] = edges_[e];
        detach(e, u, slot_[e].first);
        detach(e, v, slot_[e].second);
        if (u == v) {
            return std::nullopt;
        }
        return search(u, v);
    }

private:
    struct Frontier {
        std::vector<Vertex> seen;
        std::size_t head = 0;
    };

    void detach(EdgeId e, Vertex x, std::uint32_t pos)
    {
        auto& list = adj_[x];
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
    }

    // Nullopt if u and v are connected, else the vertex set of the smaller side.
    std::optional<std::vector<Vertex>> search(Vertex u, Vertex v) const
    {
        ++epoch_;
        Frontier f[2];
        f[0].seen.push_back(u);
        f[1].seen.push_back(v);
        mark_[u] = epoch_;
        side_[u] = 0;
        mark_[v] = epoch_;
        side_[v] = 1;
        for (;;) {
            for (int s = 0; s < 2; ++s) {
                Frontier& me = f[s];
                if (me.head == me.seen.size()) {
                    continue;
                }
                const Vertex x = me.seen[me.head++];
                for (EdgeId e : adj_[x]) {
                    const Vertex y = edges_[e].first == x ? edges_[e].second : edges_[e].first;
                    if (mark_[y] == epoch_) {
                        if (side_[y] != s) {
                            return std::nullopt;
                        }
                        continue;
                    }
                    mark_[y] = epoch_;
                    side_[y] = static_cast<std::uint8_t>(s);
                    me.seen.push_back(y);
                }
            }
            const bool done0 = f[0].head == f[0].seen.size();
            const bool done1 = f[1].head == f[1].seen.size();
            if (done0 && (done1 || f[1].seen.size() >= f[0].seen.size())) {
                return finish(f[0], f[1]);
            }
            if (done1 && f[0].seen.size() >= f[1].seen.size()) {
                return std::move(f[1].seen);
            }
        }
    }

    static std::optional<std::vector<Vertex>> finish(Frontier& a, Frontier& b)
    {
        if (b.head == b.seen.size() && b.seen.size() < a.seen.size()) {
            return std::move(b.seen);
        }
        return std::move(a.seen);
    }

    std::vector<Edge> edges_;
    std::vector<bool> alive_;
    std::vector<std::vector<EdgeId>> adj_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> slot_;
    mutable std::vector<std::uint32_t> mark_;
    mutable std::vector<std::uint8_t> side_;
    mutable std::uint32_t epoch_ = 0;
};

} // namespace agreement
