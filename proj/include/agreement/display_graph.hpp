#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "agreement/connectivity.hpp"
#include "agreement/error.hpp"
#include "agreement/hdt.hpp"
#include "agreement/profile.hpp"

namespace agreement {

using ComponentId = std::uint32_t;

struct SplitEvent {
    ComponentId kept = 0;          // id that stays with the larger side
    ComponentId fresh = 0;         // id given to the smaller side
    std::vector<LabelId> smaller;  // vertices of the smaller side
};

struct DisplayGraphStats {
    std::uint64_t edges_deleted = 0;
    std::uint64_t vertices_deleted = 0;
    std::uint64_t splits = 0;
    std::uint64_t relabeled = 0;
    std::uint32_t max_deletions_per_edge = 0;
};

/// Union of the profile's trees with equal labels identified and parallel
/// edges collapsed. Supports deleting labels; component ids are kept current.
template <ConnectivityBackend Backend = HdtConnectivity>
class DisplayGraph {
public:
    static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

    explicit DisplayGraph(const Profile& profile)
        : vertex_of_(profile.table().size(), none)
    {
        const auto& universe = profile.label_universe();
        label_of_ = universe;
        for (Vertex v = 0; v < universe.size(); ++v) {
            vertex_of_[universe[v].value] = v;
        }
        std::vector<std::uint64_t> keys;
        for (const XTree& t : profile.trees()) {
            for (NodeIndex u = 0; u < t.size(); ++u) {
                if (t.labels_of(u).size() != 1) {
                    throw Error(ErrorCode::InvalidProfile, "display graph needs singly labeled trees");
                }
                if (auto p = t.parent(u)) {
                    Vertex a = vertex_of_[t.labels_of(*p).front().value];
                    Vertex b = vertex_of_[t.labels_of(u).front().value];
                    if (a > b) {
                        std::swap(a, b);
                    }
                    keys.push_back((std::uint64_t{a} << 32) | b);
                }
            }
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        edges_.reserve(keys.size());
        incident_.resize(universe.size());
        for (std::uint64_t key : keys) {
            const auto e = static_cast<EdgeId>(edges_.size());
            const auto a = static_cast<Vertex>(key >> 32);
            const auto b = static_cast<Vertex>(key & 0xffffffffu);
            edges_.emplace_back(a, b);
            incident_[a].push_back(e);
            incident_[b].push_back(e);
        }
        edge_alive_.assign(edges_.size(), true);
        deletions_.assign(edges_.size(), 0);
        vertex_alive_.assign(universe.size(), true);
        backend_.emplace(universe.size(), edges_);

        component_.assign(universe.size(), none);
        std::vector<Vertex> queue;
        for (Vertex s = 0; s < universe.size(); ++s) {
            if (component_[s] != none) {
                continue;
            }
            const ComponentId id = next_id_++;
            component_[s] = id;
            queue.assign(1, s);
            for (std::size_t h = 0; h < queue.size(); ++h) {
                for (EdgeId e : incident_[queue[h]]) {
                    const Vertex w = other(e, queue[h]);
                    if (component_[w] == none) {
                        component_[w] = id;
                        queue.push_back(w);
                    }
                }
            }
        }
    }

    std::size_t vertex_count() const { return label_of_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    LabelId label_of(Vertex v) const { return label_of_[v]; }

    std::optional<Vertex> vertex_of(LabelId l) const
    {
        if (l.value >= vertex_of_.size() || vertex_of_[l.value] == none) {
            return std::nullopt;
        }
        return vertex_of_[l.value];
    }

    bool is_alive(LabelId l) const
    {
        auto v = vertex_of(l);
        return v && vertex_alive_[*v];
    }

    bool edge_alive(EdgeId e) const { return edge_alive_[e]; }

    /// Deletes every alive edge at the label, then the label itself.
    std::vector<SplitEvent> delete_label(LabelId l)
    {
        const Vertex v = alive_vertex(l, ErrorCode::AlreadyDeleted);
        std::vector<SplitEvent> events;
        for (EdgeId e : incident_[v]) {
            if (!edge_alive_[e]) {
                continue;
            }
            edge_alive_[e] = false;
            ++deletions_[e];
            stats_.max_deletions_per_edge = std::max(stats_.max_deletions_per_edge, deletions_[e]);
            ++stats_.edges_deleted;
            if (auto side = backend_->remove_edge(e)) {
                ++stats_.splits;
                SplitEvent ev;
                ev.kept = component_[(*side)[0]];
                ev.fresh = next_id_++;
                ev.smaller.reserve(side->size());
                for (Vertex w : *side) {
                    component_[w] = ev.fresh;
                    ev.smaller.push_back(label_of_[w]);
                }
                stats_.relabeled += side->size();
                events.push_back(std::move(ev));
            }
        }
        vertex_alive_[v] = false;
        ++stats_.vertices_deleted;
        return events;
    }

    bool same_component(LabelId a, LabelId b) const
    {
        return component_[alive_vertex(a, ErrorCode::DeadVertex)] == component_[alive_vertex(b, ErrorCode::DeadVertex)];
    }

    ComponentId component_of(LabelId l) const { return component_[alive_vertex(l, ErrorCode::DeadVertex)]; }

    /// Alive vertices grouped by component, each group sorted, groups sorted.
    std::vector<std::vector<LabelId>> components() const
    {
        std::vector<std::pair<ComponentId, LabelId>> pairs;
        for (Vertex v = 0; v < label_of_.size(); ++v) {
            if (vertex_alive_[v]) {
                pairs.emplace_back(component_[v], label_of_[v]);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<std::vector<LabelId>> out;
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            if (j == 0 || pairs[j].first != pairs[j - 1].first) {
                out.emplace_back();
            }
            out.back().push_back(pairs[j].second);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    const DisplayGraphStats& stats() const { return stats_; }
    const Backend& backend() const { return *backend_; }

private:
    Vertex other(EdgeId e, Vertex v) const { return edges_[e].first == v ? edges_[e].second : edges_[e].first; }

    Vertex alive_vertex(LabelId l, ErrorCode code) const
    {
        auto v = vertex_of(l);
        if (!v) {
            throw Error(ErrorCode::DeadVertex, "label id " + std::to_string(l.value) + " is not a graph vertex");
        }
        if (!vertex_alive_[*v]) {
            throw Error(code, "label id " + std::to_string(l.value) + " already deleted");
        }
        return *v;
    }

    std::vector<Vertex> vertex_of_;
    std::vector<LabelId> label_of_;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> incident_;
    std::vector<bool> edge_alive_;
    std::vector<std::uint32_t> deletions_;
    std::vector<bool> vertex_alive_;
    std::vector<ComponentId> component_;
    ComponentId next_id_ = 0;
    std::optional<Backend> backend_;
    DisplayGraphStats stats_;
};

} // namespace agreement
