#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agreement/display_graph.hpp"
#include "agreement/error.hpp"
#include "agreement/profile.hpp"

namespace agreement {

/// One optional label per tree.
struct Position {
    std::vector<std::optional<LabelId>> at;

    Position() = default;
    explicit Position(std::size_t k) : at(k) {}
    Position(std::initializer_list<std::optional<LabelId>> entries) : at(entries) {}

    std::size_t size() const { return at.size(); }
    const std::optional<LabelId>& operator[](std::size_t i) const { return at[i]; }
    std::optional<LabelId>& operator[](std::size_t i) { return at[i]; }

    friend bool operator==(const Position&, const Position&) = default;
};

/// Sparse Ch_P(pi): (tree index, children of pi_i in that tree) for non-empty entries.
using ChildSet = std::vector<std::pair<std::uint32_t, std::vector<LabelId>>>;

/// (S, Gamma) with S sorted and Gamma sorted blockwise then lexicographically.
struct Partition {
    std::vector<LabelId> semi_universal;
    std::vector<std::vector<LabelId>> blocks;

    friend bool operator==(const Partition&, const Partition&) = default;
};

inline Partition normalized(Partition p)
{
    std::sort(p.semi_universal.begin(), p.semi_universal.end());
    p.semi_universal.erase(std::unique(p.semi_universal.begin(), p.semi_universal.end()), p.semi_universal.end());
    for (auto& b : p.blocks) {
        std::sort(b.begin(), b.end());
    }
    std::sort(p.blocks.begin(), p.blocks.end());
    return p;
}

struct GoodDecomposition {
    std::vector<LabelId> semi_universal;
    std::vector<Position> successors;
    std::vector<std::vector<LabelId>> blocks; // blocks[j] is the child block of successors[j]
    std::vector<LabelId> children;            // Ch_P(pi), sorted
    std::uint32_t while_iterations = 0;

    Partition partition() const { return normalized(Partition{semi_universal, blocks}); }
};

// ---------------------------------------------------------------------------
// Definitional helpers. Straight from the definitions, no graph involved.

inline Position initial_position(const Profile& profile)
{
    Position p(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto& root_labels = profile.tree(i).labels_of(profile.tree(i).root());
        if (root_labels.size() != 1) {
            throw Error(ErrorCode::InvalidProfile, "tree " + std::to_string(i) + " root is not singly labeled");
        }
        p[i] = root_labels.front();
    }
    return p;
}

inline void check_position_shape(const Profile& profile, const Position& pi)
{
    if (pi.size() != profile.size()) {
        throw Error(ErrorCode::InvalidPosition, "position has the wrong number of entries");
    }
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] && !profile.tree(i).contains(*pi[i])) {
            throw Error(ErrorCode::InvalidPosition, "entry " + std::to_string(i) + " is not a label of its tree");
        }
    }
}

/// X_P(pi), sorted.
inline std::vector<LabelId> position_labels(const Profile& profile, const Position& pi)
{
    std::vector<LabelId> out;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i]) {
            auto c = profile.cluster(i, *pi[i]);
            out.insert(out.end(), c.begin(), c.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_valid_position(const Profile& profile, const Position& pi)
{
    check_position_shape(profile, pi);
    const auto all = position_labels(profile, pi);
    for (std::size_t i = 0; i < pi.size(); ++i) {
        std::vector<LabelId> expected;
        const auto& xi = profile.tree_labels(i);
        std::set_intersection(all.begin(), all.end(), xi.begin(), xi.end(), std::back_inserter(expected));
        const Cluster actual = pi[i] ? profile.cluster(i, *pi[i]) : Cluster{};
        if (actual != expected) {
            return false;
        }
    }
    return true;
}

inline std::vector<LabelId> exposed_labels(const Profile& profile, const Position& pi)
{
    check_position_shape(profile, pi);
    std::vector<LabelId> out;
    for (LabelId l : position_labels(profile, pi)) {
        bool exposed = true;
        for (std::size_t i = 0; i < pi.size() && exposed; ++i) {
            if (!pi[i]) {
                continue;
            }
            const Cluster c = profile.cluster(i, *pi[i]);
            if (std::binary_search(c.begin(), c.end(), l) && *pi[i] != l) {
                exposed = false;
            }
        }
        if (exposed) {
            out.push_back(l);
        }
    }
    return out;
}

inline ChildSet child_set(const Profile& profile, const Position& pi)
{
    ChildSet out;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i]) {
            auto ch = profile.children_labels(i, *pi[i]);
            if (!ch.empty()) {
                out.emplace_back(static_cast<std::uint32_t>(i), std::move(ch));
            }
        }
    }
    return out;
}

/// Ch_P(pi), sorted.
inline std::vector<LabelId> position_children(const Profile& profile, const Position& pi)
{
    std::vector<LabelId> out;
    for (auto& [i, ch] : child_set(profile, pi)) {
        out.insert(out.end(), ch.begin(), ch.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace decomposition_detail {

inline bool contains(const std::vector<LabelId>& sorted, LabelId l)
{
    return std::binary_search(sorted.begin(), sorted.end(), l);
}

inline std::vector<LabelId> sorted_copy(std::vector<LabelId> v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline std::vector<LabelId> intersect(const std::vector<LabelId>& a, const std::vector<LabelId>& sorted_b)
{
    std::vector<LabelId> out;
    for (LabelId x : a) {
        if (contains(sorted_b, x)) {
            out.push_back(x);
        }
    }
    return out;
}

/// X_P(A): labels below some member of A in some tree.
inline std::vector<LabelId> block_labels(const Profile& profile, const std::vector<LabelId>& block)
{
    std::vector<LabelId> out;
    for (LabelId a : block) {
        for (std::uint32_t i : profile.trees_containing(a)) {
            auto c = profile.cluster(i, a);
            out.insert(out.end(), c.begin(), c.end());
        }
    }
    return sorted_copy(std::move(out));
}

/// Ch_P(l): children of l over every tree containing it.
inline std::vector<LabelId> all_children(const Profile& profile, LabelId l)
{
    std::vector<LabelId> out;
    for (std::uint32_t i : profile.trees_containing(l)) {
        auto ch = profile.children_labels(i, l);
        out.insert(out.end(), ch.begin(), ch.end());
    }
    return sorted_copy(std::move(out));
}

} // namespace decomposition_detail

/// Each semi-universal label with children in A has exactly one of them in A
/// per tree where it is the entry (trees without children in A excepted);
/// each other entry label with children in A has all its children inside
/// X_P(A).
inline bool is_nice(const Profile& profile, const Position& pi, const std::vector<LabelId>& S, const std::vector<LabelId>& A)
{
    using namespace decomposition_detail;
    const auto s = sorted_copy(S);
    const auto a = sorted_copy(A);
    std::vector<LabelId> entries;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i]) {
            entries.push_back(*pi[i]);
        }
    }
    entries = sorted_copy(std::move(entries));
    std::optional<std::vector<LabelId>> xa;
    for (LabelId l : entries) {
        const auto ch = all_children(profile, l);
        if (intersect(ch, a).empty()) {
            continue;
        }
        if (contains(s, l)) {
            for (std::size_t i = 0; i < pi.size(); ++i) {
                if (pi[i] == l && intersect(profile.children_labels(i, l), a).size() > 1) {
                    return false;
                }
            }
        } else {
            if (!xa) {
                xa = block_labels(profile, a);
            }
            for (LabelId c : ch) {
                if (!contains(*xa, c)) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// The position associated with block A. An entry label outside S that has no
/// children in A but still lies inside X_P(pi^A) keeps its entry, so that the
/// result stays a valid position.
inline Position successor_position(const Profile& profile, const Position& pi, const std::vector<LabelId>& S, const std::vector<LabelId>& A)
{
    using namespace decomposition_detail;
    check_position_shape(profile, pi);
    const auto s = sorted_copy(S);
    const auto a = sorted_copy(A);
    Position out(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (!pi[i]) {
            continue;
        }
        const LabelId l = *pi[i];
        const auto hit = intersect(profile.children_labels(i, l), a);
        if (hit.empty()) {
            continue;
        }
        if (contains(s, l)) {
            if (hit.size() != 1) {
                throw Error(ErrorCode::NicenessViolated,
                    "label id " + std::to_string(l.value) + " has " + std::to_string(hit.size()) + " children in the block");
            }
            out[i] = hit.front();
        } else {
            out[i] = l;
        }
    }
    for (bool changed = true; changed;) {
        changed = false;
        const auto covered = position_labels(profile, out);
        for (std::size_t i = 0; i < pi.size(); ++i) {
            if (pi[i] && !out[i] && !contains(s, *pi[i]) && contains(covered, *pi[i])) {
                out[i] = pi[i];
                changed = true;
            }
        }
    }
    return out;
}

/// Every block nice, S exposed, and the associated positions label-disjoint.
inline bool is_good_partition(const Profile& profile, const Position& pi, const std::vector<LabelId>& S,
    const std::vector<std::vector<LabelId>>& blocks)
{
    using namespace decomposition_detail;
    const auto exposed = exposed_labels(profile, pi);
    for (LabelId l : S) {
        if (!contains(exposed, l)) {
            return false;
        }
    }
    std::vector<LabelId> seen;
    for (const auto& b : blocks) {
        if (b.empty() || !is_nice(profile, pi, S, b)) {
            return false;
        }
        const auto labels = position_labels(profile, successor_position(profile, pi, S, b));
        seen.insert(seen.end(), labels.begin(), labels.end());
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            return false;
        }
    }
    return true;
}

inline bool is_good_partition(const Profile& profile, const Position& pi, const Partition& p)
{
    return is_good_partition(profile, pi, p.semi_universal, p.blocks);
}

/// Conditions D1 and D3 plus validity of every member.
inline bool is_good_decomposition(const Profile& profile, const Position& pi, const std::vector<LabelId>& S,
    const std::vector<Position>& successors)
{
    using namespace decomposition_detail;
    const auto exposed = exposed_labels(profile, pi);
    for (LabelId l : S) {
        if (!contains(exposed, l)) {
            return false;
        }
    }
    std::vector<LabelId> covered(S.begin(), S.end());
    for (const Position& p : successors) {
        if (!is_valid_position(profile, p)) {
            return false;
        }
        auto labels = position_labels(profile, p);
        covered.insert(covered.end(), labels.begin(), labels.end());
    }
    std::sort(covered.begin(), covered.end());
    if (std::adjacent_find(covered.begin(), covered.end()) != covered.end()) {
        return false;
    }
    return covered == position_labels(profile, pi);
}

inline Partition meet_partitions(const Partition& x, const Partition& y)
{
    Partition out;
    out.semi_universal = x.semi_universal;
    out.semi_universal.insert(out.semi_universal.end(), y.semi_universal.begin(), y.semi_universal.end());
    for (const auto& a : x.blocks) {
        const auto sa = decomposition_detail::sorted_copy(a);
        for (const auto& b : y.blocks) {
            auto both = decomposition_detail::intersect(b, sa);
            if (!both.empty()) {
                out.blocks.push_back(std::move(both));
            }
        }
    }
    return normalized(std::move(out));
}

/// x is finer than y: S_x contains S_y and each block of x sits inside a block of y.
inline bool is_finer(const Partition& x, const Partition& y)
{
    const auto sx = decomposition_detail::sorted_copy(x.semi_universal);
    for (LabelId l : y.semi_universal) {
        if (!decomposition_detail::contains(sx, l)) {
            return false;
        }
    }
    for (const auto& a : x.blocks) {
        bool inside = false;
        for (const auto& b : y.blocks) {
            const auto sb = decomposition_detail::sorted_copy(b);
            if (std::all_of(a.begin(), a.end(), [&](LabelId l) { return decomposition_detail::contains(sb, l); })) {
                inside = true;
                break;
            }
        }
        if (!inside) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Incremental machinery used by the builder.

/// For each label, the trees in which it has been an entry of some processed
/// position. A label is exposed once that count reaches the number of trees
/// containing it.
class ExposureState {
public:
    explicit ExposureState(const Profile& profile)
        : count_(profile.table().size(), 0)
        , total_(profile.table().size(), 0)
        , marked_(profile.size())
    {
        for (std::size_t i = 0; i < profile.size(); ++i) {
            marked_[i].assign(profile.tree(i).size(), false);
        }
        for (LabelId l : profile.label_universe()) {
            total_[l.value] = static_cast<std::uint32_t>(profile.trees_containing(l).size());
        }
    }

    void record(std::uint32_t tree, NodeIndex node, LabelId l)
    {
        if (!marked_[tree][node]) {
            marked_[tree][node] = true;
            ++count_[l.value];
        }
    }

    bool exposed(LabelId l) const { return count_[l.value] == total_[l.value] && total_[l.value] > 0; }
    std::uint32_t count(LabelId l) const { return count_[l.value]; }
    std::uint32_t trees_containing(LabelId l) const { return total_[l.value]; }

private:
    std::vector<std::uint32_t> count_;
    std::vector<std::uint32_t> total_;
    std::vector<std::vector<bool>> marked_;
};

/// Maximal good decomposition of a valid position, computed against the
/// shared display graph and exposure state. Workspace is reused across calls.
template <ConnectivityBackend Backend = HdtConnectivity>
class SuccessorEngine {
public:
    static constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();

    SuccessorEngine(const Profile& profile, DisplayGraph<Backend>& graph, ExposureState& exposure)
        : profile_(profile)
        , graph_(graph)
        , exposure_(exposure)
        , block_of_(profile.table().size(), none)
        , stamp_(profile.table().size(), 0)
        , in_s_(profile.table().size(), 0)
    {
        node_at_.resize(profile.size());
        child_start_.resize(profile.size());
        child_flat_.resize(profile.size());
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const XTree& t = profile.tree(i);
            node_at_[i].assign(profile.table().size(), none);
            child_start_[i].reserve(t.size() + 1);
            for (NodeIndex u = 0; u < t.size(); ++u) {
                for (LabelId l : t.labels_of(u)) {
                    node_at_[i][l.value] = u;
                }
                child_start_[i].push_back(static_cast<std::uint32_t>(child_flat_[i].size()));
                for (NodeIndex c : t.children(u)) {
                    child_flat_[i].push_back(t.labels_of(c).front());
                }
            }
            child_start_[i].push_back(static_cast<std::uint32_t>(child_flat_[i].size()));
        }
    }

    /// Optional trace receives (S_j, Gamma_j) before the loop and after each
    /// loop iteration.
    GoodDecomposition compute(const Position& pi, std::vector<Partition>* trace = nullptr)
    {
        const std::size_t k = profile_.size();
        if (pi.size() != k) {
            throw Error(ErrorCode::InvalidPosition, "position has the wrong number of entries");
        }
        ++epoch_;
        GoodDecomposition out;

        // Entries grouped by label: (label, trees where it is the entry).
        entries_.clear();
        for (std::uint32_t i = 0; i < k; ++i) {
            if (!pi[i]) {
                continue;
            }
            const LabelId l = *pi[i];
            if (l.value >= node_at_[i].size() || node_at_[i][l.value] == none) {
                throw Error(ErrorCode::InvalidPosition, "entry " + std::to_string(i) + " is not a label of its tree");
            }
            exposure_.record(i, node_at_[i][l.value], l);
            entries_.emplace_back(l, i);
        }
        std::sort(entries_.begin(), entries_.end());

        std::vector<LabelId>& S = out.semi_universal;
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            const LabelId l = entries_[j].first;
            if ((j == 0 || entries_[j - 1].first != l) && exposure_.exposed(l)) {
                S.push_back(l);
            }
        }
        for (LabelId l : S) {
            if (graph_.is_alive(l)) {
                graph_.delete_label(l);
            }
        }

        // Initial blocks: children grouped by display-graph component.
        blocks_.clear();
        initial_first_.clear();
        comp_block_.clear();
        for (auto [l, i] : entries_) {
            for (LabelId c : children(i, l)) {
                if (stamp_[c.value] == epoch_) {
                    continue;
                }
                stamp_[c.value] = epoch_;
                out.children.push_back(c);
                const ComponentId comp = graph_.component_of(c);
                auto [it, inserted] = comp_block_.try_emplace(comp, static_cast<std::uint32_t>(blocks_.size()));
                if (inserted) {
                    blocks_.emplace_back();
                    initial_first_.push_back(c);
                }
                block_of_[c.value] = it->second;
                blocks_[it->second].members.push_back(c);
            }
        }
        std::sort(out.children.begin(), out.children.end());
        for (LabelId l : S) {
            in_s_[l.value] = epoch_;
        }
        if (trace) {
            trace->push_back(snapshot(S));
        }

        // Demote bad labels, lowest id first, merging the blocks they touch.
        for (;;) {
            std::optional<LabelId> bad;
            for (LabelId l : S) {
                if (is_bad(l)) {
                    bad = l;
                    break;
                }
            }
            if (!bad) {
                break;
            }
            ++out.while_iterations;
            touched_.clear();
            for (std::uint32_t i : trees_of(*bad)) {
                for (LabelId c : children(i, *bad)) {
                    touched_.push_back(find_block(c));
                }
            }
            std::sort(touched_.begin(), touched_.end());
            touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());
            std::uint32_t target = touched_[0];
            for (std::size_t j = 1; j < touched_.size(); ++j) {
                target = unite(target, touched_[j]);
            }
            S.erase(std::find(S.begin(), S.end(), *bad));
            in_s_[bad->value] = 0;
            if (trace) {
                trace->push_back(snapshot(S));
            }
        }

        // Successor positions.
        std::vector<std::uint32_t> order;
        for (std::uint32_t b = 0; b < blocks_.size(); ++b) {
            if (blocks_[b].alive) {
                std::sort(blocks_[b].members.begin(), blocks_[b].members.end());
                order.push_back(b);
            }
        }
        std::sort(order.begin(), order.end(),
            [&](std::uint32_t x, std::uint32_t y) { return blocks_[x].members.front() < blocks_[y].members.front(); });
        slot_.assign(blocks_.size(), none);
        for (std::uint32_t j = 0; j < order.size(); ++j) {
            slot_[order[j]] = j;
            out.blocks.push_back(blocks_[order[j]].members);
            out.successors.emplace_back(k);
        }
        for (auto [l, i] : entries_) {
            const bool semi = in_s_[l.value] == epoch_;
            const auto ch = children(i, l);
            for (LabelId c : ch) {
                Position& p = out.successors[slot_[block_of_[c.value]]];
                if (semi) {
                    if (p[i] && *p[i] != c) {
                        throw Error(ErrorCode::NicenessViolated, "two children of one semi-universal label share a block");
                    }
                    p[i] = c;
                } else {
                    p[i] = l;
                }
            }
            if (ch.empty() && !semi) {
                out.successors[slot_[home_block(l)]][i] = l;
            }
        }
        return out;
    }

private:
    struct Block {
        std::vector<LabelId> members;
        bool alive = true;
    };

    std::span<const LabelId> children(std::uint32_t i, LabelId l) const
    {
        const NodeIndex u = node_at_[i][l.value];
        const std::uint32_t b = child_start_[i][u];
        return std::span<const LabelId>(child_flat_[i].data() + b, child_start_[i][u + 1] - b);
    }

    std::vector<std::uint32_t> trees_of(LabelId l) const
    {
        std::vector<std::uint32_t> out;
        auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(l, std::uint32_t{0}));
        for (; it != entries_.end() && it->first == l; ++it) {
            out.push_back(it->second);
        }
        return out;
    }

    std::uint32_t find_block(LabelId c) const { return block_of_[c.value]; }

    bool is_bad(LabelId l)
    {
        for (std::uint32_t i : trees_of(l)) {
            seen_blocks_.clear();
            for (LabelId c : children(i, l)) {
                const std::uint32_t b = find_block(c);
                if (std::find(seen_blocks_.begin(), seen_blocks_.end(), b) != seen_blocks_.end()) {
                    return true;
                }
                seen_blocks_.push_back(b);
            }
        }
        return false;
    }

    // Returns the surviving block.
    std::uint32_t unite(std::uint32_t a, std::uint32_t b)
    {
        if (a == b) {
            return a;
        }
        if (blocks_[a].members.size() < blocks_[b].members.size()) {
            std::swap(a, b);
        }
        for (LabelId c : blocks_[b].members) {
            block_of_[c.value] = a;
        }
        blocks_[a].members.insert(blocks_[a].members.end(), blocks_[b].members.begin(), blocks_[b].members.end());
        blocks_[b].members.clear();
        blocks_[b].alive = false;
        return a;
    }

    // Block whose label set contains an entry label that has no children in
    // its own tree.
    std::uint32_t home_block(LabelId l)
    {
        for (std::uint32_t j : trees_of(l)) {
            const auto ch = children(j, l);
            if (!ch.empty()) {
                return find_block(ch.front());
            }
        }
        if (graph_.is_alive(l)) {
            auto it = comp_block_.find(graph_.component_of(l));
            if (it != comp_block_.end()) {
                return find_block(initial_first_[it->second]);
            }
        }
        throw Error(ErrorCode::InvalidPosition, "label id " + std::to_string(l.value) + " belongs to no successor");
    }

    Partition snapshot(const std::vector<LabelId>& S) const
    {
        Partition p;
        p.semi_universal = S;
        for (const Block& b : blocks_) {
            if (b.alive) {
                p.blocks.push_back(b.members);
            }
        }
        return normalized(std::move(p));
    }

    const Profile& profile_;
    DisplayGraph<Backend>& graph_;
    ExposureState& exposure_;
    std::vector<std::vector<NodeIndex>> node_at_;
    std::vector<std::uint32_t> block_of_;
    std::vector<std::uint64_t> stamp_;
    std::vector<std::uint64_t> in_s_;
    std::uint64_t epoch_ = 0;
    std::vector<std::pair<LabelId, std::uint32_t>> entries_;
    std::vector<Block> blocks_;
    std::vector<LabelId> initial_first_;
    std::unordered_map<ComponentId, std::uint32_t> comp_block_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint32_t> seen_blocks_;
    std::vector<std::uint32_t> slot_;
    std::vector<std::vector<std::uint32_t>> child_start_;
    std::vector<std::vector<LabelId>> child_flat_;
};

/// Convenience wrapper building a one-off engine.
template <ConnectivityBackend Backend>
GoodDecomposition compute_successor(const Profile& profile, const Position& pi, DisplayGraph<Backend>& graph,
    ExposureState& exposure)
{
    SuccessorEngine<Backend> engine(profile, graph, exposure);
    return engine.compute(pi);
}

} // namespace agreement
