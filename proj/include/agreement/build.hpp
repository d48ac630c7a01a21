#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "agreement/decomposition.hpp"
#include "agreement/display_graph.hpp"
#include "agreement/error.hpp"
#include "agreement/profile.hpp"
#include "agreement/xtree.hpp"

namespace agreement {

struct BuildStats {
    std::uint64_t outer_iterations = 0;
    std::uint64_t while_iterations = 0;
    std::uint32_t max_while_per_position = 0;
    std::uint64_t edges_deleted = 0;
    std::uint64_t graph_edges = 0;
    std::uint32_t max_deletions_per_edge = 0;
};

struct Disagreement {
    Position position;
    std::vector<LabelId> children;
    std::vector<std::vector<LabelId>> blocks;
};

struct BuildOutcome {
    std::optional<XTree> tree;
    std::optional<Disagreement> disagreement;
    BuildStats stats;

    bool agrees() const { return tree.has_value(); }
};

/// Observer called once per processed position with its decomposition.
struct NoObserver {
    void operator()(const Position&, const GoodDecomposition&) const {}
};

/// Breadth-first construction of an agreement tree. Each processed position
/// becomes a node labeled by its semi-universal labels; the first position
/// with none ends the run with a disagreement.
template <ConnectivityBackend Backend = HdtConnectivity, typename Observer = NoObserver>
BuildOutcome build_agreement_tree(const Profile& profile, Observer&& observe = {})
{
    if (profile.size() == 0 || !validate_profile(profile).empty()) {
        throw Error(ErrorCode::InvalidProfile, "profile must be non-empty, normalized and singly labeled");
    }
    DisplayGraph<Backend> graph(profile);
    ExposureState exposure(profile);
    SuccessorEngine<Backend> engine(profile, graph, exposure);

    BuildOutcome outcome;
    XTree tree;
    std::deque<std::pair<Position, std::optional<NodeIndex>>> queue;
    queue.emplace_back(initial_position(profile), std::nullopt);
    while (!queue.empty()) {
        auto [pi, pred] = std::move(queue.front());
        queue.pop_front();
        ++outcome.stats.outer_iterations;
        GoodDecomposition dec = engine.compute(pi);
        observe(pi, dec);
        outcome.stats.while_iterations += dec.while_iterations;
        outcome.stats.max_while_per_position = std::max(outcome.stats.max_while_per_position, dec.while_iterations);
        if (dec.semi_universal.empty()) {
            outcome.disagreement = Disagreement{std::move(pi), std::move(dec.children), std::move(dec.blocks)};
            break;
        }
        const NodeIndex node = tree.add_node(pred, dec.semi_universal);
        for (Position& next : dec.successors) {
            queue.emplace_back(std::move(next), node);
        }
    }
    const auto& gs = graph.stats();
    outcome.stats.edges_deleted = gs.edges_deleted;
    outcome.stats.graph_edges = graph.edge_count();
    outcome.stats.max_deletions_per_edge = gs.max_deletions_per_edge;
    if (!outcome.disagreement) {
        tree.canonicalize();
        outcome.tree = std::move(tree);
    }
    return outcome;
}

/// Drops synthetic labels from an agreement tree; nodes that end up unlabeled
/// with fewer than two children are removed or spliced out.
inline BuildOutcome strip_synthetic(BuildOutcome outcome, const LabelTable& table)
{
    if (outcome.tree) {
        XTree stripped = induced_tree(*outcome.tree, [&](LabelId l) { return !table.is_synthetic(l); });
        stripped.canonicalize();
        outcome.tree = std::move(stripped);
    }
    return outcome;
}

struct SolveResult {
    NormalizedProfile normalized;
    BuildOutcome outcome;       // over the normalized profile
    std::optional<XTree> tree;  // synthetic labels stripped
};

/// Normalize, build, strip.
template <ConnectivityBackend Backend = HdtConnectivity>
SolveResult solve(const Profile& profile)
{
    SolveResult r{normalize_profile(profile), {}, {}};
    r.outcome = build_agreement_tree<Backend>(r.normalized.profile);
    if (r.outcome.tree) {
        r.tree = strip_synthetic(r.outcome, r.normalized.profile.table()).tree;
    }
    return r;
}

} // namespace agreement
