#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "agreement/error.hpp"
#include "agreement/label.hpp"
#include "agreement/profile.hpp"
#include "agreement/xtree.hpp"

namespace agreement {

enum class GeneratorMode { Agreeing, Perturbed };

struct GeneratorConfig {
    std::size_t n = 10;
    std::size_t k = 3;
    std::uint64_t seed = 1;
    double coverage = 0.7;
    GeneratorMode mode = GeneratorMode::Agreeing;
    std::size_t edits = 0;        // regraft edits, Perturbed mode only
    std::size_t max_children = 4; // 0 means unbounded
};

struct GeneratedProfile {
    Profile profile;
    XTree master; // over the same label table
};

/// 64-bit Mersenne Twister with its own bounded draw so that output does not
/// depend on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        for (;;) {
            const std::uint64_t x = engine_();
            if (x < limit) {
                return x % bound;
            }
        }
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

namespace generator_detail {

// Parent array plus labels; easier to edit than XTree.
struct Draft {
    std::vector<std::optional<std::uint32_t>> parent;
    std::vector<std::vector<LabelId>> labels;
    std::vector<bool> alive;

    static Draft from(const XTree& t)
    {
        Draft d;
        for (NodeIndex u = 0; u < t.size(); ++u) {
            d.parent.push_back(t.parent(u));
            d.labels.emplace_back(t.labels_of(u).begin(), t.labels_of(u).end());
            d.alive.push_back(true);
        }
        return d;
    }

    std::uint32_t root() const
    {
        for (std::uint32_t u = 0; u < parent.size(); ++u) {
            if (alive[u] && !parent[u]) {
                return u;
            }
        }
        return 0;
    }

    bool is_below(std::uint32_t x, std::uint32_t anc) const
    {
        for (std::optional<std::uint32_t> y = x; y; y = parent[*y]) {
            if (*y == anc) {
                return true;
            }
        }
        return false;
    }

    XTree build() const
    {
        std::vector<std::vector<std::uint32_t>> ch(parent.size());
        for (std::uint32_t u = 0; u < parent.size(); ++u) {
            if (alive[u] && parent[u]) {
                ch[*parent[u]].push_back(u);
            }
        }
        XTree t;
        std::vector<std::pair<std::uint32_t, std::optional<NodeIndex>>> stack{{root(), std::nullopt}};
        while (!stack.empty()) {
            auto [u, p] = stack.back();
            stack.pop_back();
            const NodeIndex x = t.add_node(p, labels[u]);
            for (auto it = ch[u].rbegin(); it != ch[u].rend(); ++it) {
                stack.emplace_back(*it, x);
            }
        }
        // Remove unlabeled leaves, splice unlabeled single-child nodes.
        return induced_tree(t, [](LabelId) { return true; });
    }
};

inline XTree random_master(std::size_t n, std::size_t max_children, const std::vector<LabelId>& labels, Rng& rng)
{
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t j = 0; j < n; ++j) {
        perm[j] = j;
    }
    for (std::size_t j = n; j > 1; --j) {
        std::swap(perm[j - 1], perm[rng.below(j)]);
    }
    XTree t;
    std::vector<std::size_t> child_count;
    std::vector<NodeIndex> open;
    t.add_node(std::nullopt, {labels[perm[0]]});
    child_count.push_back(0);
    open.push_back(0);
    for (std::size_t j = 1; j < n; ++j) {
        const std::size_t pick = rng.below(open.size());
        const NodeIndex p = open[pick];
        const NodeIndex x = t.add_node(p, {labels[perm[j]]});
        child_count.push_back(0);
        open.push_back(x);
        if (max_children && ++child_count[p] >= max_children) {
            open[pick] = open.back();
            open.pop_back();
            if (open.empty()) {
                open.push_back(x);
            }
        }
    }
    return t;
}

// Moves a random subtree either under a random node outside it or onto the
// edge above that node.
inline XTree regraft(const XTree& t, Rng& rng)
{
    if (t.size() < 3) {
        return t;
    }
    Draft d = Draft::from(t);
    const auto n = static_cast<std::uint32_t>(d.parent.size());
    const std::uint32_t u = 1 + static_cast<std::uint32_t>(rng.below(n - 1));
    std::vector<std::uint32_t> targets;
    for (std::uint32_t w = 0; w < n; ++w) {
        if (!d.is_below(w, u) && w != *d.parent[u]) {
            targets.push_back(w);
        }
    }
    if (targets.empty()) {
        return t;
    }
    const std::uint32_t w = targets[rng.below(targets.size())];
    if (rng.below(2) == 0) {
        d.parent[u] = w;
    } else {
        const auto mid = static_cast<std::uint32_t>(d.parent.size());
        d.parent.push_back(d.parent[w]);
        d.labels.emplace_back();
        d.alive.push_back(true);
        d.parent[w] = mid;
        d.parent[u] = mid;
    }
    return d.build();
}

} // namespace generator_detail

inline void check_config(const GeneratorConfig& cfg)
{
    if (cfg.n < 1 || cfg.k < 1) {
        throw Error(ErrorCode::BadConfig, "need at least one taxon and one tree");
    }
    if (!(cfg.coverage > 0.0 && cfg.coverage <= 1.0)) {
        throw Error(ErrorCode::BadConfig, "coverage must lie in (0, 1]");
    }
}

/// Random master tree on labels t0..t{n-1}, k restrictions of it to random
/// label subsets, then (Perturbed mode) regraft edits on random trees.
inline GeneratedProfile generate_with_master(const GeneratorConfig& cfg)
{
    check_config(cfg);
    Rng rng(cfg.seed);
    LabelTable table;
    std::vector<LabelId> labels;
    for (std::size_t j = 0; j < cfg.n; ++j) {
        labels.push_back(table.intern("t" + std::to_string(j)));
    }
    XTree master = generator_detail::random_master(cfg.n, cfg.max_children, labels, rng);
    std::vector<XTree> trees;
    for (std::size_t i = 0; i < cfg.k; ++i) {
        std::vector<LabelId> keep;
        for (LabelId l : labels) {
            if (rng.unit() < cfg.coverage) {
                keep.push_back(l);
            }
        }
        if (keep.empty()) {
            keep.push_back(labels[rng.below(labels.size())]);
        }
        trees.push_back(restrict_to(master, keep));
    }
    if (cfg.mode == GeneratorMode::Perturbed) {
        for (std::size_t e = 0; e < cfg.edits; ++e) {
            XTree& t = trees[rng.below(trees.size())];
            t = generator_detail::regraft(t, rng);
        }
    }
    return {Profile(std::move(table), std::move(trees)), std::move(master)};
}

inline Profile generate_profile(const GeneratorConfig& cfg)
{
    return generate_with_master(cfg).profile;
}

} // namespace agreement
