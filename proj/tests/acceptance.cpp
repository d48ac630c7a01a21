// One PASS/FAIL line per acceptance criterion. Exit status 0 iff all pass.
// Optional arguments select criteria by number, e.g. `acceptance 1 8`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "test_support.hpp"

using namespace agreement;
using namespace testsupport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    return ok;
}

// Shared by criteria 1, 4, 5 and 7.
struct BoundTally {
    std::size_t runs = 0;
    std::size_t violations = 0;

    void add(const Profile& p, const BuildStats& s)
    {
        ++runs;
        const bool ok = s.outer_iterations <= p.label_universe().size() && s.max_while_per_position <= p.size() &&
            s.max_deletions_per_edge <= 1;
        violations += !ok;
    }
};

struct SmallPosition {
    Profile profile;
    Position pi;
    Partition computed;
};

struct FamilyRun {
    std::size_t instances = 0;
    std::size_t mismatches = 0;
    std::size_t agreeing = 0;
    std::vector<SmallPosition> positions;
    double secs = 0;
};

// Generator family: n <= 5 taxa, k <= 3 trees, coverage in {1, 0.75, 0.5},
// edits 0..3, seeds in round-robin. Kept when the normalized label set has at
// most five labels.
FamilyRun run_family(BoundTally& bounds, std::size_t target)
{
    FamilyRun out;
    const auto t0 = Clock::now();
    const double coverages[] = {1.0, 0.75, 0.5};
    for (std::uint64_t seed = 1; out.instances < target; ++seed) {
        for (std::size_t n = 1; n <= 5; ++n) {
            for (std::size_t k = 1; k <= 3; ++k) {
                for (std::size_t edits = 0; edits <= 3; ++edits) {
                    for (double cov : coverages) {
                        const Profile p =
                            normalize_profile(random_profile(seed * 7919 + n * 101 + k * 13 + edits, n, k, edits, cov, 3))
                                .profile;
                        if (p.label_universe().size() > 5) {
                            continue;
                        }
                        ++out.instances;
                        auto o = build_agreement_tree(p, [&](const Position& pi, const GoodDecomposition& d) {
                            if (d.children.size() <= 7) {
                                out.positions.push_back({p, pi, d.partition()});
                            }
                        });
                        bounds.add(p, o.stats);
                        const bool oracle = brute_force_agreement(p).has_value();
                        out.agreeing += oracle;
                        if (o.agrees() != oracle) {
                            ++out.mismatches;
                            if (out.mismatches <= 3) {
                                std::printf("  mismatch:\n%s", serialize_profile(p).c_str());
                            }
                        }
                    }
                }
            }
        }
    }
    out.secs = seconds_since(t0);
    return out;
}

XTree random_candidate(const std::vector<LabelId>& universe, Rng& rng)
{
    std::vector<LabelId> labels = universe;
    for (std::size_t j = labels.size(); j > 1; --j) {
        std::swap(labels[j - 1], labels[rng.below(j)]);
    }
    const std::size_t b = 1 + rng.below(labels.size());
    std::vector<std::vector<LabelId>> blocks(b);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        blocks[j < b ? j : rng.below(b)].push_back(labels[j]);
    }
    XTree t;
    std::vector<NodeIndex> node(b);
    for (std::size_t j = 0; j < b; ++j) {
        std::optional<NodeIndex> parent;
        if (j > 0) {
            parent = node[rng.below(j)];
        }
        node[j] = t.add_node(parent, blocks[j]);
    }
    return t;
}

bool laminar(const std::vector<std::vector<LabelId>>& sets)
{
    for (const auto& a : sets) {
        for (const auto& b : sets) {
            std::vector<LabelId> both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
            if (!both.empty() && both != a && both != b) {
                return false;
            }
        }
    }
    return true;
}

template <typename Backend>
std::size_t connectivity_fuzz(std::uint64_t seed, std::size_t& deletions)
{
    Rng rng(seed);
    const std::size_t n = 2 + rng.below(199);
    const std::size_t m = rng.below(2 * n + 1);
    std::set<std::pair<Vertex, Vertex>> seen;
    std::vector<Edge> edges;
    for (std::size_t tries = 0; edges.size() < m && tries < 20 * m; ++tries) {
        Vertex a = static_cast<Vertex>(rng.below(n));
        Vertex b = static_cast<Vertex>(rng.below(n));
        if (a == b) {
            continue;
        }
        if (a > b) {
            std::swap(a, b);
        }
        if (seen.insert({a, b}).second) {
            edges.emplace_back(a, b);
        }
    }
    Backend backend(n, edges);
    std::vector<bool> alive(edges.size(), true);
    const std::vector<bool> all(n, true);

    // Component labels maintained only from the reported smaller sides.
    std::vector<std::size_t> label(n);
    {
        const auto comps = bfs_components(n, edges, alive, all);
        for (std::size_t c = 0; c < comps.size(); ++c) {
            for (Vertex v : comps[c]) {
                label[v] = c;
            }
        }
    }
    std::size_t fresh = n + 1;
    std::vector<EdgeId> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t j = order.size(); j > 1; --j) {
        std::swap(order[j - 1], order[rng.below(j)]);
    }
    std::size_t mismatches = 0;
    for (EdgeId e : order) {
        alive[e] = false;
        ++deletions;
        if (auto side = backend.remove_edge(e)) {
            for (Vertex v : *side) {
                label[v] = fresh;
            }
            ++fresh;
        }
        std::map<std::size_t, std::vector<Vertex>> groups;
        for (Vertex v = 0; v < n; ++v) {
            groups[label[v]].push_back(v);
        }
        std::vector<std::vector<Vertex>> mine;
        for (auto& [_, g] : groups) {
            mine.push_back(std::move(g));
        }
        std::sort(mine.begin(), mine.end());
        const auto truth = bfs_components(n, edges, alive, all);
        bool ok = mine == truth;
        for (int q = 0; q < 4 && ok; ++q) {
            const Vertex a = static_cast<Vertex>(rng.below(n));
            const Vertex b = static_cast<Vertex>(rng.below(n));
            ok = backend.connected(a, b) == (label[a] == label[b]);
        }
        mismatches += !ok;
    }
    return mismatches;
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int j = 1; j < argc; ++j) {
        only.insert(std::atoi(argv[j]));
    }
    auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };
    bool all_ok = true;
    char buf[512];

    BoundTally bounds;
    FamilyRun family;
    if (wanted(1) || wanted(4) || wanted(5) || wanted(7)) {
        family = run_family(bounds, 6000);
    }

    if (wanted(1)) {
        std::snprintf(buf, sizeof buf, "%zu instances (%zu agreeing), %zu mismatches, %.1f s", family.instances,
            family.agreeing, family.mismatches, family.secs);
        all_ok &= report(1, "oracle-equivalence", family.instances >= 5000 && family.mismatches == 0 && family.secs < 600, buf);
    }

    if (wanted(2) || wanted(7)) {
        const auto t0 = Clock::now();
        std::size_t profiles = 0, agreed = 0, rejected = 0;
        for (std::uint64_t seed = 1; seed <= 10000; ++seed) {
            const std::size_t n = 2 + seed % 49;
            const std::size_t k = 1 + seed % 8;
            const std::size_t edits = seed % 2 ? 1 + seed % 3 : 0;
            const Profile raw = random_profile(seed, n, k, edits, 0.3 + 0.1 * static_cast<double>(seed % 7), 2 + seed % 4);
            const SolveResult r = solve(raw);
            const Profile& p = r.normalized.profile;
            bounds.add(p, r.outcome.stats);
            ++profiles;
            if (!r.outcome.agrees()) {
                continue;
            }
            ++agreed;
            const bool ok = verify_by_clusters(p, *r.outcome.tree) && verify_by_embedding(p, *r.outcome.tree) &&
                verify_by_clusters(raw, *r.tree);
            rejected += !ok;
        }
        std::snprintf(buf, sizeof buf, "%zu profiles, %zu agreement outputs, %zu rejected by a verifier, %.1f s", profiles,
            agreed, rejected, seconds_since(t0));
        if (wanted(2)) {
            all_ok &= report(2, "soundness", profiles >= 10000 && agreed > 0 && rejected == 0, buf);
        }
    }

    if (wanted(3)) {
        const auto t0 = Clock::now();
        std::size_t pairs = 0, accepted = 0, mismatches = 0;
        Rng rng(2024);
        for (std::uint64_t seed = 1; pairs < 12000; ++seed) {
            const Profile p = normalize_profile(random_profile(seed, 2 + seed % 5, 1 + seed % 3, seed % 3, 0.8)).profile;
            if (p.label_universe().size() > 6) {
                continue;
            }
            std::vector<XTree> cands;
            for (int j = 0; j < 3; ++j) {
                cands.push_back(random_candidate(p.label_universe(), rng));
            }
            if (auto t = build_agreement_tree(p).tree) {
                cands.push_back(*t);
            }
            if (auto t = brute_force_agreement(p)) {
                cands.push_back(*t);
            }
            for (const auto& c : cands) {
                const bool a = verify_by_clusters(p, c);
                const bool b = verify_by_embedding(p, c);
                ++pairs;
                accepted += a;
                mismatches += a != b;
            }
        }
        std::snprintf(buf, sizeof buf, "%zu pairs (%zu accepted), %zu mismatches, %.1f s", pairs, accepted, mismatches,
            seconds_since(t0));
        all_ok &= report(3, "verifier-equivalence", pairs >= 10000 && mismatches == 0, buf);
    }

    if (wanted(4) || wanted(5)) {
        const auto t0 = Clock::now();
        std::size_t checked = 0, min_violations = 0, meets = 0, meet_violations = 0;
        for (const auto& sp : family.positions) {
            const auto good = all_good_partitions(sp.profile, sp.pi);
            ++checked;
            std::size_t minima = 0;
            bool mine_is_min = std::find(good.begin(), good.end(), sp.computed) != good.end();
            for (const auto& x : good) {
                mine_is_min = mine_is_min && is_finer(sp.computed, x);
                bool below_all = true;
                for (const auto& y : good) {
                    below_all = below_all && is_finer(x, y);
                    if (wanted(5)) {
                        ++meets;
                        meet_violations += !is_good_partition(sp.profile, sp.pi, meet_partitions(x, y));
                    }
                }
                minima += below_all;
            }
            min_violations += !(mine_is_min && minima == 1);
        }
        if (wanted(4)) {
            std::snprintf(buf, sizeof buf, "%zu positions searched exhaustively, %zu violations, %.1f s", checked,
                min_violations, seconds_since(t0));
            all_ok &= report(4, "minimal-partition-uniqueness", checked > 0 && min_violations == 0, buf);
        }
        if (wanted(5)) {
            std::snprintf(buf, sizeof buf, "%zu meets of good partitions, %zu not good", meets, meet_violations);
            all_ok &= report(5, "meet-closure", meets > 0 && meet_violations == 0, buf);
        }
    }

    if (wanted(6)) {
        const Profile p = profile_of({"(a,b,c)f;", "((a,b)g,c)r;"});
        const bool build_disagrees = !solve(p).outcome.agrees();
        const bool oracle_disagrees = !brute_force_agreement(p).has_value();
        // Cluster-union compatibility on the shared labels accepts the pair.
        const auto shared = ids(p, {"a", "b", "c"});
        std::vector<std::vector<LabelId>> sets;
        for (std::size_t i = 0; i < p.size(); ++i) {
            for (const auto& c : clusters(restrict_to(p.tree(i), shared))) {
                sets.push_back(c);
            }
        }
        const bool compatible = laminar(sets);
        // A tree refining both inputs exists but does not agree with the polytomy.
        LabelTable table = p.table();
        const XTree refined = parse_newick("((a,b)g,c)f+r;", table);
        bool refines = true;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto have = as_set(clusters(restrict_to(refined, p.tree_labels(i))));
            for (const auto& c : clusters(p.tree(i))) {
                refines = refines && have.count(c) > 0;
            }
        }
        const bool refined_rejected = !verify_by_clusters(p, refined) && !verify_by_embedding(p, refined);
        std::snprintf(buf, sizeof buf,
            "build %s, oracle %s, cluster-union compatible: %s, refining tree rejected by verifiers: %s",
            build_disagrees ? "DISAGREE" : "AGREE", oracle_disagrees ? "DISAGREE" : "AGREE", compatible ? "yes" : "no",
            refines && refined_rejected ? "yes" : "no");
        all_ok &= report(6, "hard-polytomy-separation",
            build_disagrees && oracle_disagrees && compatible && refines && refined_rejected, buf);
    }

    if (wanted(7)) {
        std::snprintf(buf, sizeof buf, "%zu runs, %zu exceeded an iteration or deletion bound", bounds.runs, bounds.violations);
        all_ok &= report(7, "structural-bounds", bounds.runs > 0 && bounds.violations == 0, buf);
    }

    if (wanted(8)) {
        const auto t0 = Clock::now();
        BenchmarkConfig cfg;
        cfg.taxa = {1000, 2000, 4000, 8000, 16000};
        cfg.k = 8;
        cfg.max_children = 4;
        cfg.backend = "hdt";
        cfg.repeats = 3;
        const auto rep = run_benchmark(cfg);
        bool agreed = true;
        std::string rows;
        double worst_ratio = 0;
        for (std::size_t j = 0; j < rep.rows.size(); ++j) {
            const auto& r = rep.rows[j];
            agreed = agreed && r.agreed && r.max_while_per_position <= cfg.k && r.outer_iters <= r.labels;
            if (j > 0) {
                worst_ratio = std::max(worst_ratio,
                    static_cast<double>(r.edges_deleted) / std::max<std::uint64_t>(rep.rows[j - 1].edges_deleted, 1));
            }
            rows += " n=" + std::to_string(r.n) + ":" + std::to_string(static_cast<long>(r.wall_ms)) + "ms";
        }
        const double secs = seconds_since(t0);
        std::snprintf(buf, sizeof buf, "exponent %.3f (limit 1.30), deletions x%.2f per doubling (limit 2.2), %.1f s total;%s",
            rep.exponent, worst_ratio, secs, rows.c_str());
        all_ok &= report(8, "scaling", agreed && rep.exponent <= 1.30 && worst_ratio <= 2.2 && secs < 300, buf);
    }

    if (wanted(9)) {
        const auto t0 = Clock::now();
        std::size_t deletions = 0, bad_hdt = 0, bad_rescan = 0;
        for (std::uint64_t s = 1; s <= 1000; ++s) {
            bad_hdt += connectivity_fuzz<HdtConnectivity>(s, deletions);
            bad_rescan += connectivity_fuzz<RescanConnectivity>(s, deletions);
        }
        std::snprintf(buf, sizeof buf, "1000 sequences per backend, %zu deletions, mismatches hdt=%zu rescan=%zu, %.1f s",
            deletions, bad_hdt, bad_rescan, seconds_since(t0));
        all_ok &= report(9, "connectivity-fuzz", bad_hdt == 0 && bad_rescan == 0, buf);
    }

    return all_ok ? 0 : 1;
}
