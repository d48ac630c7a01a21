#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace agreement;
using namespace testsupport;

namespace {

XTree cand(const Profile& p, const char* text)
{
    LabelTable t = p.table();
    XTree x = parse_newick(text, t);
    return x;
}

} // namespace

TEST(VerifyClusters, Examples)
{
    Profile good = profile_of({"(a,b)r;", "(a,c)r;"});
    EXPECT_TRUE(verify_by_clusters(good, cand(good, "(a,b,c)r;")));
    Profile bad = profile_of({"(a,b)r;", "((a,b)c)r;"});
    EXPECT_FALSE(verify_by_clusters(bad, cand(bad, "((a,b)c)r;")));
    Profile single = profile_of({"((a,b)x,c)r;"});
    EXPECT_TRUE(verify_by_clusters(single, single.tree(0)));
}

TEST(VerifyClusters, UniverseMismatch)
{
    Profile p = profile_of({"(a,b)r;"});
    try {
        verify_by_clusters(p, cand(p, "(a,b,z)r;"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::LabelUniverseMismatch);
    }
    EXPECT_THROW(verify_by_embedding(p, cand(p, "(a)r;")), Error);
}

TEST(Embedding, Examples)
{
    {
        Profile p = profile_of({"(a,b)r;"});
        XTree c = cand(p, "(a,b,c)r;");
        auto phi = compute_embedding(p.tree(0), c);
        EXPECT_EQ(phi.at(id(p, "r")), c.root());
        EXPECT_EQ(phi.at(id(p, "a")), *c.node_of(id(p, "a")));
        EXPECT_EQ(phi.at(id(p, "b")), *c.node_of(id(p, "b")));
        EXPECT_EQ(phi.size(), 3u);
    }
    {
        Profile p = profile_of({"((a,b)x,c)r;"});
        auto phi = compute_embedding(p.tree(0), p.tree(0));
        for (auto [l, node] : phi) {
            EXPECT_EQ(node, *p.tree(0).node_of(l));
        }
    }
    {
        Profile p = profile_of({"(a,b)r;"});
        LabelTable t = p.table();
        XTree c = parse_newick("((a,b)c)r;", t);
        auto phi = compute_embedding(p.tree(0), c);
        EXPECT_EQ(phi.at(*t.find("r")), c.root());
        EXPECT_EQ(phi.at(*t.find("a")), *c.node_of(*t.find("a")));
        EXPECT_TRUE(c.children(phi.at(*t.find("b"))).empty());
    }
}

TEST(VerifyEmbedding, Examples)
{
    Profile good = profile_of({"(a,b)r;", "(a,c)r;"});
    EXPECT_TRUE(verify_by_embedding(good, cand(good, "(a,b,c)r;")));

    Profile bad = profile_of({"(a,b)r;", "((a,b)c)r;"});
    auto v = find_embedding_violation(bad, cand(bad, "((a,b)c)r;"));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->tree, 0u);
    EXPECT_EQ(v->condition, EmbeddingViolation::Condition::E3);

    // Root relabeled; the candidate resolves a hard polytomy.
    Profile poly = profile_of({"(a,b,c)f;"});
    auto w = find_embedding_violation(poly, cand(poly, "((a,b),c)f;"));
    ASSERT_TRUE(w);
    EXPECT_EQ(w->condition, EmbeddingViolation::Condition::E3);
    EXPECT_FALSE(verify_by_clusters(poly, cand(poly, "((a,b),c)f;")));
}

TEST(VerifyEmbedding, StrictlyBelow)
{
    Profile p = profile_of({"(b)a;"});
    auto v = find_embedding_violation(p, cand(p, "(a)b;"));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->condition, EmbeddingViolation::Condition::E1);

    Profile q = profile_of({"(b,c)a;"});
    auto w = find_embedding_violation(q, cand(q, "(b)a+c;"));
    ASSERT_TRUE(w);
    EXPECT_EQ(w->condition, EmbeddingViolation::Condition::E2);
    EXPECT_FALSE(verify_by_clusters(q, cand(q, "(b)a+c;")));
}

TEST(VerifyEmbedding, LabelAwayFromLca)
{
    Profile p = profile_of({"(t3)t0;", "(t0)t1;"});
    auto v = find_embedding_violation(p, cand(p, "(t0,t3)t1;"));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->condition, EmbeddingViolation::Condition::E1);
    EXPECT_FALSE(verify_by_clusters(p, cand(p, "(t0,t3)t1;")));
}

TEST(VerifyProperty, EquivalentOnAllCandidatesSmall)
{
    // Every candidate over X_P for many small profiles.
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Profile p = random_profile(seed, 4, 1 + seed % 3, seed % 4, 0.8);
        for (const XTree& c : enumerate_candidates(p.label_universe())) {
            ASSERT_EQ(verify_by_clusters(p, c), verify_by_embedding(p, c)) << seed;
            ++checked;
        }
    }
    EXPECT_GT(checked, 1000u);
}

TEST(VerifyProperty, MonotoneUnderRestriction)
{
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        auto g = generate_with_master({12, 4, seed, 0.6, GeneratorMode::Agreeing, 0, 3});
        const Profile& p = g.profile;
        XTree t = restrict_to(g.master, p.label_universe());
        ASSERT_TRUE(verify_by_clusters(p, t));
        Rng rng(seed);
        std::vector<LabelId> y;
        for (LabelId l : p.label_universe()) {
            if (rng.below(2)) {
                y.push_back(l);
            }
        }
        if (y.empty()) {
            continue;
        }
        std::vector<XTree> sub;
        for (const XTree& x : p.trees()) {
            XTree r = induced_tree(x, [&](LabelId l) { return std::binary_search(y.begin(), y.end(), l); });
            if (!r.empty()) {
                sub.push_back(std::move(r));
            }
        }
        Profile py(p.table(), std::move(sub));
        EXPECT_TRUE(verify_by_clusters(py, restrict_to(t, y)));
        EXPECT_TRUE(verify_by_embedding(py, restrict_to(t, y)));
    }
}

TEST(LcaIndexTest, MatchesNaive)
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Profile p = random_profile(seed, 30, 1, 4, 1.0, 3);
        const XTree& x = p.tree(0);
        LcaIndex index(x);
        for (NodeIndex a = 0; a < x.size(); ++a) {
            for (NodeIndex b = 0; b < x.size(); ++b) {
                std::vector<NodeIndex> ab{a, b};
                ASSERT_EQ(index.lca(a, b), lca(x, ab));
            }
        }
    }
}
