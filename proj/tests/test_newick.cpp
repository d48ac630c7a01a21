#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace agreement;
using namespace testsupport;

namespace {

ErrorCode parse_error(const char* text, std::size_t* offset = nullptr)
{
    LabelTable t;
    try {
        parse_newick(text, t);
    } catch (const Error& e) {
        if (offset) {
            *offset = e.offset();
        }
        return e.code();
    }
    ADD_FAILURE() << "no error for " << text;
    return ErrorCode::BadConfig;
}

} // namespace

TEST(Newick, FullyLabeled)
{
    LabelTable t;
    auto x = parse_newick("((a,b)x,c)r;", t);
    EXPECT_EQ(x.size(), 5u);
    for (NodeIndex u = 0; u < x.size(); ++u) {
        EXPECT_EQ(x.labels_of(u).size(), 1u);
    }
}

TEST(Newick, UnlabeledRoot)
{
    LabelTable t;
    auto x = parse_newick("(a,b);", t);
    EXPECT_EQ(x.size(), 3u);
    EXPECT_TRUE(x.labels_of(x.root()).empty());
}

TEST(Newick, MultiLabel)
{
    LabelTable t;
    auto x = parse_newick("((a,b)x+y,c)r;", t);
    auto n = x.node_of(*t.find("x"));
    ASSERT_TRUE(n);
    EXPECT_EQ(x.node_of(*t.find("y")), n);
    EXPECT_EQ(x.labels_of(*n).size(), 2u);
}

TEST(Newick, Whitespace)
{
    LabelTable t;
    auto x = parse_newick("  ( ( a , b ) x ,\n c ) r ; ", t);
    EXPECT_EQ(serialize_newick(x, t), "((a,b)x,c)r;");
}

TEST(Newick, Errors)
{
    std::size_t off = 0;
    EXPECT_EQ(parse_error("(a,b)r", &off), ErrorCode::SyntaxError);
    EXPECT_EQ(off, 6u);
    EXPECT_EQ(parse_error("(a,b;", &off), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error("(a,,b)r;", &off), ErrorCode::EmptySubtree);
    EXPECT_EQ(off, 3u);
    EXPECT_EQ(parse_error("()r;"), ErrorCode::EmptySubtree);
    EXPECT_EQ(parse_error("(a,b)a;"), ErrorCode::DuplicateLabel);
    EXPECT_EQ(parse_error("(a,a);"), ErrorCode::DuplicateLabel);
    EXPECT_EQ(parse_error("(a,b)r;x"), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error("(a,b)r+;"), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error("(a:1,b)r;"), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error(";"), ErrorCode::SyntaxError);
    EXPECT_EQ(parse_error("a);"), ErrorCode::SyntaxError);
}

TEST(Newick, DeepTreeIsIterative)
{
    std::string text;
    const int depth = 200000;
    for (int j = 0; j < depth; ++j) {
        text += "(";
    }
    text += "x";
    for (int j = 0; j < depth; ++j) {
        text += ")n" + std::to_string(j);
    }
    text += ";";
    LabelTable t;
    auto x = parse_newick(text, t);
    EXPECT_EQ(x.size(), static_cast<std::size_t>(depth) + 1);
    EXPECT_EQ(serialize_newick(x, t), text);
}

TEST(Serialize, RoundTrip)
{
    LabelTable t;
    auto x = parse_newick("((a,b)x,c)r;", t);
    EXPECT_EQ(serialize_newick(x, t), "((a,b)x,c)r;");
}

TEST(Serialize, MultiLabelRootCanonicalOrder)
{
    LabelTable t;
    XTree x;
    auto root = x.add_node(std::nullopt, {t.intern("r"), t.intern("f")});
    x.add_node(root, {t.intern("c")});
    auto g = x.add_node(root, {t.intern("g")});
    x.add_node(g, {t.intern("b")});
    x.add_node(g, {t.intern("a")});
    EXPECT_EQ(serialize_newick(x, t), "((a,b)g,c)f+r;");
}

TEST(Serialize, StripSynthetic)
{
    auto n = normalize_profile(profile_of({"(a,b);"}));
    EXPECT_EQ(serialize_newick(n.profile.tree(0), n.profile.table()), "(a,b)_s0;");
    EXPECT_EQ(serialize_newick(n.profile.tree(0), n.profile.table(), true), "(a,b);");
}

TEST(Serialize, RoundTripPreservesClustersOnGeneratedTrees)
{
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        Profile p = random_profile(seed, 15, 3, seed % 5);
        for (std::size_t i = 0; i < p.size(); ++i) {
            LabelTable copy = p.table();
            const std::string text = serialize_newick(p.tree(i), p.table());
            XTree back = parse_newick(text, copy);
            EXPECT_EQ(clusters(back), clusters(p.tree(i)));
            EXPECT_EQ(serialize_newick(back, copy), text);
        }
    }
}

TEST(ProfileFile, CommentsBlankLinesAndOrder)
{
    Profile p = parse_profile("# header\n\n(a,m0)r;\n   \n# mid\n(a,m1)r;\n(a,m2)r;\n");
    ASSERT_EQ(p.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_TRUE(p.tree(i).contains(id(p, "m" + std::to_string(i))));
    }
    EXPECT_EQ(p.trees_containing(id(p, "a")).size(), 3u);
    EXPECT_EQ(p.trees_containing(id(p, "m1")).size(), 1u);
    EXPECT_EQ(p.trees_containing(id(p, "m1"))[0], 1u);
    EXPECT_EQ(p.label_universe().size(), 5u);
}

TEST(ProfileFile, ErrorsCarryLine)
{
    try {
        parse_profile("(a,b)r;\n(a,b r;\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_THROW(parse_profile("# nothing\n"), Error);
}
