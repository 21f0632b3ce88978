#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "socialscope/fixtures.hpp"
#include "socialscope/graph.hpp"
#include "support/oracles.hpp"

using namespace socialscope;

namespace {

Node node(std::string id, Attrs a) { return Node{std::move(id), std::move(a)}; }

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(AttrValue, RejectsEmptyAndNonFinite)
{
    EXPECT_EQ(code_of([] { AttrValue(std::set<Scalar>{}); }), ErrorCode::InvalidValue);
    EXPECT_EQ(code_of([] { AttrValue(std::numeric_limits<double>::quiet_NaN()); }), ErrorCode::InvalidValue);
    EXPECT_EQ(code_of([] { AttrValue(std::numeric_limits<double>::infinity()); }), ErrorCode::InvalidValue);
}

TEST(AttrValue, SetsAreDuplicateFree)
{
    AttrValue v({"a", "b", "a"});
    EXPECT_EQ(v.size(), 2u);
    v.merge(AttrValue({"b", "c"}));
    EXPECT_EQ(v, AttrValue({"a", "b", "c"}));
}

TEST(BuildGraph, EmptyGraph)
{
    Graph g = build_graph({}, {});
    EXPECT_TRUE(g.empty());
    EXPECT_EQ(g.node_count(), 0u);
}

TEST(BuildGraph, JohnDenverFixture)
{
    Graph g = fixtures::john_denver();
    EXPECT_EQ(g.node_count(), 2u);
    EXPECT_EQ(g.link_count(), 1u);
    EXPECT_TRUE(has_type(g.find_node("1")->attrs, "traveler"));
}

TEST(BuildGraph, DanglingEndpoint)
{
    Graph full = fixtures::john_denver();
    try {
        build_graph({*full.find_node("1")}, {*full.find_link("12")});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DanglingEndpoint);
        EXPECT_NE(std::string(e.what()).find("12"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
}

TEST(BuildGraph, DuplicateAndMissingType)
{
    Attrs t{{"type", AttrValue("user")}};
    EXPECT_EQ(code_of([&] { build_graph({node("a", t), node("a", t)}, {}); }), ErrorCode::DuplicateId);
    EXPECT_EQ(code_of([&] { build_graph({node("a", t)}, {Link{"a", "a", "a", t}}); }), ErrorCode::DuplicateId);
    EXPECT_EQ(code_of([&] { build_graph({node("a", {{"name", AttrValue("x")}})}, {}); }), ErrorCode::MissingType);
    EXPECT_EQ(code_of([&] { build_graph({node("a", t)}, {Link{"l", "a", "a", {}}}); }), ErrorCode::MissingType);
}

TEST(Tokenize, LowercasesAndSplits)
{
    EXPECT_EQ(tokenize("Rockies, BASEBALL!near-Denver"),
        (std::vector<std::string>{"rockies", "baseball", "near", "denver"}));
    EXPECT_EQ(tokenize("caf\xc3\xa9 x"), (std::vector<std::string>{"caf\xc3\xa9", "x"}));
    EXPECT_TRUE(tokenize("  ;; ").empty());
}

TEST(Satisfies, ContainsAllAndKeywords)
{
    Graph g = fixtures::john_denver();
    const Node& n1 = *g.find_node("1");
    const Node& n2 = *g.find_node("2");
    EXPECT_TRUE(satisfies(n1, Condition({has("type", {"user"})})));
    EXPECT_TRUE(satisfies(n1, Condition({has("type", {"user", "traveler"})})));
    EXPECT_FALSE(satisfies(n2, Condition({has("type", {"user"})})));
    EXPECT_TRUE(satisfies(n2, Condition({}, {"skiing", "denver"})));
    EXPECT_FALSE(satisfies(n1, Condition({}, {"zzz"})));
    EXPECT_TRUE(satisfies(n1, Condition{}));
}

TEST(Satisfies, ComparisonsAndPseudoAttributes)
{
    Attrs a{{"type", AttrValue("x")}, {"rating", AttrValue({0.2, 0.7})}, {"name", AttrValue("b")}};
    Node n{"101", a};
    EXPECT_TRUE(satisfies(n, Condition({cmp("rating", CompareOp::Ge, 0.5)})));
    EXPECT_TRUE(satisfies(n, Condition({cmp("rating", CompareOp::Lt, 0.5)})));
    EXPECT_FALSE(satisfies(n, Condition({cmp("rating", CompareOp::Gt, 0.7)})));
    EXPECT_TRUE(satisfies(n, Condition({cmp("id", CompareOp::Eq, "101")})));
    EXPECT_FALSE(satisfies(n, Condition({cmp("id", CompareOp::Eq, 101.0)})));
    EXPECT_FALSE(satisfies(n, Condition({cmp("id", CompareOp::Ne, "101")})));
    EXPECT_FALSE(satisfies(n, Condition({cmp("missing", CompareOp::Ne, "z")})));
    EXPECT_FALSE(satisfies(n, Condition({cmp("name", CompareOp::Lt, 3.0)})));
    Link l{"l", "101", "7", a};
    EXPECT_TRUE(satisfies(l, Condition({cmp("src", CompareOp::Eq, "101"), cmp("tgt", CompareOp::Eq, "7")})));
}

TEST(KeywordScore, PaperExamples)
{
    Graph g = fixtures::john_denver();
    const Node& n1 = *g.find_node("1");
    const Node& n2 = *g.find_node("2");
    std::vector<std::string> ski{"skiing"}, ski_paris{"skiing", "paris"}, zzz{"zzz"};
    EXPECT_DOUBLE_EQ(default_keyword_score(n2.attrs, ski), 1.0);
    EXPECT_DOUBLE_EQ(default_keyword_score(n2.attrs, ski_paris), 0.5);
    EXPECT_DOUBLE_EQ(default_keyword_score(n1.attrs, zzz), 0.0);
    EXPECT_EQ(code_of([&] { default_keyword_score(n1.attrs, std::vector<std::string>{}); }), ErrorCode::EmptyKeywords);
}

TEST(KeywordScore, MatchesOracleOnRandomGraphs)
{
    std::vector<std::string> vocab{"jazz", "ski", "denver", "it", "s", "caf\xc3\xa9", "x", "y", "zzz"};
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Graph g = fixtures::random_graph(seed);
        fixtures::Rng rng(seed);
        for (const auto& [id, n] : g.nodes()) {
            std::vector<std::string> kws;
            for (std::size_t k = 0, m = 1 + rng.below(3); k < m; ++k)
                kws.push_back(vocab[rng.below(vocab.size())]);
            double s = default_keyword_score(n.attrs, kws);
            ASSERT_DOUBLE_EQ(s, oracle::keyword_score(n.attrs, kws)) << id;
            ASSERT_GE(s, 0.0);
            ASSERT_LE(s, 1.0);
            ASSERT_EQ(satisfies(n, Condition({}, kws)), s > 0);
        }
    }
}

TEST(Satisfies, MonotoneUnderWeakening)
{
    std::vector<StructPredicate> pool{has("type", {"user"}), cmp("a0", CompareOp::Gt, 0.0),
        cmp("a1", CompareOp::Ne, "jazz"), has("a2", {"ski"}), cmp("id", CompareOp::Le, "n5")};
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Graph g = fixtures::random_graph(seed);
        fixtures::Rng rng(seed * 7);
        std::vector<StructPredicate> preds;
        for (const auto& p : pool)
            if (rng.chance(0.5))
                preds.push_back(p);
        for (const auto& [id, n] : g.nodes()) {
            if (!satisfies(n, Condition(preds)))
                continue;
            for (std::size_t drop = 0; drop < preds.size(); ++drop) {
                auto weaker = preds;
                weaker.erase(weaker.begin() + static_cast<std::ptrdiff_t>(drop));
                ASSERT_TRUE(satisfies(n, Condition(weaker)));
            }
        }
    }
}

TEST(Text, CanonicalConditionText)
{
    Condition c({has("type", {"user", "it's"}), cmp("sim", CompareOp::Gt, 0.5)}, {"Near Denver"});
    EXPECT_EQ(to_text(c), "[type has {'user', 'it\\'s'}, sim>0.5; kw:'near denver']");
    EXPECT_EQ(to_text(Condition{}), "[]");
    EXPECT_EQ(stable_hash(""), "cbf29ce484222325");
}
