#include <gtest/gtest.h>

#include "socialscope/fixtures.hpp"
#include "socialscope/presentation.hpp"
#include "support/oracles.hpp"

using namespace socialscope;

namespace {

Node node(const std::string& id, std::initializer_list<Scalar> type, Attrs extra = {})
{
    extra.insert_or_assign("type", AttrValue(type));
    return Node{id, std::move(extra)};
}

Link link(const std::string& id, const std::string& s, const std::string& t, std::initializer_list<Scalar> type,
    Attrs extra = {})
{
    extra.insert_or_assign("type", AttrValue(type));
    return Link{id, s, t, std::move(extra)};
}

std::vector<RankedItem> ranked(std::initializer_list<std::pair<const char*, double>> xs)
{
    std::vector<RankedItem> out;
    for (const auto& [id, s] : xs)
        out.push_back({id, s});
    return out;
}

std::map<std::string, std::vector<std::string>> by_id(const std::vector<ItemGroup>& gs)
{
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& g : gs)
        out[g.id] = g.members;
    return out;
}

// Two items with identical taggers, one with disjoint taggers.
Graph tagged_items()
{
    return build_graph({node("a", {"user"}), node("b", {"user"}), node("c", {"user"}),
                           node("i", {"item", "museum"}, {{"name", "Art Hall"}}),
                           node("j", {"item", "museum"}, {{"name", "Old Mill"}}),
                           node("k", {"item", "city"}, {{"name", "Denver"}})},
        {link("ai", "a", "i", {"act", "tag"}, {{"tags", "art"}}), link("bi", "b", "i", {"act", "tag"}, {{"tags", "art"}}),
            link("aj", "a", "j", {"act", "tag"}, {{"tags", "old"}}),
            link("bj", "b", "j", {"act", "tag"}, {{"tags", "old"}}),
            link("ck", "c", "k", {"act", "tag"}, {{"tags", "city"}})});
}

} // namespace

TEST(GroupingCriterion, Parse)
{
    EXPECT_EQ(GroupingCriterion::parse("social:0.5").kind, GroupingKind::Social);
    EXPECT_DOUBLE_EQ(GroupingCriterion::parse("social:0.25").theta, 0.25);
    EXPECT_EQ(GroupingCriterion::parse("topical").kind, GroupingKind::Topical);
    EXPECT_EQ(GroupingCriterion::parse("structural:type").attr, "type");
    for (const char* bad : {"social", "social:2", "social:x", "structural:", "topical:1", "clever"})
        EXPECT_THROW(GroupingCriterion::parse(bad), Error) << bad;
}

TEST(Grouping, SocialThresholdOne)
{
    Graph g = tagged_items();
    auto items = ranked({{"i", 0.9}, {"j", 0.5}, {"k", 0.4}});
    auto groups = group_items(items, g, GroupingCriterion::social(1.0));
    EXPECT_EQ(by_id(groups),
        (std::map<std::string, std::vector<std::string>>{{"social:i", {"i", "j"}}, {"social:k", {"k"}}}));
    for (const auto& gr : groups) {
        if (gr.id == "social:i") {
            EXPECT_DOUBLE_EQ(gr.quality, 0.7);
            EXPECT_EQ(gr.size, 2u);
            EXPECT_EQ(gr.label, "Art Hall");
        }
    }
}

TEST(Grouping, DisjointTaggersStayApart)
{
    Graph g = tagged_items();
    auto items = ranked({{"i", 0.9}, {"k", 0.4}});
    for (double theta : {0.01, 0.5, 1.0})
        EXPECT_EQ(group_items(items, g, GroupingCriterion::social(theta)).size(), 2u);
    EXPECT_EQ(group_items(items, g, GroupingCriterion::social(0.0)).size(), 1u);
}

TEST(Grouping, StructuralByType)
{
    Graph g = tagged_items();
    auto items = ranked({{"i", 0.9}, {"j", 0.5}, {"k", 0.4}});
    auto groups = group_items(items, g, GroupingCriterion::structural("type"));
    auto ids = by_id(groups);
    EXPECT_EQ(ids.at("structural:type=museum"), (std::vector<std::string>{"i", "j"}));
    EXPECT_EQ(ids.at("structural:type=city"), (std::vector<std::string>{"k"}));
    EXPECT_EQ(ids.at("structural:type=item").size(), 3u);

    auto named = group_items(items, g, GroupingCriterion::structural("name"));
    EXPECT_EQ(named.size(), 3u);
    try {
        group_items(items, g, GroupingCriterion::structural("colour"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownCriterionAttr);
    }
    try {
        group_items(ranked({{"nowhere", 1.0}}), g, GroupingCriterion::topical());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownItem);
    }
}

TEST(Grouping, TopicalUsesBelongLinks)
{
    Graph g = fixtures::travel_example();
    auto items = ranked({{"201", 0.8}, {"202", 0.6}, {"203", 0.4}});
    auto groups = group_items(items, g, GroupingCriterion::topical());
    auto ids = by_id(groups);
    EXPECT_EQ(ids.at("topical:301"), (std::vector<std::string>{"201", "203"}));
    EXPECT_EQ(ids.at("topical:_residual"), (std::vector<std::string>{"202"}));
    for (const auto& gr : groups) {
        if (gr.id == "topical:301") {
            EXPECT_EQ(gr.label, "baseball");
        }
    }
}

TEST(Grouping, PartitionsAndGroupsAreValid)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        fixtures::TaggingParams p;
        p.users = 20;
        p.items = 40;
        p.tags = 6;
        p.community_size = 5;
        Graph g = fixtures::random_tagging(seed, p);
        std::vector<RankedItem> items;
        fixtures::Rng rng(seed);
        for (const auto& [id, n] : g.nodes())
            if (oracle::typed(n.attrs, "item") && rng.chance(0.5))
                items.push_back({id, static_cast<double>(rng.below(100)) / 100.0});
        SocialSets s = social_sets(g);
        for (double theta : {0.0, 0.2, 0.5, 1.0}) {
            auto groups = group_items(items, g, GroupingCriterion::social(theta));
            std::multiset<std::string> seen;
            for (const auto& gr : groups) {
                EXPECT_EQ(gr.size, gr.members.size());
                double total = 0;
                for (const auto& m : gr.members) {
                    seen.insert(m);
                    for (const auto& it : items)
                        if (it.item == m)
                            total += it.score;
                    std::string leader = gr.id.substr(std::string("social:").size());
                    EXPECT_GE(oracle::jaccard(s.taggers_of(leader), s.taggers_of(m)), theta);
                }
                EXPECT_NEAR(gr.quality, total / static_cast<double>(gr.size), 1e-12);
            }
            std::multiset<std::string> want;
            for (const auto& it : items)
                want.insert(it.item);
            EXPECT_EQ(seen, want);
        }
        auto topical = group_items(items, g, GroupingCriterion::topical());
        std::size_t covered = 0;
        for (const auto& gr : topical)
            covered += gr.size;
        EXPECT_EQ(covered, items.size());
    }
}

TEST(SelectGroups, TopByQualityThenSize)
{
    std::vector<ItemGroup> gs{{"a", {"x"}, "A", 0.5, 1}, {"b", {"x", "y"}, "B", 0.5, 2}, {"c", {"z"}, "C", 0.9, 1},
        {"d", {"w"}, "D", 0.1, 1}};
    auto top = select_groups(gs, 2);
    ASSERT_EQ(top.size(), 2u);
    EXPECT_EQ(top[0].id, "c");
    EXPECT_EQ(top[1].id, "b");
    EXPECT_EQ(select_groups(gs, 10).size(), 4u);
    EXPECT_THROW(select_groups(gs, 0), Error);
}

TEST(SelectGroups, AgreesWithFullSort)
{
    fixtures::Rng rng(7);
    for (int round = 0; round < 100; ++round) {
        std::vector<ItemGroup> gs;
        std::size_t n = 1 + rng.below(12);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t size = 1 + rng.below(4);
            gs.push_back({"g" + std::to_string(i), std::vector<std::string>(size, "m"), "", double(rng.below(4)) / 4,
                size});
        }
        std::size_t k = 1 + rng.below(5);
        auto got = select_groups(gs, k);
        // every selected group beats every rejected one
        for (const auto& g : gs) {
            bool chosen = std::any_of(got.begin(), got.end(), [&](const ItemGroup& x) { return x.id == g.id; });
            if (chosen)
                continue;
            for (const auto& s : got)
                EXPECT_TRUE(s.quality > g.quality || (s.quality == g.quality && s.size > g.size)
                    || (s.quality == g.quality && s.size == g.size && s.id < g.id));
        }
        EXPECT_EQ(got.size(), std::min(k, n));
    }
}

TEST(Explain, CollaborativeEvidence)
{
    Graph g = fixtures::cf_example();
    Explanation e = explain_item(g, "101", "R", ExplainStrategy::Collaborative);
    ASSERT_EQ(e.evidence.size(), 1u);
    EXPECT_EQ(e.evidence[0].element, "102");
    EXPECT_NEAR(e.evidence[0].weight, 2.0 / 3.0, 1e-12);
    EXPECT_EQ(e, explain_item(g, "101", "R", ExplainStrategy::Collaborative));
    EXPECT_TRUE(explain_item(g, "101", "R", ExplainStrategy::Content).evidence.empty());
    EXPECT_THROW(explain_item(g, "101", "nowhere", ExplainStrategy::Content), Error);
    EXPECT_THROW(explain_item(g, "nobody", "R", ExplainStrategy::Content), Error);
}

TEST(Explain, ContentEvidenceIsRecomputable)
{
    // user u rated j (rating 4); items i and j share one of two taggers
    Graph g = build_graph({node("u", {"user"}), node("a", {"user"}), node("b", {"user"}), node("i", {"item"}),
                              node("j", {"item"})},
        {link("ru", "u", "j", {"act", "review"}, {{"rating", 4.0}}), link("ai", "a", "i", {"act", "tag"}, {{"tags", "x"}}),
            link("bi", "b", "i", {"act", "tag"}, {{"tags", "y"}}), link("aj", "a", "j", {"act", "tag"}, {{"tags", "x"}})});
    Explanation e = explain_item(g, "u", "i", ExplainStrategy::Content);
    ASSERT_EQ(e.evidence.size(), 1u);
    EXPECT_EQ(e.evidence[0].element, "j");
    EXPECT_DOUBLE_EQ(e.evidence[0].weight, 0.5 * 4.0);
    EXPECT_EQ(e.summary, "This item is similar to 100% of items you visited before");

    Explanation self = explain_item(g, "u", "j", ExplainStrategy::Content);
    ASSERT_EQ(self.evidence.size(), 1u);
    EXPECT_DOUBLE_EQ(self.evidence[0].weight, 4.0);
}

TEST(Aggregate, FriendEndorsement)
{
    Graph g = fixtures::endorsement_example();
    auto x = aggregate_item(g, "me", "x", ExplainStrategy::Collaborative);
    EXPECT_DOUBLE_EQ(x.ratio, 0.6);
    EXPECT_EQ(x.sentence, "60% of your friends endorsed this item");
    auto y = aggregate_item(g, "me", "y", ExplainStrategy::Collaborative);
    EXPECT_EQ(y.sentence, "20% of your friends endorsed this item");
    auto lonely = aggregate_item(g, "x", "y", ExplainStrategy::Collaborative);
    EXPECT_DOUBLE_EQ(lonely.ratio, 0.0);
}

TEST(Aggregate, GroupMean)
{
    std::vector<Node> nodes{node("me", {"user"}), node("a", {"item"}), node("b", {"item"})};
    std::vector<Link> links;
    for (int i = 1; i <= 4; ++i) {
        std::string f = "f" + std::to_string(i);
        nodes.push_back(node(f, {"user"}));
        links.push_back(link("me-" + f, "me", f, {"connect", "friend"}));
        links.push_back(link(f + "-a", f, "a", {"act", "tag"}, {{"tags", "t"}}));
        if (i <= 2)
            links.push_back(link(f + "-b", f, "b", {"act", "tag"}, {{"tags", "t"}}));
    }
    Graph g = build_graph(std::move(nodes), std::move(links));
    ItemGroup group{"social:a", {"a", "b"}, "Parks", 0.5, 2};
    auto agg = aggregate_group(g, "me", group, ExplainStrategy::Collaborative);
    EXPECT_DOUBLE_EQ(agg.ratio, 0.75);
    EXPECT_EQ(agg.sentence, "On average 75% of your friends endorsed the items in Parks");
    EXPECT_THROW(aggregate_group(g, "me", ItemGroup{"e", {}, "E", 0, 0}, ExplainStrategy::Content), Error);
}

TEST(Aggregate, RatiosStayInUnitInterval)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        fixtures::TaggingParams p;
        p.users = 15;
        p.items = 20;
        p.community_size = 5;
        Graph g = fixtures::random_tagging(seed, p);
        for (const std::string u : {"u000", "u004", "u011"})
            for (const std::string i : {"i000", "i003", "i017"})
                for (auto st : {ExplainStrategy::Content, ExplainStrategy::Collaborative}) {
                    auto a = aggregate_item(g, u, i, st);
                    EXPECT_GE(a.ratio, 0.0);
                    EXPECT_LE(a.ratio, 1.0);
                    EXPECT_NE(a.sentence.find(std::to_string(whole_percent(a.ratio)) + "%"), std::string::npos);
                }
    }
}
