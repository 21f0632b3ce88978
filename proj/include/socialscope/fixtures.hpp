#pragma once

// Small hand-written graphs used by the documentation, the CLI `generate`
// command and the test-suite, plus seeded random generators.

#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "socialscope/graph.hpp"

namespace socialscope::fixtures {

namespace detail {

inline Node node(std::string id, std::initializer_list<Scalar> type, Attrs extra = {})
{
    extra.insert_or_assign(std::string(kTypeAttr), AttrValue(type));
    return Node{std::move(id), std::move(extra)};
}

inline Link link(std::string id, std::string src, std::string tgt, std::initializer_list<Scalar> type,
    Attrs extra = {})
{
    extra.insert_or_assign(std::string(kTypeAttr), AttrValue(type));
    return Link{std::move(id), std::move(src), std::move(tgt), std::move(extra)};
}

inline std::string numbered(const char* prefix, std::size_t i, int width)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
    return buf;
}

} // namespace detail

/// John, Denver and the tag link between them.
inline Graph john_denver()
{
    using detail::link;
    using detail::node;
    return build_graph(
        {
            node("1", {"user", "traveler"}, {{"name", "John"}}),
            node("2", {"item", "city"}, {{"name", "Denver"}, {"keywords", "skiing"}}),
        },
        {link("12", "1", "2", {"act", "tag"}, {{"date", "2008-8-2"}, {"tags", "rockies baseball"}})});
}

struct MinusExample {
    Graph g1;
    Graph g2;
};

/// G1 = {(a,b), (a,c), (b,c)} and G2 = {(a,b)}.
inline MinusExample minus_example()
{
    using detail::link;
    using detail::node;
    Graph g1 = build_graph({node("a", {"v"}), node("b", {"v"}), node("c", {"v"})},
        {link("ab", "a", "b", {"e"}), link("ac", "a", "c", {"e"}), link("bc", "b", "c", {"e"})});
    Graph g2 = build_graph({node("a", {"v"}), node("b", {"v"})}, {link("ab", "a", "b", {"e"})});
    return {std::move(g1), std::move(g2)};
}

/// Collaborative-filtering graph: John (101) visited P and Q, Ann (102)
/// visited P, Q and R, Bob (103) visited R.
inline Graph cf_example()
{
    using detail::link;
    using detail::node;
    return build_graph(
        {
            node("101", {"user"}, {{"name", "John"}}),
            node("102", {"user"}, {{"name", "Ann"}}),
            node("103", {"user"}, {{"name", "Bob"}}),
            node("P", {"destination"}, {{"name", "Pike Place"}}),
            node("Q", {"destination"}, {{"name", "Quincy Market"}}),
            node("R", {"destination"}, {{"name", "Red Rocks"}}),
        },
        {
            link("v1", "101", "P", {"act", "visit"}),
            link("v2", "101", "Q", {"act", "visit"}),
            link("v3", "102", "P", {"act", "visit"}),
            link("v4", "102", "Q", {"act", "visit"}),
            link("v5", "102", "R", {"act", "visit"}),
            link("v6", "103", "R", {"act", "visit"}),
        });
}

/// Travel site around John (101): friends, destinations near Denver and
/// elsewhere, visits, tags and reviews.
inline Graph travel_example()
{
    using detail::link;
    using detail::node;
    return build_graph(
        {
            node("101", {"user", "traveler"}, {{"name", "John"}}),
            node("102", {"user", "traveler"}, {{"name", "Mary"}}),
            node("103", {"user"}, {{"name", "Pete"}}),
            node("104", {"user"}, {{"name", "Sue"}}),
            node("105", {"user"}, {{"name", "Tom"}}),
            node("201", {"item", "destination"}, {{"name", "Coors Field"}, {"keywords", "baseball near denver"}}),
            node("202", {"item", "destination"}, {{"name", "Red Rocks Park"}, {"keywords", "concerts near denver"}}),
            node("203", {"item", "destination"}, {{"name", "Fenway Park"}, {"keywords", "baseball boston"}}),
            node("204", {"item", "city"}, {{"name", "Denver"}, {"keywords", "skiing"}}),
            node("301", {"topic"}, {{"name", "baseball"}}),
        },
        {
            link("f1", "101", "102", {"connect", "friend"}),
            link("f2", "101", "103", {"connect", "friend"}),
            link("f3", "101", "104", {"connect", "friend"}),
            link("f4", "105", "101", {"connect", "friend"}),
            link("v1", "102", "201", {"act", "visit"}, {{"date", "2008-6-1"}}),
            link("v2", "103", "203", {"act", "visit"}),
            link("v3", "104", "202", {"act", "visit"}),
            link("v4", "105", "201", {"act", "visit"}),
            link("v5", "101", "204", {"act", "visit"}),
            link("t1", "102", "204", {"act", "tag"}, {{"tags", AttrValue({"rockies", "baseball"})}}),
            link("r1", "104", "203", {"act", "review"}, {{"rating", 4}}),
            link("b1", "201", "301", {"belong"}),
            link("b2", "203", "301", {"belong"}),
        });
}

/// network(u1) = {u2, u3}; taggers(i1, 'jazz') = {u2, u3}.
inline Graph f4()
{
    using detail::link;
    using detail::node;
    return build_graph(
        {
            node("u1", {"user"}), node("u2", {"user"}), node("u3", {"user"}), node("u4", {"user"}),
            node("i1", {"item"}, {{"name", "Blue Note"}}), node("i2", {"item"}, {{"name", "Birdland"}}),
        },
        {
            link("f12", "u1", "u2", {"connect", "friend"}),
            link("f13", "u1", "u3", {"connect", "friend"}),
            link("f34", "u3", "u4", {"connect", "friend"}),
            link("t21", "u2", "i1", {"act", "tag"}, {{"tags", "jazz"}}),
            link("t31", "u3", "i1", {"act", "tag"}, {{"tags", AttrValue({"jazz", "club"})}}),
            link("t42", "u4", "i2", {"act", "tag"}, {{"tags", "jazz"}}),
            link("t22", "u2", "i2", {"act", "tag"}, {{"tags", "club"}}),
        });
}

/// User "me" with five friends, three of whom tagged item "x".
inline Graph endorsement_example()
{
    using detail::link;
    using detail::node;
    std::vector<Node> nodes{node("me", {"user"}), node("x", {"item"}, {{"name", "Ballpark Museum"}}),
        node("y", {"item"}, {{"name", "Ski Lift"}})};
    std::vector<Link> links;
    for (int i = 1; i <= 5; ++i) {
        std::string f = "f" + std::to_string(i);
        nodes.push_back(node(f, {"user"}));
        links.push_back(link("me-" + f, "me", f, {"connect", "friend"}));
        if (i <= 3)
            links.push_back(link(f + "-x", f, "x", {"act", "tag"}, {{"tags", "baseball"}}));
    }
    links.push_back(link("f5-y", "f5", "y", {"act", "tag"}, {{"tags", "skiing"}}));
    return build_graph(std::move(nodes), std::move(links));
}

// ---------------------------------------------------------------------------
// Random generators

/// SplitMix64: portable and stable across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n).
    std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(next() % n); }
    bool chance(double p) { return unit() < p; }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Example-4-style travel graph of `size` nodes: John (101), other users,
/// destinations of which some mention Denver, a few non-destination items,
/// and friend / visit / tag / review / belong links.
inline Graph random_travel(std::uint64_t seed, std::size_t size = 30)
{
    using detail::link;
    using detail::node;
    Rng rng(seed);
    std::size_t users = std::max<std::size_t>(2, size * 2 / 5);
    std::size_t places = std::max<std::size_t>(1, size - users - 2);
    std::vector<Node> nodes;
    std::vector<std::string> user_ids{"101"}, place_ids, item_ids;
    nodes.push_back(node("101", {"user"}, {{"name", "John"}}));
    for (std::size_t i = 1; i < users; ++i) {
        user_ids.push_back(detail::numbered("u", i, 2));
        nodes.push_back(node(user_ids.back(), {"user"}));
    }
    static const char* cities[] = {"denver", "boston", "austin"};
    for (std::size_t i = 0; i < places; ++i) {
        place_ids.push_back(detail::numbered("d", i, 2));
        std::string city = cities[rng.below(3)];
        // Some Denver entries are not destinations, to exercise the structural part.
        bool destination = rng.chance(0.8);
        nodes.push_back(node(place_ids.back(), destination ? std::initializer_list<Scalar>{"item", "destination"}
                                                          : std::initializer_list<Scalar>{"item", "city"},
            {{"name", "Spot " + std::to_string(i) + " " + city}}));
        item_ids.push_back(place_ids.back());
    }
    for (std::size_t i = 0; i + users + places < size; ++i) {
        nodes.push_back(node(detail::numbered("topic", i, 2), {"topic"}));
        item_ids.push_back(nodes.back().id);
    }

    std::vector<Link> links;
    std::size_t next_id = 0;
    auto add = [&](const std::string& s, const std::string& t, std::initializer_list<Scalar> type, Attrs extra = {}) {
        links.push_back(link(detail::numbered("l", next_id++, 3), s, t, type, std::move(extra)));
    };
    for (const auto& u : user_ids)
        for (const auto& v : user_ids)
            if (u != v && rng.chance(u == "101" ? 0.45 : 0.12))
                add(u, v, {"connect", "friend"});
    for (const auto& u : user_ids) {
        std::size_t n = rng.below(4);
        for (std::size_t k = 0; k < n; ++k)
            add(u, place_ids[rng.below(place_ids.size())], {"act", "visit"});
        if (rng.chance(0.5))
            add(u, item_ids[rng.below(item_ids.size())], {"act", "tag"}, {{"tags", "fun"}});
        if (rng.chance(0.3))
            add(u, item_ids[rng.below(item_ids.size())], {"act", "review"}, {{"rating", double(1 + rng.below(5))}});
    }
    for (const auto& p : place_ids)
        if (rng.chance(0.2))
            add(p, item_ids[rng.below(item_ids.size())], {"belong"});
    return build_graph(std::move(nodes), std::move(links));
}

struct TaggingParams {
    std::size_t users = 100;
    std::size_t items = 500;
    std::size_t tags = 20;
    std::size_t community_size = 10;
    std::size_t friends_per_user = 5;
    std::size_t tag_links_per_user = 12;
};

/// Community-structured tagging site: friendships and tagging concentrate
/// within groups of `community_size` users so that clustering is non-trivial.
inline Graph random_tagging(std::uint64_t seed, const TaggingParams& p = {})
{
    using detail::link;
    using detail::node;
    Rng rng(seed);
    std::vector<Node> nodes;
    for (std::size_t u = 0; u < p.users; ++u)
        nodes.push_back(node(detail::numbered("u", u, 3), {"user"}));
    for (std::size_t i = 0; i < p.items; ++i)
        nodes.push_back(node(detail::numbered("i", i, 3), {"item"}, {{"name", "Item " + std::to_string(i)}}));

    std::size_t community = std::max<std::size_t>(1, p.community_size);
    std::size_t groups = std::max<std::size_t>(1, (p.users + community - 1) / community);
    std::size_t pool = std::max<std::size_t>(1, p.items / groups);
    std::vector<Link> links;
    std::size_t next_id = 0;
    auto uid = [&](std::size_t u) { return detail::numbered("u", u, 3); };
    for (std::size_t u = 0; u < p.users; ++u) {
        std::size_t base = (u / community) * community;
        std::set<std::size_t> friends;
        for (std::size_t k = 0; k < p.friends_per_user; ++k) {
            std::size_t v = rng.chance(0.8) ? base + rng.below(community) : rng.below(p.users);
            if (v < p.users && v != u)
                friends.insert(v);
        }
        for (std::size_t v : friends)
            links.push_back(link(detail::numbered("f", next_id++, 5), uid(u), uid(v), {"connect", "friend"}));
    }
    for (std::size_t u = 0; u < p.users; ++u) {
        std::size_t g = u / community;
        std::set<std::size_t> tagged;
        for (std::size_t k = 0; k < p.tag_links_per_user; ++k)
            tagged.insert(rng.chance(0.75) ? (g * pool + rng.below(pool)) % p.items : rng.below(p.items));
        for (std::size_t i : tagged) {
            std::set<Scalar> tags;
            std::size_t n = 1 + rng.below(3);
            for (std::size_t t = 0; t < n; ++t)
                tags.insert(detail::numbered("t", (g * 3 + rng.below(p.tags / 2 + 1)) % p.tags, 2));
            links.push_back(link(detail::numbered("t", next_id++, 5), uid(u), detail::numbered("i", i, 3),
                {"act", "tag"}, {{"tags", AttrValue(tags)}}));
        }
    }
    return build_graph(std::move(nodes), std::move(links));
}

/// Arbitrary well-formed graph with mixed string / numeric / multi-valued
/// attributes; for serialization and algebra-law checks.
inline Graph random_graph(std::uint64_t seed, std::size_t nodes = 12, std::size_t links = 20)
{
    Rng rng(seed);
    static const char* types[] = {"user", "item", "topic", "group"};
    static const char* link_types[] = {"friend", "visit", "tag", "match", "belong"};
    static const char* words[] = {"jazz", "ski", "Denver", "it's", "back\\slash", "caf\xc3\xa9", "x y"};
    auto random_attrs = [&](Attrs a) {
        std::size_t n = rng.below(3);
        for (std::size_t k = 0; k < n; ++k) {
            std::string name = "a" + std::to_string(rng.below(4));
            if (rng.chance(0.5)) {
                double v = static_cast<double>(static_cast<long long>(rng.below(2000)) - 1000) / 8.0;
                a.insert_or_assign(name, AttrValue(rng.chance(0.3) ? v + 0.1 : v));
            } else {
                std::set<Scalar> vals;
                std::size_t m = 1 + rng.below(3);
                for (std::size_t j = 0; j < m; ++j)
                    vals.insert(std::string(words[rng.below(std::size(words))]));
                a.insert_or_assign(name, AttrValue(vals));
            }
        }
        return a;
    };
    std::vector<Node> ns;
    for (std::size_t i = 0; i < nodes; ++i) {
        Attrs a{{std::string(kTypeAttr), AttrValue(types[rng.below(4)])}};
        if (rng.chance(0.3))
            a.at(std::string(kTypeAttr)).merge(AttrValue(types[rng.below(4)]));
        ns.push_back(Node{"n" + std::to_string(i), random_attrs(std::move(a))});
    }
    std::vector<Link> ls;
    for (std::size_t i = 0; i < links && nodes > 0; ++i) {
        Attrs a{{std::string(kTypeAttr), AttrValue(link_types[rng.below(5)])}};
        ls.push_back(Link{"e" + std::to_string(i), ns[rng.below(nodes)].id, ns[rng.below(nodes)].id,
            random_attrs(std::move(a))});
    }
    return build_graph(std::move(ns), std::move(ls));
}

} // namespace socialscope::fixtures
