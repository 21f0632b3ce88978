#pragma once

// Information discovery over a social content graph: network-aware search,
// collaborative and content-based recommendation, and query-time discovery
// blending semantic and social relevance into one ranked result graph.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "socialscope/aggfn.hpp"
#include "socialscope/algebra.hpp"
#include "socialscope/error.hpp"
#include "socialscope/graph.hpp"
#include "socialscope/social_index.hpp"

namespace socialscope {

struct DiscoveryConfig {
    double alpha = 0.5;
    double sim_threshold = 0.5;
    std::size_t k = 10;

    void validate() const
    {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            fail(ErrorCode::InvalidArgument, "alpha must lie in [0,1], got " + format_number(alpha));
        if (!std::isfinite(sim_threshold))
            fail(ErrorCode::InvalidArgument, "similarity threshold must be finite");
    }
};

struct RankedItem {
    std::string item;
    double score = 0;

    friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

inline void sort_ranking(std::vector<RankedItem>& r)
{
    std::sort(r.begin(), r.end(), [](const RankedItem& a, const RankedItem& b) {
        return a.score != b.score ? a.score > b.score : a.item < b.item;
    });
}

inline void require_user(const Graph& g, const std::string& user)
{
    if (!g.has_node(user))
        fail(ErrorCode::UnknownUser, user);
}

namespace detail {

inline Condition eq(const std::string& attr, Scalar v) { return Condition({cmp(attr, CompareOp::Eq, std::move(v))}); }

inline constexpr DirectionalCondition kSrcSrc{Direction::Src, Direction::Src};
inline constexpr DirectionalCondition kTgtSrc{Direction::Tgt, Direction::Src};
inline constexpr DirectionalCondition kSrcTgt{Direction::Src, Direction::Tgt};
inline constexpr DirectionalCondition kTgtTgt{Direction::Tgt, Direction::Tgt};

} // namespace detail

// ---------------------------------------------------------------------------
// Network-aware search

/// The user's friends who are linked by a visit to a place satisfying
/// `place`, together with those visits, the friend links and all of the
/// friends' activity links.
inline Graph network_search(const Graph& g, const std::string& user, const Condition& place)
{
    using namespace detail;
    require_user(g, user);
    Graph g1 = link_select(semi_join(g, node_select(g, eq("id", user)), kSrcSrc), eq("type", "friend"));
    Graph g2 = link_select(semi_join(g, node_select(g, place), kTgtSrc), eq("type", "visit"));
    Graph g3 = semi_join(g1, g2, kTgtSrc);
    Graph g4 = semi_join(g2, g1, kSrcTgt);
    Graph g5 = graph_union(g3, g4);
    Graph g6 = link_select(semi_join(g, g3, kSrcTgt), eq("type", "act"));
    return graph_union(g5, g6);
}

// ---------------------------------------------------------------------------
// Collaborative filtering

struct CfStages {
    Graph matches;  // user -> similar user, type 'match', attribute sim
    Graph visits;   // visit links into destinations
    Graph scored;   // user -> destination, attribute score
};

/// The collaborative-filtering plan: visit-set similarity between the user
/// and everyone sharing a visited place, kept above `threshold`, then the
/// average similarity over match/visit pairs per destination.
inline CfStages cf_pipeline(const Graph& g, const std::string& user, double threshold)
{
    using namespace detail;
    Condition visit = eq("type", "visit");
    Graph g1 = link_select(semi_join(g, node_select(g, eq("id", user)), kSrcSrc), visit);
    g1 = node_aggregate(g1, visit, Direction::Src, "vst", SafExpr{"tgt", std::nullopt});
    Graph g2 = link_select(semi_join(g, node_select(g, Condition({cmp("id", CompareOp::Ne, user)})), kSrcSrc), visit);
    g2 = node_aggregate(g2, visit, Direction::Src, "vst", SafExpr{"tgt", std::nullopt});

    CompositionFn sim;
    sim.outputs.emplace("sim", JaccardOf{Side::LeftSrc, "vst", Side::RightSrc, "vst"});
    Graph g3 = compose(g1, g2, kTgtTgt, sim);
    Graph g4 = link_select(link_aggregate(g3, Condition({cmp("sim", CompareOp::Gt, threshold)}),
                               {{"type", ConstString{"match"}}, {"sim", CopyAny{"sim", std::nullopt}}}),
        eq("type", "match"));
    Graph g5 = link_select(semi_join(g, node_select(g, eq("type", "destination")), kTgtSrc), visit);

    CompositionFn carry;
    carry.outputs.emplace("sim_sc", CopyFrom{Side::LeftLink, "sim"});
    Graph g6 = compose(semi_join(g4, g5, kTgtSrc), semi_join(g5, g4, kSrcTgt), kTgtSrc, carry);
    Graph g7 = link_aggregate(g6, eq("type", std::string(kDefaultComposedType)),
        {{"score", NafExpr::avg("sim_sc")}});
    return {std::move(g4), std::move(g5), std::move(g7)};
}

struct CfResult {
    Graph graph;
    std::vector<RankedItem> ranking;
};

/// Destinations the user has a visit link to.
inline std::set<std::string> visited_by(const Graph& g, const std::string& user)
{
    std::set<std::string> out;
    for (const auto& [id, l] : g.links())
        if (l.src == user && has_type(l.attrs, "visit"))
            out.insert(l.tgt);
    return out;
}

inline CfResult cf_recommend(const Graph& g, const std::string& user, const DiscoveryConfig& cfg = {})
{
    cfg.validate();
    require_user(g, user);
    CfStages st = cf_pipeline(g, user, cfg.sim_threshold);
    std::set<std::string> seen = visited_by(g, user);
    GraphBuilder drop;
    for (const auto& id : seen)
        if (const Node* n = st.scored.find_node(id))
            drop.add_node(*n);
    CfResult r{node_minus(st.scored, std::move(drop).finish()), {}};
    for (const auto& [id, l] : r.graph.links()) {
        auto s = l.attrs.find(std::string(kScoreAttr));
        if (l.src == user && s != l.attrs.end())
            if (auto v = s->second.single_number())
                r.ranking.push_back({l.tgt, *v});
    }
    sort_ranking(r.ranking);
    if (r.ranking.size() > cfg.k)
        r.ranking.resize(cfg.k);
    return r;
}

// ---------------------------------------------------------------------------
// Rating and similarity profile

/// What a user did and who tagged what, precomputed for scoring and
/// explanations. Items(u) are the targets of u's 'act' links; rating(u, i)
/// is the largest numeric "rating" on them, 1 if none carries one.
struct ActivityProfile {
    std::map<std::string, std::map<std::string, double>> rated;
    std::map<std::string, IdSet> taggers;

    explicit ActivityProfile(const Graph& g)
    {
        std::map<std::pair<std::string, std::string>, std::optional<double>> best;
        for (const auto& [id, l] : g.links()) {
            if (!has_type(l.attrs, "act"))
                continue;
            auto& slot = best[{l.src, l.tgt}];
            if (auto r = l.attrs.find("rating"); r != l.attrs.end())
                for (const auto& v : r->second.values())
                    if (const double* x = std::get_if<double>(&v))
                        slot = slot ? std::max(*slot, *x) : *x;
        }
        for (const auto& [key, r] : best)
            rated[key.first][key.second] = r.value_or(1.0);
        SocialSets s = social_sets(g);
        for (const auto& [key, users] : s.taggers)
            taggers[key.first].insert(users.begin(), users.end());
    }

    double rating(const std::string& u, const std::string& i) const
    {
        auto it = rated.find(u);
        if (it == rated.end())
            return 0.0;
        auto r = it->second.find(i);
        return r == it->second.end() ? 0.0 : r->second;
    }

    IdSet items(const std::string& u) const
    {
        IdSet out;
        if (auto it = rated.find(u); it != rated.end())
            for (const auto& [i, _] : it->second)
                out.insert(i);
        return out;
    }

    const IdSet& taggers_of(const std::string& item) const
    {
        static const IdSet none;
        auto it = taggers.find(item);
        return it == taggers.end() ? none : it->second;
    }

    double item_sim(const std::string& a, const std::string& b) const { return jaccard(taggers_of(a), taggers_of(b)); }
    double user_sim(const std::string& a, const std::string& b) const { return jaccard(items(a), items(b)); }
};

/// score(i) = max over i' in Items(u) of ItemSim(i, i') * rating(u, i').
inline std::vector<RankedItem> content_recommend(const Graph& g, const std::string& user, std::size_t k)
{
    require_user(g, user);
    ActivityProfile p(g);
    IdSet mine = p.items(user);
    std::vector<RankedItem> out;
    for (const auto& [id, n] : g.nodes()) {
        if (mine.count(id) || id == user)
            continue;
        double best = 0;
        for (const auto& j : mine)
            best = std::max(best, p.item_sim(id, j) * p.rating(user, j));
        if (best > 0)
            out.push_back({id, best});
    }
    sort_ranking(out);
    if (out.size() > k)
        out.resize(k);
    return out;
}

// ---------------------------------------------------------------------------
// Discovery

struct DiscoveredItem {
    std::string item;
    double combined = 0;
    double semantic = 0;
    double social = 0;

    friend bool operator==(const DiscoveredItem&, const DiscoveredItem&) = default;
};

struct MeaningfulSocialGraph {
    Graph graph;
    std::vector<DiscoveredItem> ranking;
};

/// Candidates are the nodes meeting the query's structural predicates, other
/// than the user and what the user already visited; with keywords they must
/// match at least one, without keywords they need some social support.
/// Social scores are min-max normalized over the candidates.
inline MeaningfulSocialGraph discover(const Graph& g, const std::string& user, const Condition& query,
    const DiscoveryConfig& cfg = {})
{
    cfg.validate();
    require_user(g, user);
    CfStages st = cf_pipeline(g, user, cfg.sim_threshold);
    std::set<std::string> seen = visited_by(g, user);
    std::map<std::string, double> raw_social;
    for (const auto& [id, l] : st.scored.links())
        if (l.src == user)
            if (auto s = l.attrs.find(std::string(kScoreAttr)); s != l.attrs.end())
                if (auto v = s->second.single_number())
                    raw_social[l.tgt] = *v;

    Condition structural(query.preds);
    std::vector<DiscoveredItem> cands;
    for (const auto& [id, n] : g.nodes()) {
        if (id == user || seen.count(id) || !satisfies(n, structural))
            continue;
        double sem = query.keywords.empty() ? 1.0 : default_keyword_score(n.attrs, query.keywords);
        auto social = raw_social.find(id);
        double soc = social == raw_social.end() ? 0.0 : social->second;
        if (query.keywords.empty() ? !(soc > 0) : !(sem > 0))
            continue;
        cands.push_back({id, 0, sem, soc});
    }
    if (!cands.empty()) {
        auto [lo, hi] = std::minmax_element(cands.begin(), cands.end(),
            [](const DiscoveredItem& a, const DiscoveredItem& b) { return a.social < b.social; });
        double min = lo->social, span = hi->social - lo->social;
        for (auto& c : cands) {
            c.social = span > 0 ? (c.social - min) / span : 1.0;
            c.combined = cfg.alpha * c.semantic + (1 - cfg.alpha) * c.social;
        }
    }
    std::sort(cands.begin(), cands.end(), [](const DiscoveredItem& a, const DiscoveredItem& b) {
        return a.combined != b.combined ? a.combined > b.combined : a.item < b.item;
    });
    if (cands.size() > cfg.k)
        cands.resize(cfg.k);

    GraphBuilder out;
    out.add_node(*g.find_node(user));
    std::set<std::string> ranked;
    for (const auto& c : cands) {
        ranked.insert(c.item);
        out.add_node(*g.find_node(c.item));
    }
    std::set<std::string> contributors;
    for (const auto& [id, l] : st.visits.links()) {
        if (!ranked.count(l.tgt))
            continue;
        bool matched = false;
        for (const auto& [mid, m] : st.matches.links())
            matched = matched || (m.src == user && m.tgt == l.src);
        if (!matched)
            continue;
        contributors.insert(l.src);
        out.add_node(*g.find_node(l.src));
        out.add_link(l);
    }
    for (const auto& [id, m] : st.matches.links()) {
        if (m.src != user || !contributors.count(m.tgt))
            continue;
        out.add_link(m);
    }
    return {std::move(out).finish(), std::move(cands)};
}

} // namespace socialscope
