#pragma once

// Graph algebra: selections, set operators, composition, semi-join and the
// node/link/pattern aggregation operators. Every operator is a pure function
// from graphs to a new well-formed graph.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "socialscope/aggfn.hpp"
#include "socialscope/graph.hpp"

namespace socialscope {

// ---------------------------------------------------------------------------
// Selections

namespace detail {

inline double selection_score(const Attrs& attrs, const Condition& c, const ScoringFn* scorer)
{
    double s = scorer && *scorer ? (*scorer)(attrs, c.keywords) : default_keyword_score(attrs, c.keywords);
    if (!std::isfinite(s))
        fail(ErrorCode::InvalidValue, "scoring function returned a non-finite score");
    return s;
}

} // namespace detail

/// Null graph of the nodes satisfying `c`. With keywords, each output node
/// carries `score` from `scorer` (default keyword score when absent).
inline Graph node_select(const Graph& g, const Condition& c, const ScoringFn& scorer = {})
{
    GraphBuilder out;
    for (const auto& [id, n] : g.nodes()) {
        if (!satisfies(n, c))
            continue;
        Node copy = n;
        if (!c.keywords.empty())
            copy.attrs.insert_or_assign(std::string(kScoreAttr), AttrValue(detail::selection_score(n.attrs, c, &scorer)));
        out.put_node(std::move(copy));
    }
    return std::move(out).finish();
}

/// Subgraph induced by the links satisfying `c`; scores attach to links.
inline Graph link_select(const Graph& g, const Condition& c, const ScoringFn& scorer = {})
{
    GraphBuilder out;
    for (const auto& [id, l] : g.links()) {
        if (!satisfies(l, c))
            continue;
        Link copy = l;
        if (!c.keywords.empty())
            copy.attrs.insert_or_assign(std::string(kScoreAttr), AttrValue(detail::selection_score(l.attrs, c, &scorer)));
        out.add_link(copy);
        out.add_node(*g.find_node(l.src));
        out.add_node(*g.find_node(l.tgt));
    }
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// Set operators

enum class SetOpKind { Union, Intersect, NodeMinus };

inline Graph graph_union(const Graph& g1, const Graph& g2)
{
    GraphBuilder out;
    for (const auto* g : {&g1, &g2}) {
        for (const auto& [id, n] : g->nodes())
            out.merge_node(n);
        for (const auto& [id, l] : g->links())
            out.merge_link(l);
    }
    return std::move(out).finish();
}

inline Graph graph_intersect(const Graph& g1, const Graph& g2)
{
    GraphBuilder out;
    for (const auto& [id, n] : g1.nodes()) {
        if (const Node* other = g2.find_node(id)) {
            out.merge_node(n);
            out.merge_node(*other);
        }
    }
    for (const auto& [id, l] : g1.links()) {
        const Link* other = g2.find_link(id);
        if (!other || !out.has_node(l.src) || !out.has_node(l.tgt))
            continue;
        out.merge_link(l);
        out.merge_link(*other);
    }
    return std::move(out).finish();
}

/// Node-driven minus: subgraph of g1 induced by its nodes absent from g2.
inline Graph node_minus(const Graph& g1, const Graph& g2)
{
    GraphBuilder out;
    for (const auto& [id, n] : g1.nodes())
        if (!g2.has_node(id))
            out.add_node(n);
    for (const auto& [id, l] : g1.links())
        if (!g2.has_link(id) && out.has_node(l.src) && out.has_node(l.tgt))
            out.add_link(l);
    return std::move(out).finish();
}

inline Graph set_op(SetOpKind kind, const Graph& g1, const Graph& g2)
{
    switch (kind) {
    case SetOpKind::Union: return graph_union(g1, g2);
    case SetOpKind::Intersect: return graph_intersect(g1, g2);
    case SetOpKind::NodeMinus: return node_minus(g1, g2);
    }
    return {};
}

/// Link-driven minus: links of g1 not in g2, plus exactly their endpoints.
inline Graph link_minus(const Graph& g1, const Graph& g2)
{
    GraphBuilder out;
    for (const auto& [id, l] : g1.links()) {
        if (g2.has_link(id))
            continue;
        out.add_link(l);
        out.add_node(*g1.find_node(l.src));
        out.add_node(*g1.find_node(l.tgt));
    }
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// Composition and semi-join

inline std::string composed_link_id(const std::string& left, const std::string& right)
{
    return "gen:compose:" + left + ":" + right;
}

/// One new link u -> v per pair (l1, l2) with l1.d1 == l2.d2, where u is
/// l1's opposite endpoint and v is l2's. Pairs of a link with itself are
/// included when g1 and g2 share links.
inline Graph compose(const Graph& g1, const Graph& g2, DirectionalCondition delta, const CompositionFn& f,
    const NafOptions& opts = {})
{
    f.validate();
    std::unordered_map<std::string, std::vector<const Link*>> by_join_node;
    for (const auto& [id, l] : g2.links())
        by_join_node[endpoint(l, delta.d2)].push_back(&l);

    GraphBuilder out;
    for (const auto& [id1, l1] : g1.links()) {
        auto it = by_join_node.find(endpoint(l1, delta.d1));
        if (it == by_join_node.end())
            continue;
        LinkContext left{l1, *g1.find_node(l1.src), *g1.find_node(l1.tgt)};
        const Node& u = *g1.find_node(endpoint(l1, opposite(delta.d1)));
        for (const Link* l2 : it->second) {
            LinkContext right{*l2, *g2.find_node(l2->src), *g2.find_node(l2->tgt)};
            const Node& v = *g2.find_node(endpoint(*l2, opposite(delta.d2)));
            Link made{composed_link_id(l1.id, l2->id), u.id, v.id, apply_composition(f, left, right, opts)};
            if (!made.attrs.count(std::string(kTypeAttr)))
                made.attrs.emplace(std::string(kTypeAttr), AttrValue(std::string(kDefaultComposedType)));
            out.merge_node(u);
            out.merge_node(v);
            out.add_new_link(std::move(made));
        }
    }
    return std::move(out).finish();
}

/// Subgraph of g1 induced by its links whose d1 endpoint matches the d2
/// endpoint of some g2 link. A null g2 matches against its nodes directly;
/// a null g1 yields the null graph of its matching nodes.
inline Graph semi_join(const Graph& g1, const Graph& g2, DirectionalCondition delta)
{
    std::unordered_set<std::string> keys;
    if (g2.is_null_graph()) {
        for (const auto& [id, n] : g2.nodes())
            keys.insert(id);
    } else {
        for (const auto& [id, l] : g2.links())
            keys.insert(endpoint(l, delta.d2));
    }

    GraphBuilder out;
    if (g1.is_null_graph()) {
        for (const auto& [id, n] : g1.nodes())
            if (keys.count(id))
                out.add_node(n);
        return std::move(out).finish();
    }
    for (const auto& [id, l] : g1.links()) {
        if (!keys.count(endpoint(l, delta.d1)))
            continue;
        out.add_link(l);
        out.add_node(*g1.find_node(l.src));
        out.add_node(*g1.find_node(l.tgt));
    }
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// Aggregation

/// Every node v with at least one link satisfying `c` whose `d` endpoint is v
/// gets `att` = aggregate over those links. Everything else is unchanged.
inline Graph node_aggregate(const Graph& g, const Condition& c, Direction d, const std::string& att,
    const AggSpec& spec, const NafOptions& opts = {})
{
    if (att.empty() || att == "id" || att == kTypeAttr)
        fail(ErrorCode::InvalidArgument, "node aggregation cannot assign '" + att + "'");
    std::map<std::string, std::vector<const Link*>> groups;
    for (const auto& [id, l] : g.links())
        if (satisfies(l, c))
            groups[endpoint(l, d)].push_back(&l);

    GraphBuilder out;
    for (const auto& [id, n] : g.nodes()) {
        auto it = groups.find(id);
        if (it == groups.end()) {
            out.add_node(n);
            continue;
        }
        Node copy = n;
        if (auto value = eval_agg(spec, RowSet::of_links(it->second), opts))
            copy.attrs.insert_or_assign(att, std::move(*value));
        out.put_node(std::move(copy));
    }
    for (const auto& [id, l] : g.links())
        out.add_link(l);
    return std::move(out).finish();
}

inline std::string link_aggregate_id(const std::string& src, const std::string& tgt, const Condition& c)
{
    return "gen:laggr:" + src + ":" + tgt + ":" + stable_hash(to_text(c));
}

namespace detail {

inline void check_specs(const std::vector<NamedAgg>& specs)
{
    if (specs.empty())
        fail(ErrorCode::InvalidArgument, "aggregation needs at least one (attribute, aggregate) spec");
    for (const auto& s : specs)
        if (s.attr.empty() || is_reserved_link_attr(s.attr))
            fail(ErrorCode::InvalidArgument, "aggregation cannot assign '" + s.attr + "'");
}

inline Attrs eval_specs(const std::vector<NamedAgg>& specs, const RowSet& rows, const NafOptions& opts)
{
    Attrs attrs;
    for (const auto& s : specs)
        if (auto v = eval_agg(s.spec, rows, opts))
            attrs.insert_or_assign(s.attr, std::move(*v));
    return attrs;
}

} // namespace detail

/// Replaces each (src, tgt) group of links satisfying `c` with one new link
/// carrying the evaluated specs. Without an explicit `type` spec the new link
/// takes the union of the group's types. Nodes and non-qualifying links stay.
inline Graph link_aggregate(const Graph& g, const Condition& c, const std::vector<NamedAgg>& specs,
    const NafOptions& opts = {})
{
    detail::check_specs(specs);
    std::map<std::pair<std::string, std::string>, std::vector<const Link*>> groups;
    GraphBuilder out;
    for (const auto& [id, n] : g.nodes())
        out.add_node(n);
    for (const auto& [id, l] : g.links()) {
        if (satisfies(l, c))
            groups[{l.src, l.tgt}].push_back(&l);
        else
            out.add_link(l);
    }
    for (const auto& [key, members] : groups) {
        RowSet rows = RowSet::of_links(members);
        Link made{link_aggregate_id(key.first, key.second, c), key.first, key.second,
            detail::eval_specs(specs, rows, opts)};
        if (!made.attrs.count(std::string(kTypeAttr))) {
            AttrValue types = members.front()->attrs.at(std::string(kTypeAttr));
            for (const Link* m : members)
                types.merge(m->attrs.at(std::string(kTypeAttr)));
            made.attrs.emplace(std::string(kTypeAttr), std::move(types));
        }
        out.add_new_link(std::move(made));
    }
    return std::move(out).finish();
}

// ---------------------------------------------------------------------------
// Graph-pattern aggregation

/// One chain step: the link condition and which endpoint of the step's link
/// attaches to the chain so far (for the first step, to the chain start).
struct PatternStep {
    Condition cond;
    Direction attach = Direction::Src;

    friend bool operator==(const PatternStep&, const PatternStep&) = default;
};

struct GraphPattern {
    std::vector<PatternStep> steps;

    std::string text() const
    {
        std::string out = "path(";
        for (std::size_t i = 0; i < steps.size(); ++i)
            out += (i ? ", " : "") + to_text(steps[i].cond) + " " + std::string(direction_name(steps[i].attach));
        return out + ")";
    }

    friend bool operator==(const GraphPattern&, const GraphPattern&) = default;
};

struct PatternOptions {
    std::size_t max_steps = 4;
    NafOptions naf;
};

inline constexpr std::string_view kDefaultPatternType = "pattern";

inline std::string pattern_aggregate_id(const std::string& start, const std::string& end, const GraphPattern& gp)
{
    return "gen:paggr:" + start + ":" + end + ":" + stable_hash(gp.text());
}

namespace detail {

class ChainMatcher {
public:
    ChainMatcher(const Graph& g, const GraphPattern& gp) : gp_(gp)
    {
        step_links_.resize(gp.steps.size());
        for (std::size_t s = 0; s < gp.steps.size(); ++s)
            for (const auto& [id, l] : g.links())
                if (satisfies(l, gp.steps[s].cond))
                    step_links_[s][endpoint(l, gp.steps[s].attach)].push_back(&l);
    }

    /// Calls sink(start, end, chain) for every link-distinct chain, in
    /// deterministic (link id) order.
    template<typename Sink>
    void for_each_chain(Sink&& sink)
    {
        for (const auto& [start, links] : step_links_[0])
            for (const Link* l : links) {
                chain_.assign(1, l);
                extend(start, endpoint(*l, opposite(gp_.steps[0].attach)), sink);
            }
    }

private:
    template<typename Sink>
    void extend(const std::string& start, const std::string& far, Sink& sink)
    {
        std::size_t step = chain_.size();
        if (step == gp_.steps.size()) {
            sink(start, far, std::span<const Link* const>(chain_));
            return;
        }
        auto it = step_links_[step].find(far);
        if (it == step_links_[step].end())
            return;
        for (const Link* l : it->second) {
            if (std::find(chain_.begin(), chain_.end(), l) != chain_.end())
                continue;
            chain_.push_back(l);
            extend(start, endpoint(*l, opposite(gp_.steps[step].attach)), sink);
            chain_.pop_back();
        }
    }

    const GraphPattern& gp_;
    std::vector<std::map<std::string, std::vector<const Link*>>> step_links_;
    std::vector<const Link*> chain_;
};

} // namespace detail

/// Adds one new link start -> end per (start, end) pair connected by at least
/// one chain matching `gp`; the specs aggregate over the set of such chains,
/// addressing steps by position (`attr@i`). The input graph is retained.
inline Graph pattern_aggregate(const Graph& g, const GraphPattern& gp, const std::vector<NamedAgg>& specs,
    const PatternOptions& opts = {})
{
    if (gp.steps.empty())
        fail(ErrorCode::InvalidArgument, "graph pattern has no steps");
    if (gp.steps.size() > opts.max_steps)
        fail(ErrorCode::PatternTooLong,
            std::to_string(gp.steps.size()) + " steps exceeds the limit of " + std::to_string(opts.max_steps));
    detail::check_specs(specs);

    std::map<std::pair<std::string, std::string>, RowSet> groups;
    detail::ChainMatcher matcher(g, gp);
    matcher.for_each_chain([&](const std::string& start, const std::string& end, std::span<const Link* const> chain) {
        auto [it, _] = groups.try_emplace({start, end}, RowSet(chain.size()));
        it->second.push_row(chain);
    });

    GraphBuilder out;
    for (const auto& [id, n] : g.nodes())
        out.add_node(n);
    for (const auto& [id, l] : g.links())
        out.add_link(l);
    for (const auto& [key, rows] : groups) {
        Link made{pattern_aggregate_id(key.first, key.second, gp), key.first, key.second,
            detail::eval_specs(specs, rows, opts.naf)};
        if (!made.attrs.count(std::string(kTypeAttr)))
            made.attrs.emplace(std::string(kTypeAttr), AttrValue(std::string(kDefaultPatternType)));
        out.add_new_link(std::move(made));
    }
    return std::move(out).finish();
}

} // namespace socialscope
