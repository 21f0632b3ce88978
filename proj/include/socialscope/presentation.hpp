#pragma once

// Result presentation: grouping scored items socially, topically or by an
// attribute, choosing which groups to show, and explaining items and groups.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socialscope/discovery.hpp"
#include "socialscope/error.hpp"
#include "socialscope/graph.hpp"
#include "socialscope/social_index.hpp"

namespace socialscope {

enum class GroupingKind { Social, Topical, Structural };

struct GroupingCriterion {
    GroupingKind kind = GroupingKind::Social;
    double theta = 0.5;
    std::string attr;

    static GroupingCriterion social(double theta) { return {GroupingKind::Social, theta, {}}; }
    static GroupingCriterion topical() { return {GroupingKind::Topical, 0, {}}; }
    static GroupingCriterion structural(std::string attr) { return {GroupingKind::Structural, 0, std::move(attr)}; }

    /// "social:0.5", "topical" or "structural:type".
    static GroupingCriterion parse(std::string_view text)
    {
        auto colon = text.find(':');
        std::string_view head = text.substr(0, colon);
        std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
        if (head == "topical" && colon == std::string_view::npos)
            return topical();
        if (head == "structural" && !rest.empty())
            return structural(std::string(rest));
        if (head == "social" && !rest.empty()) {
            std::string num(rest);
            char* end = nullptr;
            double theta = std::strtod(num.c_str(), &end);
            if (end == num.c_str() + num.size() && theta >= 0 && theta <= 1)
                return social(theta);
        }
        fail(ErrorCode::InvalidArgument,
            "grouping criterion must be social:<theta in [0,1]>, topical or structural:<attr>, got '" + std::string(text)
                + "'");
    }
};

struct ItemGroup {
    std::string id;
    std::vector<std::string> members;
    std::string label;
    double quality = 0;
    std::size_t size = 0;

    friend bool operator==(const ItemGroup&, const ItemGroup&) = default;
};

namespace detail {

inline std::string display_name(const Graph& g, const std::string& id)
{
    const Node* n = g.find_node(id);
    if (n)
        if (auto it = n->attrs.find("name"); it != n->attrs.end()) {
            std::string out;
            for (const auto& v : it->second.values())
                out += (out.empty() ? "" : " ") + scalar_to_string(v);
            return out;
        }
    return id;
}

inline ItemGroup make_group(std::string id, std::string label, std::vector<std::string> members,
    const std::map<std::string, double>& score)
{
    double total = 0;
    for (const auto& m : members)
        total += score.at(m);
    std::size_t n = members.size();
    return {std::move(id), std::move(members), std::move(label), total / static_cast<double>(n), n};
}

} // namespace detail

/// Partitions (social, topical) or covers (structural) the scored items.
/// Group quality is the mean member score.
inline std::vector<ItemGroup> group_items(std::span<const RankedItem> items, const Graph& g, const GroupingCriterion& c)
{
    std::map<std::string, double> score;
    for (const auto& it : items) {
        if (!g.has_node(it.item))
            fail(ErrorCode::UnknownItem, it.item);
        score.emplace(it.item, it.score);
    }
    std::vector<ItemGroup> out;
    switch (c.kind) {
    case GroupingKind::Social: {
        if (!(c.theta >= 0 && c.theta <= 1))
            fail(ErrorCode::InvalidArgument, "social grouping threshold must lie in [0,1]");
        SocialSets s = social_sets(g);
        std::vector<std::pair<std::string, IdSet>> leaders;
        std::vector<std::vector<std::string>> members;
        for (const auto& [id, _] : score) {
            IdSet t = s.taggers_of(id);
            std::size_t found = leaders.size();
            for (std::size_t k = 0; k < leaders.size(); ++k) {
                if (jaccard(leaders[k].second, t) >= c.theta) {
                    found = k;
                    break;
                }
            }
            if (found == leaders.size()) {
                leaders.emplace_back(id, std::move(t));
                members.emplace_back();
            }
            members[found].push_back(id);
        }
        for (std::size_t k = 0; k < leaders.size(); ++k)
            out.push_back(detail::make_group("social:" + leaders[k].first, detail::display_name(g, leaders[k].first),
                std::move(members[k]), score));
        break;
    }
    case GroupingKind::Topical: {
        std::map<std::string, std::vector<std::string>> by_topic;
        std::vector<std::string> residual;
        for (const auto& [id, _] : score) {
            std::optional<std::string> topic;
            for (const auto& [lid, l] : g.links())
                if (l.src == id && has_type(l.attrs, "belong") && (!topic || l.tgt < *topic))
                    topic = l.tgt;
            if (topic)
                by_topic[*topic].push_back(id);
            else
                residual.push_back(id);
        }
        for (auto& [t, m] : by_topic)
            out.push_back(detail::make_group("topical:" + t, detail::display_name(g, t), std::move(m), score));
        if (!residual.empty())
            out.push_back(detail::make_group("topical:_residual", "other", std::move(residual), score));
        break;
    }
    case GroupingKind::Structural: {
        std::map<Scalar, std::vector<std::string>> by_value;
        std::vector<std::string> residual;
        for (const auto& [id, _] : score) {
            auto v = lookup_attr(*g.find_node(id), c.attr);
            if (!v) {
                residual.push_back(id);
                continue;
            }
            for (const auto& x : v->values())
                by_value[x].push_back(id);
        }
        if (by_value.empty() && !score.empty())
            fail(ErrorCode::UnknownCriterionAttr, c.attr);
        for (auto& [v, m] : by_value)
            out.push_back(detail::make_group(
                "structural:" + c.attr + "=" + scalar_to_string(v), scalar_to_string(v), std::move(m), score));
        if (!residual.empty())
            out.push_back(detail::make_group("structural:_residual", "other", std::move(residual), score));
        break;
    }
    }
    return out;
}

/// The `max_n` most meaningful groups: quality, then size, then id.
inline std::vector<ItemGroup> select_groups(std::vector<ItemGroup> groups, std::size_t max_n)
{
    if (max_n < 1)
        fail(ErrorCode::InvalidArgument, "at least one group must be selected");
    std::sort(groups.begin(), groups.end(), [](const ItemGroup& a, const ItemGroup& b) {
        if (a.quality != b.quality)
            return a.quality > b.quality;
        if (a.size != b.size)
            return a.size > b.size;
        return a.id < b.id;
    });
    if (groups.size() > max_n)
        groups.resize(max_n);
    return groups;
}

// ---------------------------------------------------------------------------
// Explanations

enum class ExplainStrategy { Content, Collaborative };

inline std::string_view strategy_name(ExplainStrategy s)
{
    return s == ExplainStrategy::Content ? "content" : "collaborative";
}

inline std::optional<ExplainStrategy> strategy_from_name(std::string_view s)
{
    if (s == "content")
        return ExplainStrategy::Content;
    if (s == "collaborative")
        return ExplainStrategy::Collaborative;
    return std::nullopt;
}

struct Evidence {
    std::string element;
    double weight = 0;

    friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct AggregateExplanation {
    double ratio = 0;
    std::string sentence;

    friend bool operator==(const AggregateExplanation&, const AggregateExplanation&) = default;
};

struct Explanation {
    std::string user;
    std::string item;
    ExplainStrategy strategy = ExplainStrategy::Content;
    std::vector<Evidence> evidence;
    std::string summary;

    friend bool operator==(const Explanation&, const Explanation&) = default;
};

inline int whole_percent(double ratio) { return static_cast<int>(std::nearbyint(ratio * 100.0)); }

namespace detail {

inline void require_user_item(const Graph& g, const std::string& user, const std::string& item)
{
    require_user(g, user);
    if (!g.has_node(item))
        fail(ErrorCode::UnknownItem, item);
}

inline double endorsement_ratio(const SocialSets& s, const ActivityProfile& p, const std::string& user,
    const std::string& item, ExplainStrategy strategy)
{
    if (strategy == ExplainStrategy::Collaborative) {
        const IdSet& net = s.network_of(user);
        if (net.empty())
            return 0.0;
        const IdSet& who = p.taggers_of(item);
        std::size_t hit = 0;
        for (const auto& f : net)
            hit += who.count(f) ? 1 : 0;
        return static_cast<double>(hit) / static_cast<double>(net.size());
    }
    IdSet mine = p.items(user);
    if (mine.empty())
        return 0.0;
    std::size_t similar = 0;
    for (const auto& j : mine)
        similar += p.item_sim(item, j) > 0 ? 1 : 0;
    return static_cast<double>(similar) / static_cast<double>(mine.size());
}

inline std::string item_sentence(double ratio, ExplainStrategy strategy)
{
    std::string n = std::to_string(whole_percent(ratio));
    if (strategy == ExplainStrategy::Collaborative)
        return n + "% of your friends endorsed this item";
    return "This item is similar to " + n + "% of items you visited before";
}

} // namespace detail

inline AggregateExplanation aggregate_item(const Graph& g, const std::string& user, const std::string& item,
    ExplainStrategy strategy)
{
    detail::require_user_item(g, user, item);
    double r = detail::endorsement_ratio(social_sets(g), ActivityProfile(g), user, item, strategy);
    return {r, detail::item_sentence(r, strategy)};
}

/// Mean of the members' item ratios, phrased for the group's label.
inline AggregateExplanation aggregate_group(const Graph& g, const std::string& user, const ItemGroup& group,
    ExplainStrategy strategy)
{
    require_user(g, user);
    if (group.members.empty())
        fail(ErrorCode::InvalidArgument, "group " + group.id + " has no members");
    SocialSets s = social_sets(g);
    ActivityProfile p(g);
    double total = 0;
    for (const auto& m : group.members) {
        detail::require_user_item(g, user, m);
        total += detail::endorsement_ratio(s, p, user, m, strategy);
    }
    double r = total / static_cast<double>(group.members.size());
    std::string n = std::to_string(whole_percent(r));
    if (strategy == ExplainStrategy::Collaborative)
        return {r, "On average " + n + "% of your friends endorsed the items in " + group.label};
    return {r, "Items in " + group.label + " are similar to " + n + "% of items you visited before"};
}

/// Content: the user's own items similar to `item`, weighted by similarity
/// times the user's rating. Collaborative: users with overlapping items who
/// acted on `item`, weighted by user similarity times their rating.
inline Explanation explain_item(const Graph& g, const std::string& user, const std::string& item,
    ExplainStrategy strategy)
{
    detail::require_user_item(g, user, item);
    ActivityProfile p(g);
    Explanation e{user, item, strategy, {}, {}};
    if (strategy == ExplainStrategy::Content) {
        for (const auto& j : p.items(user)) {
            double w = p.item_sim(item, j) * p.rating(user, j);
            if (w > 0)
                e.evidence.push_back({j, w});
        }
    } else {
        for (const auto& [other, acts] : p.rated) {
            if (other == user || !acts.count(item))
                continue;
            double w = p.user_sim(user, other) * p.rating(other, item);
            if (w > 0)
                e.evidence.push_back({other, w});
        }
    }
    std::sort(e.evidence.begin(), e.evidence.end(), [](const Evidence& a, const Evidence& b) {
        return a.weight != b.weight ? a.weight > b.weight : a.element < b.element;
    });
    double r = detail::endorsement_ratio(social_sets(g), p, user, item, strategy);
    e.summary = detail::item_sentence(r, strategy);
    return e;
}

} // namespace socialscope
