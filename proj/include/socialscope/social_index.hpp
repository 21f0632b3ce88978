#pragma once

// Network-aware keyword search: per-user social sets, user clustering, the
// per-(tag, cluster) upper-bound lists and threshold top-k processing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "socialscope/aggfn.hpp"
#include "socialscope/error.hpp"
#include "socialscope/graph.hpp"

namespace socialscope {

using IdSet = std::set<std::string>;

struct SocialSets {
    std::set<std::string> users;
    std::map<std::string, IdSet> network;
    std::map<std::string, IdSet> items;
    std::map<std::pair<std::string, std::string>, IdSet> taggers;

    const IdSet& network_of(const std::string& u) const { return find_or_empty(network, u); }
    const IdSet& items_of(const std::string& u) const { return find_or_empty(items, u); }

    const IdSet& taggers_of(const std::string& item, const std::string& tag) const
    {
        auto it = taggers.find({item, tag});
        return it == taggers.end() ? empty_set() : it->second;
    }

    /// Union over every tag of taggers(item, tag).
    IdSet taggers_of(const std::string& item) const
    {
        IdSet out;
        for (auto it = taggers.lower_bound({item, ""}); it != taggers.end() && it->first.first == item; ++it)
            out.insert(it->second.begin(), it->second.end());
        return out;
    }

    std::set<std::string> tags() const
    {
        std::set<std::string> out;
        for (const auto& [key, _] : taggers)
            out.insert(key.second);
        return out;
    }

    friend bool operator==(const SocialSets&, const SocialSets&) = default;

private:
    static const IdSet& empty_set()
    {
        static const IdSet e;
        return e;
    }
    static const IdSet& find_or_empty(const std::map<std::string, IdSet>& m, const std::string& k)
    {
        auto it = m.find(k);
        return it == m.end() ? empty_set() : it->second;
    }
};

inline constexpr std::string_view kTagsAttr = "tags";

/// network from 'friend' links in both directions, items and taggers from
/// 'tag' links; tags are the tokens of the link's "tags" strings.
inline SocialSets social_sets(const Graph& g)
{
    SocialSets s;
    for (const auto& [id, n] : g.nodes())
        if (has_type(n.attrs, "user"))
            s.users.insert(id);
    for (const auto& [id, l] : g.links()) {
        if (has_type(l.attrs, "friend") && l.src != l.tgt) {
            s.network[l.src].insert(l.tgt);
            s.network[l.tgt].insert(l.src);
            s.users.insert(l.src);
            s.users.insert(l.tgt);
        }
        if (!has_type(l.attrs, "tag"))
            continue;
        s.users.insert(l.src);
        s.items[l.src].insert(l.tgt);
        auto tags = l.attrs.find(std::string(kTagsAttr));
        if (tags == l.attrs.end())
            continue;
        for (const auto& v : tags->second.values())
            if (const auto* str = std::get_if<std::string>(&v))
                for (auto& t : tokenize(*str))
                    s.taggers[{l.tgt, std::move(t)}].insert(l.src);
    }
    return s;
}

/// Sum over keywords of |network(user) ∩ taggers(item, k)|.
inline std::int64_t exact_score(const SocialSets& s, const std::string& item, const std::string& user,
    std::span<const std::string> keywords)
{
    const IdSet& net = s.network_of(user);
    std::int64_t total = 0;
    for (const auto& k : keywords)
        for (const auto& v : s.taggers_of(item, k))
            total += net.count(v) ? 1 : 0;
    return total;
}

// ---------------------------------------------------------------------------
// Clustering

enum class ClusteringKind : std::uint8_t { Network = 0, Behavior = 1, Hybrid = 2 };

inline std::string_view clustering_name(ClusteringKind k)
{
    switch (k) {
    case ClusteringKind::Network: return "network";
    case ClusteringKind::Behavior: return "behavior";
    case ClusteringKind::Hybrid: return "hybrid";
    }
    return "?";
}

inline std::optional<ClusteringKind> clustering_from_name(std::string_view name)
{
    for (auto k : {ClusteringKind::Network, ClusteringKind::Behavior, ClusteringKind::Hybrid})
        if (clustering_name(k) == name)
            return k;
    return std::nullopt;
}

struct ClusteringStrategy {
    ClusteringKind kind = ClusteringKind::Network;
    double theta = 0.5;

    void validate() const
    {
        if (!(theta >= 0.0 && theta <= 1.0))
            fail(ErrorCode::InvalidArgument, "clustering threshold must lie in [0,1], got " + format_number(theta));
    }

    friend bool operator==(const ClusteringStrategy&, const ClusteringStrategy&) = default;
};

using ClusterId = std::uint32_t;

struct ClusterModel {
    ClusteringStrategy strategy;
    std::map<std::string, ClusterId> assignment;
    std::vector<std::string> leaders;

    ClusterId cluster_of(const std::string& user) const
    {
        auto it = assignment.find(user);
        if (it == assignment.end())
            fail(ErrorCode::UnknownUser, user);
        return it->second;
    }

    std::vector<std::vector<std::string>> members() const
    {
        std::vector<std::vector<std::string>> out(leaders.size());
        for (const auto& [u, c] : assignment)
            out[c].push_back(u);
        return out;
    }

    friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

/// The pairwise predicate of the strategy. Hybrid is false whenever either
/// network is empty, so such users stay alone.
inline bool same_cluster(const SocialSets& s, const ClusteringStrategy& st, const std::string& u1, const std::string& u2)
{
    switch (st.kind) {
    case ClusteringKind::Network: return jaccard(s.network_of(u1), s.network_of(u2)) >= st.theta;
    case ClusteringKind::Behavior: return jaccard(s.items_of(u1), s.items_of(u2)) >= st.theta;
    case ClusteringKind::Hybrid: {
        const IdSet& n1 = s.network_of(u1);
        const IdSet& n2 = s.network_of(u2);
        if (n1.empty() || n2.empty())
            return false;
        for (const auto& v1 : n1)
            for (const auto& v2 : n2)
                if (!(jaccard(s.items_of(v1), s.items_of(v2)) >= st.theta))
                    return false;
        return true;
    }
    }
    return false;
}

/// Greedy leader clustering: users in ascending id order join the first
/// cluster whose leader satisfies the predicate, else found a new one.
inline ClusterModel cluster_users(const SocialSets& s, const ClusteringStrategy& st)
{
    st.validate();
    ClusterModel m;
    m.strategy = st;
    for (const auto& u : s.users) {
        ClusterId found = static_cast<ClusterId>(m.leaders.size());
        for (ClusterId c = 0; c < m.leaders.size(); ++c) {
            if (same_cluster(s, st, m.leaders[c], u)) {
                found = c;
                break;
            }
        }
        if (found == m.leaders.size())
            m.leaders.push_back(u);
        m.assignment.emplace(u, found);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Index

struct ListEntry {
    std::string item;
    std::int64_t score = 0;

    friend bool operator==(const ListEntry&, const ListEntry&) = default;
};

using ListKey = std::pair<std::string, ClusterId>; // (tag, cluster)

struct ClusteredIndex {
    SocialSets sets;
    ClusterModel model;
    std::map<ListKey, std::vector<ListEntry>> lists;

    const std::vector<ListEntry>& list(const std::string& tag, ClusterId c) const
    {
        static const std::vector<ListEntry> none;
        auto it = lists.find({tag, c});
        return it == lists.end() ? none : it->second;
    }

    std::int64_t stored_score(const std::string& tag, ClusterId c, const std::string& item) const
    {
        for (const auto& e : list(tag, c))
            if (e.item == item)
                return e.score;
        return 0;
    }

    std::size_t entry_count() const
    {
        std::size_t n = 0;
        for (const auto& [k, l] : lists)
            n += l.size();
        return n;
    }

    friend bool operator==(const ClusteredIndex&, const ClusteredIndex&) = default;
};

inline ClusteredIndex build_index(const SocialSets& sets, const ClusterModel& model, const std::set<std::string>& tags)
{
    for (const auto& u : sets.users)
        if (!model.assignment.count(u))
            fail(ErrorCode::InvalidArgument, "cluster model does not cover user " + u);
    ClusteredIndex idx{sets, model, {}};
    for (const auto& [key, taggers] : sets.taggers) {
        const auto& [item, tag] = key;
        if (!tags.count(tag))
            continue;
        // exact score per user: how many of the user's friends tagged it
        std::map<std::string, std::int64_t> per_user;
        for (const auto& v : taggers)
            for (const auto& w : sets.network_of(v))
                ++per_user[w];
        std::map<ClusterId, std::int64_t> best;
        for (const auto& [u, sc] : per_user) {
            auto c = model.assignment.find(u);
            if (c == model.assignment.end())
                continue;
            auto& b = best[c->second];
            b = std::max(b, sc);
        }
        for (const auto& [c, sc] : best)
            idx.lists[{tag, c}].push_back({item, sc});
    }
    for (auto& [key, list] : idx.lists)
        std::sort(list.begin(), list.end(), [](const ListEntry& a, const ListEntry& b) {
            return a.score != b.score ? a.score > b.score : a.item < b.item;
        });
    return idx;
}

inline ClusteredIndex build_index(const SocialSets& sets, const ClusterModel& model)
{
    return build_index(sets, model, sets.tags());
}

struct ScoredItem {
    std::string item;
    std::int64_t score = 0;

    friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

struct TopkStats {
    std::size_t sorted_accesses = 0;
    std::size_t exact_scored = 0;
    std::size_t depth = 0;
    bool stopped_early = false;
};

inline bool ranks_before(const ScoredItem& a, const ScoredItem& b)
{
    return a.score != b.score ? a.score > b.score : a.item < b.item;
}

/// Threshold algorithm over the user's cluster lists, one per keyword.
/// Items with a zero exact score are never returned.
inline std::vector<ScoredItem> topk_query(const ClusteredIndex& idx, const std::string& user,
    std::span<const std::string> keywords, std::size_t k, TopkStats* stats = nullptr)
{
    ClusterId c = idx.model.cluster_of(user);
    TopkStats local;
    TopkStats& st = stats ? *stats : local;
    st = {};
    std::vector<const std::vector<ListEntry>*> lists;
    for (const auto& kw : keywords)
        lists.push_back(&idx.list(kw, c));

    std::set<std::string> seen;
    std::vector<ScoredItem> best; // kept sorted, at most k entries
    if (k == 0)
        return best;
    for (std::size_t depth = 0;; ++depth) {
        bool any = false;
        std::int64_t threshold = 0;
        for (const auto* l : lists) {
            if (depth >= l->size())
                continue;
            any = true;
            const ListEntry& e = (*l)[depth];
            ++st.sorted_accesses;
            threshold += e.score;
            if (!seen.insert(e.item).second)
                continue;
            ++st.exact_scored;
            ScoredItem cand{e.item, exact_score(idx.sets, e.item, user, keywords)};
            if (cand.score <= 0)
                continue;
            best.insert(std::upper_bound(best.begin(), best.end(), cand, ranks_before), cand);
            if (best.size() > k)
                best.pop_back();
        }
        if (!any)
            break;
        st.depth = depth + 1;
        // unseen items score at most the sum of the entries just read
        if (best.size() == k && best.back().score > threshold) {
            st.stopped_early = true;
            break;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

/// items × tags per item × (fraction of users tagging) × bytes per entry.
inline std::uint64_t estimate_index_size(double users, double items, double tags_per_item, double tagger_fraction,
    double bytes_per_entry)
{
    for (double v : {users, items, tags_per_item, tagger_fraction, bytes_per_entry})
        if (!(v >= 0.0) || !std::isfinite(v))
            fail(ErrorCode::InvalidArgument, "index size inputs must be finite and non-negative");
    return static_cast<std::uint64_t>(std::llround(items * tags_per_item * (tagger_fraction * users) * bytes_per_entry));
}

} // namespace socialscope
