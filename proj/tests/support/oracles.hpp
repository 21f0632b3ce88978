#pragma once

// Brute-force reference implementations. They read graphs only through the
// plain node/link records and never call the engine's operators.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "socialscope/graph.hpp"

namespace oracle {

using socialscope::Graph;
using socialscope::Link;
using socialscope::Node;

inline std::set<std::string> tokens_of(const std::string& s)
{
    std::set<std::string> out;
    std::string cur;
    for (char ch : s) {
        unsigned char c = static_cast<unsigned char>(ch);
        bool word = c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        if (word) {
            cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!cur.empty()) {
            out.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty())
        out.insert(cur);
    return out;
}

inline std::set<std::string> string_tokens(const socialscope::Attrs& attrs)
{
    std::set<std::string> out;
    for (const auto& [name, value] : attrs)
        for (const auto& v : value.values())
            if (const auto* s = std::get_if<std::string>(&v))
                for (const auto& t : tokens_of(*s))
                    out.insert(t);
    return out;
}

inline double keyword_score(const socialscope::Attrs& attrs, const std::vector<std::string>& kws)
{
    auto toks = string_tokens(attrs);
    double hit = 0;
    for (const auto& k : kws)
        hit += toks.count(k) ? 1 : 0;
    return hit / static_cast<double>(kws.size());
}

template<typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b)
{
    if (a.empty() && b.empty())
        return 0.0;
    std::size_t inter = 0;
    for (const auto& x : a)
        inter += b.count(x);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

inline bool typed(const socialscope::Attrs& attrs, const std::string& t)
{
    auto it = attrs.find("type");
    return it != attrs.end() && it->second.contains(socialscope::Scalar(t));
}

/// Induced graph over a set of link ids of `g` plus extra node ids.
inline Graph induced(const Graph& g, const std::set<std::string>& link_ids, const std::set<std::string>& node_ids = {})
{
    std::map<std::string, Node> nodes;
    std::vector<Link> links;
    for (const auto& id : link_ids) {
        const Link& l = g.links().at(id);
        links.push_back(l);
        nodes.emplace(l.src, g.nodes().at(l.src));
        nodes.emplace(l.tgt, g.nodes().at(l.tgt));
    }
    for (const auto& id : node_ids)
        nodes.emplace(id, g.nodes().at(id));
    std::vector<Node> ns;
    for (auto& [id, n] : nodes)
        ns.push_back(n);
    return socialscope::build_graph(std::move(ns), std::move(links));
}

/// "Find the user's friends who have visited qualifying places, and all
/// their activities", by direct traversal.
inline Graph friends_who_visited(const Graph& g, const std::string& user, const std::function<bool(const Node&)>& place)
{
    std::set<std::string> result;

    std::set<std::string> friends;
    for (const auto& [id, l] : g.links())
        if (l.src == user && typed(l.attrs, "friend"))
            friends.insert(l.tgt);

    std::set<std::string> visitors;
    for (const auto& [id, l] : g.links()) {
        if (!typed(l.attrs, "visit") || !place(g.nodes().at(l.tgt)))
            continue;
        if (friends.count(l.src)) {
            result.insert(id);
            visitors.insert(l.src);
        }
    }
    for (const auto& [id, l] : g.links())
        if (l.src == user && typed(l.attrs, "friend") && visitors.count(l.tgt))
            result.insert(id);
    for (const auto& [id, l] : g.links())
        if (typed(l.attrs, "act") && visitors.count(l.src))
            result.insert(id);
    return induced(g, result);
}

/// Per unvisited destination: mean similarity over (similar user, visit link
/// to the destination) pairs, where similar users share a visited place with
/// `user` and have visit-set Jaccard above `threshold`.
inline std::map<std::string, double> cf_scores(const Graph& g, const std::string& user, double threshold)
{
    std::map<std::string, std::set<std::string>> vst;
    for (const auto& [id, l] : g.links())
        if (typed(l.attrs, "visit"))
            vst[l.src].insert(l.tgt);
    const auto& mine = vst[user];
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& [u, places] : vst) {
        if (u == user)
            continue;
        bool common = std::any_of(places.begin(), places.end(), [&](const auto& p) { return mine.count(p) > 0; });
        double sim = jaccard(mine, places);
        if (!common || !(sim > threshold))
            continue;
        for (const auto& [id, l] : g.links()) {
            if (l.src != u || !typed(l.attrs, "visit") || !typed(g.nodes().at(l.tgt).attrs, "destination"))
                continue;
            acc[l.tgt].first += sim;
            acc[l.tgt].second += 1;
        }
    }
    std::map<std::string, double> out;
    for (const auto& [d, sum_n] : acc)
        if (!mine.count(d))
            out[d] = sum_n.first / sum_n.second;
    return out;
}

struct Sets {
    std::map<std::string, std::set<std::string>> network;
    std::map<std::string, std::set<std::string>> items;
    std::map<std::pair<std::string, std::string>, std::set<std::string>> taggers;
    std::set<std::string> users;
};

inline Sets scan_sets(const Graph& g)
{
    Sets s;
    for (const auto& [id, n] : g.nodes())
        if (typed(n.attrs, "user"))
            s.users.insert(id);
    for (const auto& [id, l] : g.links()) {
        if (typed(l.attrs, "friend")) {
            s.network[l.src].insert(l.tgt);
            s.network[l.tgt].insert(l.src);
        }
        if (typed(l.attrs, "tag")) {
            s.items[l.src].insert(l.tgt);
            auto it = l.attrs.find("tags");
            if (it == l.attrs.end())
                continue;
            for (const auto& v : it->second.values())
                if (const auto* str = std::get_if<std::string>(&v))
                    for (const auto& t : tokens_of(*str))
                        s.taggers[{l.tgt, t}].insert(l.src);
        }
    }
    return s;
}

inline long exact_score(const Sets& s, const std::string& item, const std::string& user, const std::vector<std::string>& kws)
{
    long total = 0;
    auto net = s.network.find(user);
    if (net == s.network.end())
        return 0;
    for (const auto& k : kws) {
        auto t = s.taggers.find({item, k});
        if (t == s.taggers.end())
            continue;
        for (const auto& v : t->second)
            total += net->second.count(v);
    }
    return total;
}

/// Exhaustive top-k over every item with a positive score; ties by id.
inline std::vector<std::pair<std::string, long>> topk(const Sets& s, const Graph& g, const std::string& user,
    const std::vector<std::string>& kws, std::size_t k)
{
    std::vector<std::pair<std::string, long>> all;
    for (const auto& [id, n] : g.nodes()) {
        long sc = exact_score(s, id, user, kws);
        if (sc > 0)
            all.emplace_back(id, sc);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (all.size() > k)
        all.resize(k);
    return all;
}

} // namespace oracle
