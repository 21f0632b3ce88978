#pragma once

// The socialscope command line. run_command takes the arguments without the
// program name and returns the process exit code: 0 success, 1 runtime
// error, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "socialscope/discovery.hpp"
#include "socialscope/dsl.hpp"
#include "socialscope/fixtures.hpp"
#include "socialscope/index_snapshot.hpp"
#include "socialscope/io.hpp"
#include "socialscope/presentation.hpp"
#include "socialscope/social_index.hpp"

namespace socialscope::cli {

/// Bad flag values detected after parsing; reported like parse errors.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Score as a JSON number with six decimals.
inline Json score_json(double x) { return std::nearbyint(x * 1e6) / 1e6; }

struct Output {
    std::ostream& out;
    bool jsonl = false;

    void record(const Json& j) const { out << j.dump() << '\n'; }
};

struct GraphArgs {
    std::string nodes;
    std::string links;

    void add(CLI::App* app)
    {
        app->add_option("--nodes", nodes, "Node records (JSON lines)")->required();
        app->add_option("--links", links, "Link records (JSON lines)")->required();
    }

    Graph load() const { return load_graph(nodes, links); }
};

inline void print_graph(const Output& o, const std::string& binding, const Graph& g)
{
    if (o.jsonl) {
        for (const auto& [id, n] : g.nodes()) {
            Json j{{"binding", binding}, {"kind", "node"}};
            j.update(node_to_json(n));
            o.record(j);
        }
        for (const auto& [id, l] : g.links()) {
            Json j{{"binding", binding}, {"kind", "link"}};
            j.update(link_to_json(l));
            o.record(j);
        }
        return;
    }
    o.out << binding << ": " << g.node_count() << " nodes, " << g.link_count() << " links\n";
    for (const auto& [id, n] : g.nodes())
        o.out << "  node " << id << ' ' << attrs_to_json(n.attrs).dump() << '\n';
    for (const auto& [id, l] : g.links())
        o.out << "  link " << id << ' ' << l.src << " -> " << l.tgt << ' ' << attrs_to_json(l.attrs).dump() << '\n';
}

inline void print_ranking(const Output& o, const std::vector<RankedItem>& r)
{
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (o.jsonl)
            o.record(Json{{"rank", i + 1}, {"item", r[i].item}, {"score", score_json(r[i].score)}});
        else
            o.out << i + 1 << '\t' << r[i].item << '\t' << format_score(r[i].score) << '\n';
    }
}

inline std::vector<std::string> keyword_list(const std::string& text)
{
    auto kws = tokenize(text);
    if (kws.empty())
        throw UsageError("--keywords needs at least one keyword");
    return kws;
}

inline ClusteringStrategy strategy_of(const std::string& name, double theta)
{
    auto kind = clustering_from_name(name);
    if (!kind)
        throw UsageError("--strategy must be network, behavior or hybrid, got '" + name + "'");
    if (!(theta >= 0 && theta <= 1))
        throw UsageError("--theta must lie in [0,1]");
    return {*kind, theta};
}

inline std::uint64_t seed_from_env()
{
    const char* s = std::getenv("SOCIALSCOPE_SEED");
    if (!s || !*s)
        return 1;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (*end)
        throw UsageError("SOCIALSCOPE_SEED must be a non-negative integer");
    return v;
}

} // namespace detail

inline int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    using namespace detail;
    CLI::App app{"Query, recommend and explain over a social content graph", "socialscope"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "jsonl"}));

    // query
    auto* query = app.add_subcommand("query", "Run a graph algebra script");
    GraphArgs q_graph;
    q_graph.add(query);
    std::string script, input_name = "G", save_dir;
    std::vector<std::string> print_names;
    bool no_share = false;
    query->add_option("script", script, "Script file")->required();
    query->add_option("--input", input_name, "Name the loaded graph is bound to");
    query->add_option("--print", print_names, "Bindings to print (default: the last one)");
    query->add_option("--save-dir", save_dir, "Write every printed binding as <dir>/<name>.{nodes,links}.jsonl");
    query->add_flag("--no-share", no_share, "Evaluate repeated subexpressions separately");

    // recommend
    auto* recommend = app.add_subcommand("recommend", "Recommend items to a user");
    GraphArgs r_graph;
    r_graph.add(recommend);
    std::string user, method = "cf";
    std::size_t k = 10;
    DiscoveryConfig cfg;
    recommend->add_option("--user", user, "User id")->required();
    recommend->add_option("--k", k, "Result count");
    recommend->add_option("--threshold", cfg.sim_threshold, "Similarity threshold (strict)");
    recommend->add_option("--alpha", cfg.alpha, "Accepted for symmetry with discover; unused");
    recommend->add_option("--method", method, "cf or content")->check(CLI::IsMember({"cf", "content"}));

    // discover
    auto* discover_cmd = app.add_subcommand("discover", "Rank items for a user and a query");
    GraphArgs d_graph;
    d_graph.add(discover_cmd);
    std::string query_text = "[]", msg_nodes, msg_links;
    discover_cmd->add_option("--user", user, "User id")->required();
    discover_cmd->add_option("--query", query_text, "Condition, e.g. \"[type='destination'; kw:'denver']\"");
    discover_cmd->add_option("--k", k, "Result count");
    discover_cmd->add_option("--alpha", cfg.alpha, "Weight of semantic relevance");
    discover_cmd->add_option("--threshold", cfg.sim_threshold, "Similarity threshold (strict)");
    discover_cmd->add_option("--save-nodes", msg_nodes, "Write the result graph's nodes");
    discover_cmd->add_option("--save-links", msg_links, "Write the result graph's links");

    // build-index
    auto* build = app.add_subcommand("build-index", "Build a clustered tag index snapshot");
    GraphArgs b_graph;
    b_graph.add(build);
    std::string strategy = "network", index_path;
    double theta = 0.5;
    build->add_option("--strategy", strategy, "network, behavior or hybrid");
    build->add_option("--theta", theta, "Clustering threshold in [0,1]");
    build->add_option("--out", index_path, "Snapshot file")->required();

    // topk
    auto* topk = app.add_subcommand("topk", "Network-aware keyword top-k");
    std::string t_nodes, t_links, keywords;
    bool stats = false;
    topk->add_option("--index", index_path, "Snapshot from build-index");
    topk->add_option("--nodes", t_nodes, "Node records, to build the index in memory");
    topk->add_option("--links", t_links, "Link records, to build the index in memory");
    topk->add_option("--strategy", strategy, "network, behavior or hybrid");
    topk->add_option("--theta", theta, "Clustering threshold in [0,1]");
    topk->add_option("--user", user, "User id")->required();
    topk->add_option("--keywords", keywords, "Tags, separated by spaces")->required();
    topk->add_option("--k", k, "Result count");
    topk->add_flag("--stats", stats, "Report list accesses");

    // group
    auto* group = app.add_subcommand("group", "Group a user's discovered items");
    GraphArgs g_graph;
    g_graph.add(group);
    std::string criterion = "social:0.5", explain_as;
    std::size_t max_groups = 5;
    group->add_option("--user", user, "User id")->required();
    group->add_option("--query", query_text, "Condition selecting the items");
    group->add_option("--k", k, "Items to group");
    group->add_option("--alpha", cfg.alpha, "Weight of semantic relevance");
    group->add_option("--threshold", cfg.sim_threshold, "Similarity threshold (strict)");
    group->add_option("--criterion", criterion, "social:<theta>, topical or structural:<attr>");
    group->add_option("--max-groups", max_groups, "Groups to show");
    group->add_option("--explain", explain_as, "Add a group explanation: content or collaborative")
        ->check(CLI::IsMember({"content", "collaborative"}));

    // explain
    auto* explain = app.add_subcommand("explain", "Explain an item to a user");
    GraphArgs e_graph;
    e_graph.add(explain);
    std::string item, how = "collaborative";
    explain->add_option("--user", user, "User id")->required();
    explain->add_option("--item", item, "Item id")->required();
    explain->add_option("--strategy", how, "content or collaborative")
        ->check(CLI::IsMember({"content", "collaborative"}));

    // estimate-index
    auto* estimate = app.add_subcommand("estimate-index", "Per-user index size estimate");
    double users = 0, items = 0, tags_per_item = 0, fraction = 0, bytes = 0;
    estimate->add_option("--users", users)->required()->check(CLI::NonNegativeNumber);
    estimate->add_option("--items", items)->required()->check(CLI::NonNegativeNumber);
    estimate->add_option("--tags-per-item", tags_per_item)->required()->check(CLI::NonNegativeNumber);
    estimate->add_option("--tagger-fraction", fraction)->required()->check(CLI::NonNegativeNumber);
    estimate->add_option("--bytes", bytes, "Bytes per index entry")->required()->check(CLI::NonNegativeNumber);

    // generate
    auto* generate = app.add_subcommand("generate", "Write a synthetic graph (seed from SOCIALSCOPE_SEED)");
    std::string kind = "travel", out_nodes, out_links;
    std::optional<std::uint64_t> seed;
    std::size_t size = 30;
    generate->add_option("--kind", kind, "travel, tagging or mixed")->check(CLI::IsMember({"travel", "tagging", "mixed"}));
    generate->add_option("--seed", seed, "Overrides SOCIALSCOPE_SEED");
    generate->add_option("--size", size, "Rough node count (travel, mixed)");
    generate->add_option("--out-nodes", out_nodes)->required();
    generate->add_option("--out-links", out_links)->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    Output o{out, format == "jsonl"};

    try {
        if (query->parsed()) {
            std::ifstream in(script);
            if (!in)
                fail(ErrorCode::IoError, "cannot open " + script);
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            dsl::Program program = dsl::parse(text);
            if (program.stmts.empty())
                return 0;
            for (const auto& name : print_names) {
                bool bound = false;
                for (const auto& s : program.stmts)
                    bound = bound || s.name == name;
                if (!bound)
                    throw UsageError("--print " + name + ": no such binding");
            }
            dsl::CompileOptions opts;
            opts.inputs = std::set<std::string>{input_name};
            opts.share = !no_share;
            dsl::Bindings result = dsl::execute(dsl::compile(program, opts), {{input_name, q_graph.load()}});
            if (print_names.empty())
                print_names.push_back(program.stmts.back().name);
            for (const auto& name : print_names) {
                print_graph(o, name, result.at(name));
                if (!save_dir.empty()) {
                    std::filesystem::create_directories(save_dir);
                    auto base = std::filesystem::path(save_dir) / name;
                    save_graph(result.at(name), base.string() + ".nodes.jsonl", base.string() + ".links.jsonl");
                }
            }
        } else if (recommend->parsed()) {
            Graph g = r_graph.load();
            cfg.k = k;
            if (method == "cf")
                print_ranking(o, cf_recommend(g, user, cfg).ranking);
            else
                print_ranking(o, content_recommend(g, user, k));
        } else if (discover_cmd->parsed()) {
            Graph g = d_graph.load();
            Condition c = dsl::parse_condition(query_text);
            cfg.k = k;
            MeaningfulSocialGraph msg = discover(g, user, c, cfg);
            for (std::size_t i = 0; i < msg.ranking.size(); ++i) {
                const auto& r = msg.ranking[i];
                if (o.jsonl)
                    o.record(Json{{"rank", i + 1}, {"item", r.item}, {"combined", score_json(r.combined)},
                        {"semantic", score_json(r.semantic)}, {"social", score_json(r.social)}});
                else
                    o.out << i + 1 << '\t' << r.item << '\t' << format_score(r.combined) << '\t'
                          << format_score(r.semantic) << '\t' << format_score(r.social) << '\n';
            }
            if (!o.jsonl)
                o.out << "graph: " << msg.graph.node_count() << " nodes, " << msg.graph.link_count() << " links\n";
            if (msg_nodes.empty() != msg_links.empty())
                throw UsageError("--save-nodes and --save-links go together");
            if (!msg_nodes.empty())
                save_graph(msg.graph, msg_nodes, msg_links);
        } else if (build->parsed()) {
            ClusteringStrategy st = strategy_of(strategy, theta);
            Graph g = b_graph.load();
            SocialSets sets = social_sets(g);
            ClusteredIndex idx = build_index(sets, cluster_users(sets, st));
            save_snapshot(idx, index_path);
            if (o.jsonl)
                o.record(Json{{"strategy", strategy}, {"theta", theta}, {"users", idx.model.assignment.size()},
                    {"clusters", idx.model.leaders.size()}, {"lists", idx.lists.size()},
                    {"entries", idx.entry_count()}});
            else
                o.out << "strategy " << strategy << " theta " << format_number(theta) << ": "
                      << idx.model.assignment.size() << " users, " << idx.model.leaders.size() << " clusters, "
                      << idx.lists.size() << " lists, " << idx.entry_count() << " entries\n";
        } else if (topk->parsed()) {
            std::vector<std::string> kws = keyword_list(keywords);
            ClusteredIndex idx;
            if (!index_path.empty()) {
                if (!t_nodes.empty() || !t_links.empty())
                    throw UsageError("give either --index or --nodes/--links, not both");
                idx = load_snapshot(index_path);
            } else {
                if (t_nodes.empty() || t_links.empty())
                    throw UsageError("topk needs --index or both --nodes and --links");
                ClusteringStrategy st = strategy_of(strategy, theta);
                SocialSets sets = social_sets(load_graph(t_nodes, t_links));
                idx = build_index(sets, cluster_users(sets, st));
            }
            TopkStats ts;
            auto result = topk_query(idx, user, kws, k, &ts);
            for (std::size_t i = 0; i < result.size(); ++i) {
                if (o.jsonl)
                    o.record(Json{{"rank", i + 1}, {"item", result[i].item}, {"score", result[i].score}});
                else
                    o.out << i + 1 << '\t' << result[i].item << '\t' << result[i].score << '\n';
            }
            if (stats) {
                if (o.jsonl)
                    o.record(Json{{"sorted_accesses", ts.sorted_accesses}, {"exact_scored", ts.exact_scored},
                        {"depth", ts.depth}, {"stopped_early", ts.stopped_early}});
                else
                    o.out << "# sorted accesses " << ts.sorted_accesses << ", exact scores " << ts.exact_scored
                          << ", depth " << ts.depth << (ts.stopped_early ? ", stopped early" : "") << '\n';
            }
        } else if (group->parsed()) {
            GroupingCriterion gc = [&] {
                try {
                    return GroupingCriterion::parse(criterion);
                } catch (const Error& e) {
                    throw UsageError(e.what());
                }
            }();
            if (max_groups < 1)
                throw UsageError("--max-groups must be at least 1");
            Graph g = g_graph.load();
            cfg.k = k;
            MeaningfulSocialGraph msg = discover(g, user, dsl::parse_condition(query_text), cfg);
            std::vector<RankedItem> ranked;
            for (const auto& r : msg.ranking)
                ranked.push_back({r.item, r.combined});
            auto groups = select_groups(group_items(ranked, g, gc), max_groups);
            for (const auto& gr : groups) {
                std::optional<AggregateExplanation> why;
                if (!explain_as.empty())
                    why = aggregate_group(g, user, gr, *strategy_from_name(explain_as));
                if (o.jsonl) {
                    Json j{{"group", gr.id}, {"label", gr.label}, {"size", gr.size}, {"quality", score_json(gr.quality)},
                        {"members", gr.members}};
                    if (why) {
                        j["ratio"] = score_json(why->ratio);
                        j["explanation"] = why->sentence;
                    }
                    o.record(j);
                } else {
                    std::string members;
                    for (const auto& m : gr.members)
                        members += (members.empty() ? "" : ",") + m;
                    o.out << gr.id << '\t' << gr.size << '\t' << format_score(gr.quality) << '\t' << gr.label << '\t'
                          << members << '\n';
                    if (why)
                        o.out << "  " << why->sentence << '\n';
                }
            }
        } else if (explain->parsed()) {
            Graph g = e_graph.load();
            ExplainStrategy st = *strategy_from_name(how);
            Explanation e = explain_item(g, user, item, st);
            AggregateExplanation agg = aggregate_item(g, user, item, st);
            if (o.jsonl) {
                Json ev = Json::array();
                for (const auto& x : e.evidence)
                    ev.push_back(Json{{"element", x.element}, {"weight", score_json(x.weight)}});
                o.record(Json{{"user", user}, {"item", item}, {"strategy", how}, {"summary", e.summary},
                    {"ratio", score_json(agg.ratio)}, {"evidence", ev}});
            } else {
                o.out << e.summary << '\n';
                for (const auto& x : e.evidence)
                    o.out << x.element << '\t' << format_score(x.weight) << '\n';
            }
        } else if (estimate->parsed()) {
            std::uint64_t n = estimate_index_size(users, items, tags_per_item, fraction, bytes);
            if (o.jsonl)
                o.record(Json{{"bytes", n}});
            else
                o.out << n << " bytes\n";
        } else if (generate->parsed()) {
            std::uint64_t s = seed ? *seed : seed_from_env();
            Graph g;
            if (kind == "travel")
                g = fixtures::random_travel(s, size);
            else if (kind == "tagging")
                g = fixtures::random_tagging(s);
            else
                g = fixtures::random_graph(s, size, size * 2);
            save_graph(g, out_nodes, out_links);
            if (!o.jsonl)
                o.out << "wrote " << g.node_count() << " nodes, " << g.link_count() << " links (seed " << s << ")\n";
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace socialscope::cli
