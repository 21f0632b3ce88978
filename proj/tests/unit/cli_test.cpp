#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "socialscope/cli.hpp"
#include "socialscope/fixtures.hpp"

using namespace socialscope;

namespace {

const std::string kData = SOCIALSCOPE_DATA_DIR;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> with_graph(std::vector<std::string> args, const std::string& fixture)
{
    args.push_back("--nodes");
    args.push_back(kData + "/fixtures/" + fixture + ".nodes.jsonl");
    args.push_back("--links");
    args.push_back(kData + "/fixtures/" + fixture + ".links.jsonl");
    return args;
}

std::vector<Json> records(const std::string& text)
{
    std::vector<Json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        out.push_back(Json::parse(line));
    return out;
}

std::filesystem::path scratch(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("socialscope_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Cli, EstimateIndex)
{
    Outcome r = run({"estimate-index", "--users", "100000", "--items", "1000000", "--tags-per-item", "100",
        "--tagger-fraction", "0.1", "--bytes", "1"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "1000000000000 bytes\n");
    Outcome j = run({"--format", "jsonl", "estimate-index", "--users", "10", "--items", "10", "--tags-per-item", "1",
        "--tagger-fraction", "1", "--bytes", "1"});
    EXPECT_EQ(records(j.out).at(0)["bytes"], 100);
}

TEST(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"recommend", "--user", "101"}).code, 2);
    EXPECT_EQ(run(with_graph({"recommend", "--user", "101", "--method", "magic"}, "cf")).code, 2);
    EXPECT_EQ(run(with_graph({"topk", "--user", "u1", "--keywords", "jazz", "--strategy", "bogus"}, "f4")).code, 2);
    EXPECT_EQ(run(with_graph({"topk", "--user", "u1", "--keywords", "  "}, "f4")).code, 2);
    EXPECT_EQ(run(with_graph({"group", "--user", "101", "--criterion", "nonsense"}, "cf")).code, 2);
    EXPECT_EQ(run({"estimate-index", "--users", "-1", "--items", "1", "--tags-per-item", "1", "--tagger-fraction",
                  "1", "--bytes", "1"})
                  .code,
        2);
    EXPECT_EQ(run({"--format", "xml", "estimate-index"}).code, 2);
}

TEST(Cli, RuntimeErrorsExitOne)
{
    Outcome r = run(with_graph({"recommend", "--user", "999"}, "cf"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("UnknownUser"), std::string::npos);
    EXPECT_EQ(run({"recommend", "--user", "1", "--nodes", "/nonexistent", "--links", "/nonexistent"}).code, 1);
    EXPECT_EQ(run(with_graph({"query", "/nonexistent.ss"}, "cf")).code, 1);
    EXPECT_EQ(run(with_graph({"explain", "--user", "101", "--item", "nowhere"}, "cf")).code, 1);
    EXPECT_EQ(run(with_graph({"discover", "--user", "101", "--query", "[type="}, "cf")).code, 1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, RecommendWorkedExample)
{
    Outcome r = run(with_graph({"recommend", "--user", "101", "--k", "1", "--threshold", "0.5"}, "cf"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "1\tR\t0.666667\n");
    Outcome j = run(with_graph({"--format", "jsonl", "recommend", "--user", "101"}, "cf"));
    auto recs = records(j.out);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0]["item"], "R");
    EXPECT_DOUBLE_EQ(recs[0]["score"].get<double>(), 0.666667);
}

TEST(Cli, TopkWorkedExample)
{
    Outcome r = run(with_graph({"topk", "--user", "u1", "--keywords", "jazz", "--k", "1"}, "f4"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "1\ti1\t2\n");
}

TEST(Cli, SnapshotMatchesInMemoryIndex)
{
    auto dir = scratch("snapshot");
    std::string idx = (dir / "tags.idx").string();
    for (const char* strategy : {"network", "behavior", "hybrid"}) {
        Outcome b = run(with_graph({"build-index", "--strategy", strategy, "--theta", "0.3", "--out", idx}, "tagging_small"));
        ASSERT_EQ(b.code, 0) << b.err;
        for (const char* kw : {"t00", "t01 t02", "t03 t04 t05"}) {
            Outcome a = run({"topk", "--index", idx, "--user", "u003", "--keywords", kw, "--k", "5"});
            Outcome m = run(with_graph(
                {"topk", "--strategy", strategy, "--theta", "0.3", "--user", "u003", "--keywords", kw, "--k", "5"},
                "tagging_small"));
            EXPECT_EQ(a.code, 0);
            EXPECT_EQ(a.out, m.out);
        }
    }
    EXPECT_EQ(run({"topk", "--index", (dir / "missing.idx").string(), "--user", "u1", "--keywords", "jazz"}).code, 1);
    std::filesystem::remove_all(dir);
}

TEST(Cli, ResultsEqualLibraryCalls)
{
    Graph g = fixtures::cf_example();
    auto lib = cf_recommend(g, "101").ranking;
    std::ostringstream want;
    for (std::size_t i = 0; i < lib.size(); ++i)
        want << i + 1 << '\t' << lib[i].item << '\t' << format_score(lib[i].score) << '\n';
    EXPECT_EQ(run(with_graph({"recommend", "--user", "101"}, "cf")).out, want.str());

    Graph travel = fixtures::travel_example();
    Condition q = dsl::parse_condition("[type='destination'; kw:'denver']");
    DiscoveryConfig cfg;
    cfg.sim_threshold = 0.0;
    auto msg = discover(travel, "102", q, cfg);
    Outcome d = run(with_graph({"--format", "jsonl", "discover", "--user", "102", "--query",
                               "[type='destination'; kw:'denver']", "--threshold", "0"},
        "travel"));
    ASSERT_EQ(d.code, 0) << d.err;
    auto recs = records(d.out);
    ASSERT_EQ(recs.size(), msg.ranking.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(recs[i]["item"], msg.ranking[i].item);
        EXPECT_NEAR(recs[i]["combined"].get<double>(), msg.ranking[i].combined, 1e-6);
    }

    Explanation e = explain_item(g, "101", "R", ExplainStrategy::Collaborative);
    Outcome x = run(with_graph({"explain", "--user", "101", "--item", "R", "--strategy", "collaborative"}, "cf"));
    EXPECT_EQ(x.out, e.summary + "\n102\t0.666667\n");
}

TEST(Cli, DiscoverSavesMeaningfulGraph)
{
    auto dir = scratch("discover");
    std::string n = (dir / "msg.nodes.jsonl").string(), l = (dir / "msg.links.jsonl").string();
    Outcome r = run(with_graph(
        {"discover", "--user", "101", "--query", "[name='Red Rocks']", "--save-nodes", n, "--save-links", l}, "cf"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(load_graph(n, l), discover(fixtures::cf_example(), "101", dsl::parse_condition("[name='Red Rocks']")).graph);
    EXPECT_EQ(run(with_graph({"discover", "--user", "101", "--save-nodes", n}, "cf")).code, 2);
    std::filesystem::remove_all(dir);
}

TEST(Cli, GroupAndExplain)
{
    Outcome r = run(with_graph({"--format", "jsonl", "group", "--user", "101", "--query",
                                   "[type='destination'; kw:'denver park']", "--criterion", "structural:type",
                                   "--explain", "collaborative", "--threshold", "0", "--max-groups", "1"},
        "travel"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto recs = records(r.out);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0]["group"], "structural:type=destination");
    EXPECT_EQ(recs[0]["members"], Json::parse(R"(["201","202","203"])"));
    EXPECT_EQ(recs[0]["explanation"], "On average 0% of your friends endorsed the items in destination");
    Outcome e = run(with_graph({"explain", "--user", "me", "--item", "x", "--strategy", "collaborative"}, "endorsement"));
    EXPECT_EQ(e.out.substr(0, e.out.find('\n')), "60% of your friends endorsed this item");
}

TEST(Cli, QueryRunsScripts)
{
    Outcome r = run(with_graph({"query", kData + "/scripts/collaborative_filtering.ss"}, "cf"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "G7: 4 nodes, 3 links");

    auto dir = scratch("query");
    Outcome s = run(with_graph({"query", kData + "/scripts/friends_near_denver.ss", "--save-dir", dir.string()},
        "travel"));
    ASSERT_EQ(s.code, 0) << s.err;
    EXPECT_FALSE(std::filesystem::is_empty(dir));
    EXPECT_EQ(run(with_graph({"query", kData + "/scripts/friends_near_denver.ss", "--print", "Nope"}, "travel"))
                  .code,
        2);
    std::filesystem::remove_all(dir);
}

TEST(Cli, GenerateIsSeeded)
{
    auto dir = scratch("generate");
    auto gen = [&](const std::string& tag, std::vector<std::string> extra) {
        std::vector<std::string> args{"generate", "--kind", "travel", "--out-nodes", (dir / (tag + ".n")).string(),
            "--out-links", (dir / (tag + ".l")).string()};
        args.insert(args.end(), extra.begin(), extra.end());
        EXPECT_EQ(run(args).code, 0);
        return load_graph((dir / (tag + ".n")).string(), (dir / (tag + ".l")).string());
    };
    EXPECT_EQ(gen("a", {"--seed", "9"}), gen("b", {"--seed", "9"}));
    EXPECT_EQ(gen("c", {"--seed", "9"}), fixtures::random_travel(9));
    ::setenv("SOCIALSCOPE_SEED", "9", 1);
    EXPECT_EQ(gen("d", {}), fixtures::random_travel(9));
    ::unsetenv("SOCIALSCOPE_SEED");
    EXPECT_EQ(gen("e", {}), fixtures::random_travel(1));
    std::filesystem::remove_all(dir);
}
