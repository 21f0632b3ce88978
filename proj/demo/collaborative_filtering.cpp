// Recommends destinations to John from users with a similar visit history,
// then explains the top pick.

#include <cstdio>

#include "socialscope/discovery.hpp"
#include "socialscope/fixtures.hpp"
#include "socialscope/presentation.hpp"

using namespace socialscope;

int main()
{
    Graph g = fixtures::cf_example();
    CfResult r = cf_recommend(g, "101");
    std::printf("recommendations for John:\n");
    for (const auto& item : r.ranking)
        std::printf("  %s  %s\n", item.item.c_str(), format_score(item.score).c_str());
    if (r.ranking.empty())
        return 0;

    Explanation e = explain_item(g, "101", r.ranking[0].item, ExplainStrategy::Collaborative);
    std::printf("why %s: %s\n", e.item.c_str(), e.summary.c_str());
    for (const auto& ev : e.evidence)
        std::printf("  similar user %s  weight %s\n", ev.element.c_str(), format_score(ev.weight).c_str());
    return 0;
}
