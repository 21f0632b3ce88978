// Network-aware search on the travel site: John's friends who visited places
// near Denver, then a combined keyword and social ranking for Mary.

#include <cstdio>

#include "socialscope/discovery.hpp"
#include "socialscope/dsl.hpp"
#include "socialscope/fixtures.hpp"
#include "socialscope/presentation.hpp"

using namespace socialscope;

int main()
{
    Graph g = fixtures::travel_example();
    Graph near = network_search(g, "101", dsl::parse_condition("[type='destination'; kw:'near Denver']"));
    std::printf("friends near Denver: %zu nodes, %zu links\n", near.node_count(), near.link_count());
    for (const auto& [id, l] : near.links())
        std::printf("  %s: %s -> %s\n", id.c_str(), l.src.c_str(), l.tgt.c_str());

    DiscoveryConfig cfg;
    cfg.sim_threshold = 0.0;
    MeaningfulSocialGraph msg = discover(g, "102", dsl::parse_condition("[type='destination'; kw:'denver park']"), cfg);
    std::printf("ranking for Mary:\n");
    for (const auto& d : msg.ranking)
        std::printf("  %s  combined %s  semantic %s  social %s\n", d.item.c_str(), format_score(d.combined).c_str(),
            format_score(d.semantic).c_str(), format_score(d.social).c_str());

    std::vector<RankedItem> ranked;
    for (const auto& d : msg.ranking)
        ranked.push_back({d.item, d.combined});
    for (const auto& gr : select_groups(group_items(ranked, g, GroupingCriterion::topical()), 3))
        std::printf("group %s (%s): %zu items, quality %s\n", gr.id.c_str(), gr.label.c_str(), gr.size,
            format_score(gr.quality).c_str());
    return 0;
}
