// Builds clustered tag indexes over a synthetic tagging site with each
// clustering strategy and compares their size and query effort.

#include <cstdio>
#include <string>
#include <vector>

#include "socialscope/fixtures.hpp"
#include "socialscope/social_index.hpp"

using namespace socialscope;

int main()
{
    Graph g = fixtures::random_tagging(1);
    SocialSets sets = social_sets(g);
    std::vector<std::string> kws{"t00", "t03"};
    std::printf("%zu users, %zu (item, tag) pairs\n", sets.users.size(), sets.taggers.size());

    for (auto kind : {ClusteringKind::Network, ClusteringKind::Behavior, ClusteringKind::Hybrid}) {
        for (double theta : {0.0, 0.3, 0.8}) {
            ClusterModel model = cluster_users(sets, {kind, theta});
            ClusteredIndex idx = build_index(sets, model);
            std::size_t accesses = 0, early = 0;
            for (const auto& u : sets.users) {
                TopkStats st;
                topk_query(idx, u, kws, 5, &st);
                accesses += st.sorted_accesses;
                early += st.stopped_early ? 1 : 0;
            }
            std::printf("%-8s theta %.1f: %3zu clusters, %6zu entries, %6zu sorted accesses, %3zu early stops\n",
                std::string(clustering_name(kind)).c_str(), theta, model.leaders.size(), idx.entry_count(), accesses,
                early);
        }
    }

    ClusteredIndex idx = build_index(sets, cluster_users(sets, {ClusteringKind::Network, 0.3}));
    std::printf("top items for u000 on t00 t03:\n");
    for (const auto& r : topk_query(idx, "u000", kws, 5))
        std::printf("  %s  %lld\n", r.item.c_str(), static_cast<long long>(r.score));
    std::printf("estimated per-user index for 100k users, 1M items: %llu bytes\n",
        static_cast<unsigned long long>(estimate_index_size(100000, 1000000, 20, 0.05, 10)));
    return 0;
}
