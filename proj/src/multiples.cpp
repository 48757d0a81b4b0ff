#include "displace/multiples.hpp"

#include <algorithm>
#include <unordered_map>

namespace displace {

namespace {

std::optional<double> variant_value(const DisplacementReport& r, Variant v) {
    switch (v) {
    case Variant::D0: return r.d0;
    case Variant::D1: return r.d1;
    case Variant::D2: return r.d2;
    case Variant::D3: return r.d3;
    default: return r.d4;
    }
}

} // namespace

std::vector<MultiplePool> find_pools(const CitationGraph& graph,
                                     std::span<const DisplacementReport> reports,
                                     const PoolCriteria& criteria) {
    std::unordered_map<PaperId, std::vector<PaperId>> by_anchor;
    for (const auto& r : reports) {
        if (r.c_f < criteria.min_citations) continue;
        auto d = variant_value(r, criteria.variant);
        if (!d || !(*d > criteria.min_d)) continue;
        by_anchor[r.top_reference].push_back(r.focal);
    }

    std::vector<MultiplePool> pools;
    pools.reserve(by_anchor.size());
    for (auto& [anchor, members] : by_anchor) {
        if (members.size() < criteria.min_pool_size) continue;
        MultiplePool pool;
        pool.anchor = anchor;
        pool.members = std::move(members);
        std::sort(pool.members.begin(), pool.members.end(),
                  [&](PaperId a, PaperId b) {
                      return graph.external_id(a) < graph.external_id(b);
                  });
        pool.min_year = graph.year(pool.members.front());
        pool.max_year = pool.min_year;
        for (PaperId m : pool.members) {
            pool.min_year = std::min(pool.min_year, graph.year(m));
            pool.max_year = std::max(pool.max_year, graph.year(m));
        }
        pools.push_back(std::move(pool));
    }

    std::sort(pools.begin(), pools.end(),
              [&](const MultiplePool& a, const MultiplePool& b) {
                  if (a.size() != b.size()) return a.size() > b.size();
                  return graph.external_id(a.anchor) < graph.external_id(b.anchor);
              });
    return pools;
}

std::map<std::size_t, std::size_t> pool_size_histogram(
    std::span<const MultiplePool> pools) {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& pool : pools) ++hist[pool.size()];
    return hist;
}

} // namespace displace
