#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "displace/displacement.hpp"

namespace displace {

/// Qualification thresholds for multiple-discovery pools.
struct PoolCriteria {
    std::uint64_t min_citations = 100;
    double min_d = 0.2; // strict lower bound on the chosen variant
    Variant variant = Variant::D0;
    std::size_t min_pool_size = 2;
};

/// A group of qualifying papers sharing one most-cited reference.
struct MultiplePool {
    PaperId anchor = kInvalidPaper;
    std::vector<PaperId> members; // sorted by external id
    int min_year = 0;
    int max_year = 0;

    std::size_t size() const { return members.size(); }
};

/// Partitions qualifying reports (c_f >= min_citations and D > min_d) by
/// their most-cited reference, drops pools below min_pool_size, and orders
/// pools by size descending then anchor external id. Reports whose selected
/// variant is undefined never qualify.
std::vector<MultiplePool> find_pools(const CitationGraph& graph,
                                     std::span<const DisplacementReport> reports,
                                     const PoolCriteria& criteria);

/// Pool-size histogram; counts sum to the number of pools.
std::map<std::size_t, std::size_t> pool_size_histogram(
    std::span<const MultiplePool> pools);

} // namespace displace
