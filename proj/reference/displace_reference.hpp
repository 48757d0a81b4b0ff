#pragma once

// Serial reference implementation of the displacement metrics, written
// independently of the CSR-based engine: plain edge-list scans, no shared
// machinery. Linked only by tests and the benchmark, where it serves as the
// exhaustive-enumeration oracle and the baseline for the parallel sweep.

#include <cstdint>
#include <string>
#include <vector>

#include "displace/citation_graph.hpp"
#include "displace/displacement.hpp"

namespace displace::reference {

struct EdgeListGraph {
    std::vector<PaperRecord> papers;                    // index = internal id
    std::vector<std::pair<PaperId, PaperId>> edges;     // citing -> cited

    static EdgeListGraph from(const CitationGraph& graph);
};

/// Exhaustive recount of one focal's report by looping over every
/// (paper, edge) combination. Throws IneligibleFocalError like the engine.
DisplacementReport naive_decompose(const EdgeListGraph& graph, PaperId focal,
                                   const ReportConfig& config);

/// Serial sweep over all papers, ascending id; ineligible focals skipped.
std::vector<DisplacementReport> naive_batch(const EdgeListGraph& graph,
                                            const ReportConfig& config);

/// Distinct-citer recount per paper, for the adjacency consistency check.
std::vector<std::uint64_t> naive_citer_counts(const EdgeListGraph& graph);

/// Sign tallies over all eligible focals, recomputed from hash-map
/// adjacency built straight off the edge list. Cheap enough for 10^4-paper
/// corpora where the exhaustive oracle is not.
struct SignCounts {
    std::uint64_t reports = 0;
    std::uint64_t d_f_negative = 0;
    std::uint64_t d_f_positive = 0;
    std::uint64_t d_f_zero = 0;
    std::uint64_t b_f_gt1 = 0;
};

SignCounts sign_fraction_recount(const EdgeListGraph& graph,
                                 const ReportConfig& config);

} // namespace displace::reference
