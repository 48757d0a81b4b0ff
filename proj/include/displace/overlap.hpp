#pragma once

#include <cstdint>
#include <span>

#include "displace/displacement.hpp"

namespace displace {

/// Null-model parameters: f field labels in the taxonomy, l labels drawn per
/// paper.
struct FieldTaxonomy {
    std::uint32_t f = 292;
    std::uint32_t l = 2;
};

struct OverlapResult {
    double p_empirical = 0.0;
    double p_null = 0.0;
    double ratio = 0.0;
    std::uint64_t n_pairs = 0;    // pairs entering p_empirical
    std::uint64_t n_excluded = 0; // pairs with a missing label set
};

/// Probability that two random l-subsets of f labels intersect:
/// 1 - C(f-l, l) / C(f, l), with exact integer binomials before the division.
/// When f - l < l the overlap is forced and the result is 1.
double null_overlap_probability(std::uint32_t f, std::uint32_t l);

/// Fraction of (focal, most-cited reference) pairs with intersecting field
/// sets among reports with D0 > d_cutoff; pairs lacking labels on either side
/// are excluded and counted. Throws Error when no pair is eligible.
OverlapResult empirical_overlap(const CitationGraph& graph,
                                std::span<const DisplacementReport> reports,
                                double d_cutoff, const FieldTaxonomy& taxonomy);

} // namespace displace
