#include "displace/overlap.hpp"

#include <algorithm>

#include "displace/errors.hpp"

namespace displace {

namespace {

/// Exact C(n, k) in 128-bit arithmetic; throws on overflow.
unsigned __int128 binomial_exact(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const unsigned __int128 num = n - k + i;
        const unsigned __int128 prev = c;
        c = c * num;
        if (c / num != prev) {
            throw Error("binomial overflow; taxonomy parameters too large");
        }
        c /= i; // exact at each step
    }
    return c;
}

bool sets_intersect(std::span<const std::uint32_t> a,
                    std::span<const std::uint32_t> b) {
    // Field label sets are stored sorted ascending.
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

} // namespace

double null_overlap_probability(std::uint32_t f, std::uint32_t l) {
    if (l < 1 || l > f) {
        throw Error("invalid taxonomy: need 1 <= l <= f");
    }
    if (f - l < l) return 1.0; // too few disjoint labels left; overlap forced
    const auto numerator = binomial_exact(f - l, l);
    const auto denominator = binomial_exact(f, l);
    return 1.0 - static_cast<double>(numerator) / static_cast<double>(denominator);
}

OverlapResult empirical_overlap(const CitationGraph& graph,
                                std::span<const DisplacementReport> reports,
                                double d_cutoff, const FieldTaxonomy& taxonomy) {
    std::uint64_t n_pairs = 0;
    std::uint64_t n_overlap = 0;
    std::uint64_t n_excluded = 0;

#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    reduction(+ : n_pairs, n_overlap, n_excluded)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(reports.size()); ++i) {
        const auto& r = reports[i];
        if (!(r.d0 > d_cutoff)) continue;
        auto focal_fields = graph.fields(r.focal);
        auto ref_fields = graph.fields(r.top_reference);
        if (focal_fields.empty() || ref_fields.empty()) {
            ++n_excluded;
            continue;
        }
        ++n_pairs;
        if (sets_intersect(focal_fields, ref_fields)) ++n_overlap;
    }

    if (n_pairs == 0) {
        throw Error("no eligible (focal, top-reference) pairs above the cutoff");
    }

    OverlapResult out;
    out.n_pairs = n_pairs;
    out.n_excluded = n_excluded;
    out.p_empirical = static_cast<double>(n_overlap) / static_cast<double>(n_pairs);
    out.p_null = null_overlap_probability(taxonomy.f, taxonomy.l);
    out.ratio = out.p_empirical / out.p_null;
    return out;
}

} // namespace displace
