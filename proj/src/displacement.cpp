#include "displace/displacement.hpp"

#include <algorithm>
#include <exception>
#include <unordered_map>
#include <unordered_set>

#include "displace/errors.hpp"
#include "displace/parallel.hpp"

namespace displace {

std::optional<Variant> variant_from_string(std::string_view s) {
    if (s == "d0" || s == "D0") return Variant::D0;
    if (s == "d1" || s == "D1") return Variant::D1;
    if (s == "d2" || s == "D2") return Variant::D2;
    if (s == "d3" || s == "D3") return Variant::D3;
    if (s == "d4" || s == "D4") return Variant::D4;
    return std::nullopt;
}

std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::D0: return "d0";
    case Variant::D1: return "d1";
    case Variant::D2: return "d2";
    case Variant::D3: return "d3";
    default: return "d4";
    }
}

namespace {

/// Citations a reference received from papers other than the focal; the
/// popularity count used by the D2 variant.
std::uint64_t popularity_count(const CitationGraph& g, PaperId ref, PaperId focal) {
    auto row = g.citers(ref);
    std::uint64_t n = row.size();
    if (std::binary_search(row.begin(), row.end(), focal)) --n;
    return n;
}

bool shares_author(const CitationGraph& g, PaperId a, PaperId b) {
    auto xs = g.authors(a);
    auto ys = g.authors(b);
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            if (x == y) return true;
        }
    }
    return false;
}

/// Reusable per-thread scratch for the classification sweep.
struct ClassifierScratch {
    std::unordered_set<PaperId> focal_citers;
    std::unordered_map<PaperId, std::uint32_t> ref_hits;
    std::vector<PaperId> eligible_refs;
};

CitationTriple classify_with_scratch(const CitationGraph& g, PaperId focal,
                                     const VariantConfig& cfg,
                                     ClassifierScratch& scratch) {
    auto refs = g.references(focal);
    auto focal_citers = g.citers(focal);
    if (refs.empty() || focal_citers.empty()) {
        throw IneligibleFocalError("focal " + g.external_id(focal) +
                                   " has no references or no citers");
    }

    const int focal_year = g.year(focal);
    const bool exclude_self = cfg.variant == Variant::D1;

    auto counted = [&](PaperId citer) {
        if (cfg.time_filter && g.year(citer) < focal_year) return false;
        if (exclude_self && shares_author(g, citer, focal)) return false;
        return true;
    };

    scratch.eligible_refs.clear();
    if (cfg.variant == Variant::D2) {
        for (PaperId r : refs) {
            if (popularity_count(g, r, focal) >= cfg.popular_threshold) {
                scratch.eligible_refs.push_back(r);
            }
        }
    } else {
        scratch.eligible_refs.assign(refs.begin(), refs.end());
    }

    scratch.focal_citers.clear();
    for (PaperId citer : focal_citers) {
        if (counted(citer)) scratch.focal_citers.insert(citer);
    }

    scratch.ref_hits.clear();
    for (PaperId r : scratch.eligible_refs) {
        for (PaperId citer : g.citers(r)) {
            if (citer == focal) continue;
            if (!counted(citer)) continue;
            ++scratch.ref_hits[citer];
        }
    }

    CitationTriple t;
    for (const auto& [citer, hits] : scratch.ref_hits) {
        if (scratch.focal_citers.count(citer)) {
            ++t.n_j;
            t.w_j += hits;
        } else {
            ++t.n_k;
        }
    }
    t.n_i = scratch.focal_citers.size() - t.n_j;
    return t;
}

double ratio_or_throw(std::uint64_t num_pos, std::uint64_t num_neg,
                      std::uint64_t denom, Variant v) {
    if (denom == 0) {
        throw UndefinedMetricError(std::string("zero denominator for ") +
                                   std::string(to_string(v)));
    }
    return (static_cast<double>(num_pos) - static_cast<double>(num_neg)) /
           static_cast<double>(denom);
}

/// Most-cited reference with deterministic, relabeling-stable tie-breaks:
/// higher count, then earlier year, then lexicographically smaller external id.
std::pair<PaperId, std::uint64_t> top_reference(const CitationGraph& g,
                                                PaperId focal,
                                                const ReportConfig& cfg) {
    PaperId best = kInvalidPaper;
    std::uint64_t best_count = 0;
    for (PaperId r : g.references(focal)) {
        std::uint64_t count;
        if (cfg.cmax_post_focal_only) {
            count = 0;
            for (PaperId citer : g.citers(r)) {
                if (g.year(citer) >= g.year(focal)) ++count;
            }
        } else {
            count = g.citers(r).size();
        }
        if (best == kInvalidPaper) {
            best = r;
            best_count = count;
            continue;
        }
        if (count != best_count) {
            if (count > best_count) { best = r; best_count = count; }
            continue;
        }
        if (g.year(r) != g.year(best)) {
            if (g.year(r) < g.year(best)) best = r;
            continue;
        }
        if (g.external_id(r) < g.external_id(best)) best = r;
    }
    return {best, best_count};
}

DisplacementReport decompose_with_scratch(const CitationGraph& g, PaperId focal,
                                          const ReportConfig& cfg,
                                          std::uint32_t popular_threshold,
                                          ClassifierScratch& scratch) {
    const auto refs = g.references(focal);
    const auto citers = g.citers(focal);
    const auto min_refs = static_cast<std::uint64_t>(std::max(1, cfg.min_references));
    const auto min_cites = static_cast<std::uint64_t>(std::max(1, cfg.min_citations));
    if (refs.size() < min_refs || citers.size() < min_cites) {
        throw IneligibleFocalError("focal " + g.external_id(focal) +
                                   " below reference/citation floor");
    }

    VariantConfig base_cfg{Variant::D0, cfg.time_filter, popular_threshold};
    CitationTriple base = classify_with_scratch(g, focal, base_cfg, scratch);
    if (base.n_i + base.n_j == 0) {
        throw IneligibleFocalError("focal " + g.external_id(focal) +
                                   " has no citers after the time filter");
    }

    DisplacementReport rep;
    rep.focal = focal;
    rep.year = g.year(focal);
    rep.triple = base;
    rep.c_f = base.n_i + base.n_j;
    rep.d0 = ratio_or_throw(base.n_i, base.n_j, base.n_i + base.n_j + base.n_k,
                            Variant::D0);
    rep.d_f = (static_cast<double>(base.n_i) - static_cast<double>(base.n_j)) /
              static_cast<double>(rep.c_f);
    rep.r_k = static_cast<double>(base.n_k) / static_cast<double>(rep.c_f);

    auto [top, c_max] = top_reference(g, focal, cfg);
    rep.top_reference = top;
    rep.c_max = c_max;
    rep.b_f = static_cast<double>(c_max) / static_cast<double>(rep.c_f);

    if (cfg.want_d3) {
        rep.d3 = static_cast<double>(base.n_i) / static_cast<double>(rep.c_f);
    }
    if (cfg.want_d4) {
        rep.d4 = static_cast<double>(base.n_i) /
                 static_cast<double>(base.n_i + base.w_j);
    }
    if (cfg.want_d1) {
        if (g.authors(focal).empty()) {
            rep.d1 = rep.d0;
            rep.d1_degraded = true;
        } else {
            VariantConfig c1{Variant::D1, cfg.time_filter, popular_threshold};
            CitationTriple t1 = classify_with_scratch(g, focal, c1, scratch);
            const std::uint64_t denom = t1.n_i + t1.n_j + t1.n_k;
            if (denom > 0) {
                rep.d1 = (static_cast<double>(t1.n_i) - static_cast<double>(t1.n_j)) /
                         static_cast<double>(denom);
            }
        }
    }
    if (cfg.want_d2) {
        VariantConfig c2{Variant::D2, cfg.time_filter, popular_threshold};
        CitationTriple t2 = classify_with_scratch(g, focal, c2, scratch);
        const std::uint64_t denom = t2.n_i + t2.n_j + t2.n_k;
        if (denom > 0) {
            rep.d2 = (static_cast<double>(t2.n_i) - static_cast<double>(t2.n_j)) /
                     static_cast<double>(denom);
        }
    }
    return rep;
}

} // namespace

CitationTriple classify_citers(const CitationGraph& graph, PaperId focal,
                               const VariantConfig& config) {
    ClassifierScratch scratch;
    return classify_with_scratch(graph, focal, config, scratch);
}

double d_index(const CitationTriple& t, Variant variant) {
    switch (variant) {
    case Variant::D0:
    case Variant::D1:
    case Variant::D2:
        return ratio_or_throw(t.n_i, t.n_j, t.n_i + t.n_j + t.n_k, variant);
    case Variant::D3:
        return ratio_or_throw(t.n_i, 0, t.n_i + t.n_j, variant);
    default:
        return ratio_or_throw(t.n_i, 0, t.n_i + t.w_j, variant);
    }
}

double approx_d(double d_f, double b_f) { return d_f / (1.0 + b_f); }

DisplacementReport decompose(const CitationGraph& graph, PaperId focal,
                             const ReportConfig& config) {
    ClassifierScratch scratch;
    return decompose_with_scratch(graph, focal, config,
                                  resolve_popular_threshold(graph, config), scratch);
}

std::uint32_t resolve_popular_threshold(const CitationGraph& graph,
                                        const ReportConfig& config) {
    if (!config.popular_quartile) return config.popular_threshold;
    // Top quartile (nearest-rank 75th percentile) of citation counts over
    // papers cited at least once.
    std::vector<std::uint64_t> counts;
    for (PaperId p = 0; p < graph.size(); ++p) {
        auto n = graph.citers(p).size();
        if (n > 0) counts.push_back(n);
    }
    if (counts.empty()) return 0;
    std::sort(counts.begin(), counts.end());
    const std::size_t rank = (counts.size() * 3 + 3) / 4; // ceil(0.75 n), 1-based
    return static_cast<std::uint32_t>(counts[rank - 1]);
}

BatchResult batch_reports(const CitationGraph& graph, const ReportConfig& config,
                          int threads) {
    const std::size_t n = graph.size();
    const std::uint32_t threshold = resolve_popular_threshold(graph, config);
    const auto min_refs =
        static_cast<std::size_t>(std::max(1, config.min_references));
    const auto min_cites =
        static_cast<std::size_t>(std::max(1, config.min_citations));
    std::vector<std::optional<DisplacementReport>> slots(n);
    std::exception_ptr failure;

    const int workers = effective_threads(threads);
#ifdef _OPENMP
#pragma omp parallel num_threads(workers)
#else
    (void)workers;
#endif
    {
        ClassifierScratch scratch;
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 64)
#endif
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const auto p = static_cast<PaperId>(i);
            // Degree floors weed out most skips without the exception cost.
            if (graph.references(p).size() < min_refs ||
                graph.citers(p).size() < min_cites) {
                continue;
            }
            try {
                slots[i] = decompose_with_scratch(graph, p, config, threshold,
                                                  scratch);
            } catch (const IneligibleFocalError&) {
                // no citers survived the time filter; skipped and counted
            } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
                {
                    if (!failure) failure = std::current_exception();
                }
            }
        }
    }
    if (failure) std::rethrow_exception(failure);

    BatchResult out;
    out.reports.reserve(n);
    for (auto& slot : slots) {
        if (slot) {
            out.reports.push_back(std::move(*slot));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

std::map<int, double> displacing_fraction_by_year(
    std::span<const YearFractionInput> inputs, Weighting weighting) {
    struct Acc {
        double displacing = 0.0;
        double total = 0.0;
    };
    std::map<int, Acc> by_year;
    for (const auto& in : inputs) {
        const double w = weighting == Weighting::CitationWeighted
                             ? static_cast<double>(in.c_f)
                             : 1.0;
        auto& acc = by_year[in.year];
        acc.total += w;
        if (in.d0 > 0.0) acc.displacing += w;
    }
    std::map<int, double> out;
    for (const auto& [year, acc] : by_year) {
        if (acc.total > 0.0) out[year] = acc.displacing / acc.total;
    }
    return out;
}

std::map<int, double> displacing_fraction_by_year(
    std::span<const DisplacementReport> reports, Weighting weighting) {
    std::vector<YearFractionInput> inputs;
    inputs.reserve(reports.size());
    for (const auto& r : reports) {
        inputs.push_back({r.year, r.d0, r.c_f});
    }
    return displacing_fraction_by_year(std::span<const YearFractionInput>(inputs),
                                       weighting);
}

} // namespace displace
