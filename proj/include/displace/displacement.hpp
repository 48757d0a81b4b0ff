#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "displace/citation_graph.hpp"

namespace displace {

enum class Variant : std::uint8_t { D0, D1, D2, D3, D4 };

std::optional<Variant> variant_from_string(std::string_view s);
std::string_view to_string(Variant v);

/// Counts of the three citer types for one focal paper. `w_j` is the summed
/// multiplicity over j-type citers of how many eligible focal references each
/// cites (the weight used by the D4 form).
struct CitationTriple {
    std::uint64_t n_i = 0;
    std::uint64_t n_j = 0;
    std::uint64_t n_k = 0;
    std::uint64_t w_j = 0;
};

/// Per-call configuration for citer classification.
///
/// - variant D1 drops citers sharing an author string with the focal;
/// - variant D2 restricts "references" to popular ones, i.e. references whose
///   citation count from papers other than the focal reaches
///   `popular_threshold`;
/// - `time_filter` keeps only citers with year >= the focal's year.
struct VariantConfig {
    Variant variant = Variant::D0;
    bool time_filter = true;
    std::uint32_t popular_threshold = 24;
};

/// Batch/report configuration. D0 and its decomposition are always computed;
/// D1/D2/D3/D4 can be switched off to skip their extra passes.
struct ReportConfig {
    bool time_filter = true;
    std::uint32_t popular_threshold = 24;
    bool popular_quartile = false;      // derive the threshold from the corpus
    bool cmax_post_focal_only = false;  // count only citations with year >= focal's
    bool want_d1 = true;
    bool want_d2 = true;
    bool want_d3 = true;
    bool want_d4 = true;
    int min_references = 1; // focal eligibility floors (raw degrees)
    int min_citations = 1;
};

/// Full per-focal metric bundle. `d1`/`d2` are absent when not requested or
/// undefined (e.g. every citer excluded as a self-citation).
struct DisplacementReport {
    PaperId focal = kInvalidPaper;
    int year = 0;
    CitationTriple triple; // base (D0) counts
    double d0 = 0.0;
    std::optional<double> d1;
    std::optional<double> d2;
    std::optional<double> d3;
    std::optional<double> d4;
    double d_f = 0.0;
    double r_k = 0.0;
    std::uint64_t c_f = 0;
    std::uint64_t c_max = 0;
    double b_f = 0.0;
    PaperId top_reference = kInvalidPaper;
    bool d1_degraded = false; // focal has no author data; d1 fell back to d0
};

/// Partitions every paper citing the focal or one of its eligible references
/// into types i/j/k. Throws IneligibleFocalError when the focal has no
/// references or no citers in the graph.
CitationTriple classify_citers(const CitationGraph& graph, PaperId focal,
                               const VariantConfig& config);

/// Applies the variant's formula to an already-classified triple.
/// Throws UndefinedMetricError on a zero denominator.
double d_index(const CitationTriple& triple, Variant variant);

/// D approximation from the decomposition factors: d_f / (1 + b_f).
double approx_d(double d_f, double b_f);

/// Computes the full report for one focal: base triple, all requested
/// variants, the exact decomposition (d_f, r_k) and the burden factor
/// (c_max / c_f) with the most-cited reference resolved by citation count,
/// earlier year, then lexicographically smaller external id.
DisplacementReport decompose(const CitationGraph& graph, PaperId focal,
                             const ReportConfig& config);

/// Resolves the D2 popularity floor: the configured constant, or the top
/// quartile of citation counts over all cited papers when quartile mode is
/// selected.
std::uint32_t resolve_popular_threshold(const CitationGraph& graph,
                                        const ReportConfig& config);

struct BatchResult {
    std::vector<DisplacementReport> reports; // ascending internal id
    std::uint64_t skipped = 0;               // ineligible focals
};

/// Parallel sweep over every paper. Output order is ascending internal id
/// regardless of `threads`, so re-runs are byte-identical.
BatchResult batch_reports(const CitationGraph& graph, const ReportConfig& config,
                          int threads = 0);

enum class Weighting : std::uint8_t { Unweighted, CitationWeighted };

struct YearFractionInput {
    int year = 0;
    double d0 = 0.0;
    std::uint64_t c_f = 0;
};

/// Fraction of papers with D0 > 0 per publication year; citation-weighted
/// mode weights each paper by c_f. Years without eligible papers are absent.
std::map<int, double> displacing_fraction_by_year(
    std::span<const YearFractionInput> inputs, Weighting weighting);

std::map<int, double> displacing_fraction_by_year(
    std::span<const DisplacementReport> reports, Weighting weighting);

} // namespace displace
