#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "displace/citation_graph.hpp"

namespace displace {

/// Fitted Zipf-Mandelbrot parameters for one paper's reference-citation rank
/// curve C_r ~ c / (b + r)^a, plus the empirical and (when a > 1) theoretical
/// concentration ratio C_max / C_total.
struct ZipfFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    std::size_t n_refs = 0;
    double r2_log = 0.0;
    double ratio_empirical = 0.0;
    std::optional<double> ratio_theoretical; // (a-1)/(1+b), only when a > 1
    std::optional<double> k_coefficient;     // (b+1)/(a-1), only when a > 1
};

struct ZipfFitOptions {
    bool drop_zero_counts = false; // zeros keep their ranks by default
};

/// Least-squares fit of log(C_r + 1) against log c - a log(b + r), ranks
/// r = 1..N on the counts sorted descending. b is located on a 0.01 grid over
/// [0, 100] and polished by golden-section search, with (a, log c) solved in
/// closed form at each b, so fits are bit-reproducible.
///
/// Throws FitError for fewer than 3 counts ("too few references") or when
/// fewer than two distinct positive values remain ("degenerate rank curve").
ZipfFit fit_zipf(std::span<const double> citation_counts,
                 const ZipfFitOptions& options = {});

/// Closed-form concentration ratio (a - 1) / (1 + b). Throws FitError when
/// a <= 1 (the rank-curve integral diverges).
double ratio_theoretical(double a, double b);

/// Exact finite-sum ratio C_max / sum_{r=1..N} c/(b+r)^a for each requested N,
/// by direct summation. Requires a > 1.
std::vector<std::pair<std::uint64_t, double>> ratio_convergence_check(
    double a, double b, std::span<const std::uint64_t> n_values);

/// Citation counts of the focal's references, sorted descending with ties
/// broken by ascending external id so zero/low-cited references keep stable
/// ranks.
std::vector<double> reference_citation_counts(const CitationGraph& graph,
                                              PaperId focal);

} // namespace displace
