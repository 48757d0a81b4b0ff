#include "displace/zipf.hpp"

#include <algorithm>
#include <cmath>

#include "displace/errors.hpp"

namespace displace {

namespace {

struct LogFit {
    double a = 0.0;
    double log_c = 0.0;
    double sse = 0.0;
    double syy = 0.0;
};

/// Closed-form least squares of y_r = log(C_r + 1) against
/// log c - a * log(b + r) for a fixed offset b.
LogFit regress_at(double b, std::span<const double> log_counts) {
    const std::size_t n = log_counts.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(b + static_cast<double>(i + 1));
        const double y = log_counts[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double nn = static_cast<double>(n);
    const double cxx = sxx - sx * sx / nn;
    const double cxy = sxy - sx * sy / nn;
    const double cyy = syy - sy * sy / nn;

    LogFit f;
    const double slope = cxy / cxx;
    f.a = -slope;
    f.log_c = (sy - slope * sx) / nn;
    f.sse = cyy - slope * cxy;
    if (f.sse < 0.0) f.sse = 0.0; // numeric guard
    f.syy = cyy;
    return f;
}

} // namespace

ZipfFit fit_zipf(std::span<const double> citation_counts,
                 const ZipfFitOptions& options) {
    std::vector<double> counts(citation_counts.begin(), citation_counts.end());
    if (options.drop_zero_counts) {
        counts.erase(std::remove(counts.begin(), counts.end(), 0.0), counts.end());
    }
    if (counts.size() < 3) {
        throw FitError("too few references: need at least 3 citation counts");
    }
    for (double v : counts) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw FitError("citation counts must be finite and non-negative");
        }
    }
    std::sort(counts.begin(), counts.end(), std::greater<double>());

    // Identifiability: the rank curve needs at least two distinct positive
    // levels, otherwise the exponent is arbitrary.
    double first_pos = -1.0;
    bool two_levels = false;
    for (double v : counts) {
        if (v <= 0.0) continue;
        if (first_pos < 0.0) {
            first_pos = v;
        } else if (v != first_pos) {
            two_levels = true;
            break;
        }
    }
    if (!two_levels) throw FitError("degenerate rank curve: counts carry no slope");

    // Zero-citation references keep their ranks; the +1 smoothing applies to
    // them alone (log(0+1) = 0) so positive counts enter the regression
    // undistorted.
    std::vector<double> log_counts(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        log_counts[i] = counts[i] > 0.0 ? std::log(counts[i]) : 0.0;
    }

    // 0.01 grid over [0, 100], ties to the smaller b, then a fixed-iteration
    // golden-section polish inside the winning cell so results are
    // bit-reproducible.
    constexpr double kBMax = 100.0;
    constexpr double kStep = 0.01;
    double best_b = 0.0;
    double best_sse = regress_at(0.0, log_counts).sse;
    const int cells = static_cast<int>(kBMax / kStep);
    for (int i = 1; i <= cells; ++i) {
        const double b = static_cast<double>(i) * kStep;
        const double sse = regress_at(b, log_counts).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_b = b;
        }
    }

    double lo = std::max(0.0, best_b - kStep);
    double hi = std::min(kBMax, best_b + kStep);
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = regress_at(x1, log_counts).sse;
    double f2 = regress_at(x2, log_counts).sse;
    for (int it = 0; it < 64; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = regress_at(x1, log_counts).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = regress_at(x2, log_counts).sse;
        }
    }
    const double b_hat = 0.5 * (lo + hi);
    const LogFit fit = regress_at(b_hat, log_counts);

    ZipfFit out;
    out.a = fit.a;
    out.b = b_hat;
    out.c = std::exp(fit.log_c);
    out.n_refs = counts.size();
    out.r2_log = fit.syy > 0.0 ? 1.0 - fit.sse / fit.syy : 0.0;

    double total = 0.0;
    for (double v : counts) total += v;
    out.ratio_empirical = counts.front() / total;
    if (out.a > 1.0) {
        out.ratio_theoretical = (out.a - 1.0) / (1.0 + out.b);
        out.k_coefficient = (out.b + 1.0) / (out.a - 1.0);
    }
    return out;
}

double ratio_theoretical(double a, double b) {
    if (!(a > 1.0)) {
        throw FitError("heavy-tail divergence: ratio requires a > 1");
    }
    if (!(b >= 0.0)) throw FitError("offset b must be non-negative");
    return (a - 1.0) / (1.0 + b);
}

std::vector<std::pair<std::uint64_t, double>> ratio_convergence_check(
    double a, double b, std::span<const std::uint64_t> n_values) {
    if (!(a > 1.0)) {
        throw FitError("heavy-tail divergence: convergence check requires a > 1");
    }
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(n_values.size());
    const double c_max = std::pow(b + 1.0, -a);
    for (std::uint64_t n : n_values) {
        // Sum ascending in magnitude (r = N down to 1) for accuracy.
        double total = 0.0;
        for (std::uint64_t r = n; r >= 1; --r) {
            total += std::pow(b + static_cast<double>(r), -a);
        }
        out.emplace_back(n, c_max / total);
    }
    return out;
}

std::vector<double> reference_citation_counts(const CitationGraph& graph,
                                              PaperId focal) {
    auto refs = graph.references(focal);
    std::vector<PaperId> order(refs.begin(), refs.end());
    std::sort(order.begin(), order.end(), [&](PaperId lhs, PaperId rhs) {
        const auto cl = graph.citers(lhs).size();
        const auto cr = graph.citers(rhs).size();
        if (cl != cr) return cl > cr;
        return graph.external_id(lhs) < graph.external_id(rhs);
    });
    std::vector<double> counts;
    counts.reserve(order.size());
    for (PaperId r : order) {
        counts.push_back(static_cast<double>(graph.citers(r).size()));
    }
    return counts;
}

} // namespace displace
