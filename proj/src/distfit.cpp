#include "displace/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "displace/errors.hpp"
#include "displace/stats_math.hpp"

namespace displace {

std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::PowerLaw: return "power_law";
    case Verdict::Poisson: return "poisson";
    default: return "indeterminate";
    }
}

namespace {

double sample_mean(std::span<const std::uint64_t> samples) {
    double sum = 0.0;
    for (auto x : samples) sum += static_cast<double>(x);
    return sum / static_cast<double>(samples.size());
}

/// E[X | X >= t] for Poisson(lambda): lambda * P(X >= t-1) / P(X >= t).
double truncated_mean(double lambda, int t) {
    if (t <= 0) return lambda;
    return lambda * poisson_sf_geq(lambda, static_cast<std::uint64_t>(t - 1)) /
           poisson_sf_geq(lambda, static_cast<std::uint64_t>(t));
}

double truncated_poisson_loglik(std::span<const std::uint64_t> samples,
                                double lambda, int t) {
    const double log_lambda = std::log(lambda);
    const double log_sf = std::log(poisson_sf_geq(lambda, static_cast<std::uint64_t>(t)));
    double ll = 0.0;
    for (auto x : samples) {
        ll += static_cast<double>(x) * log_lambda - lambda - log_factorial(x) - log_sf;
    }
    return ll;
}

/// Negative tail log-likelihood of the zeta-normalized power law at fixed
/// x_min; `sum_log` is the summed log of the tail samples.
double powerlaw_negll(double alpha, double sum_log, std::size_t n_tail,
                      std::uint64_t x_min) {
    return alpha * sum_log +
           static_cast<double>(n_tail) *
               std::log(hurwitz_zeta(alpha, static_cast<double>(x_min)));
}

double golden_min_alpha(double sum_log, std::size_t n_tail, std::uint64_t x_min) {
    double lo = 1.0 + 1e-6;
    double hi = 30.0;
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = powerlaw_negll(x1, sum_log, n_tail, x_min);
    double f2 = powerlaw_negll(x2, sum_log, n_tail, x_min);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = powerlaw_negll(x1, sum_log, n_tail, x_min);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = powerlaw_negll(x2, sum_log, n_tail, x_min);
        }
    }
    return 0.5 * (lo + hi);
}

/// KS distance between the empirical tail CDF and the fitted discrete CDF.
/// The supremum over integers is attained at the distinct sample values or
/// immediately before them, so both sides of every step are checked.
double ks_distance(std::span<const std::uint64_t> sorted_tail, double alpha,
                   std::uint64_t x_min) {
    const double z_min = hurwitz_zeta(alpha, static_cast<double>(x_min));
    const auto model_cdf = [&](std::uint64_t x) {
        return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x) + 1.0) / z_min;
    };
    const double n = static_cast<double>(sorted_tail.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted_tail.size()) {
        const std::uint64_t v = sorted_tail[i];
        std::size_t j = i;
        while (j < sorted_tail.size() && sorted_tail[j] == v) ++j;
        const double emp_before = static_cast<double>(i) / n;
        const double emp_after = static_cast<double>(j) / n;
        if (v > x_min) {
            d = std::max(d, std::fabs(emp_before - model_cdf(v - 1)));
        }
        d = std::max(d, std::fabs(emp_after - model_cdf(v)));
        i = j;
    }
    return d;
}

} // namespace

PoissonFit fit_poisson(std::span<const std::uint64_t> samples, int truncation) {
    if (truncation < 0 || truncation > 2) {
        throw FitError("truncation must be in {0, 1, 2}");
    }
    if (samples.size() < 2) throw FitError("need at least 2 samples");
    for (auto x : samples) {
        if (x < static_cast<std::uint64_t>(truncation)) {
            throw FitError("sample below the truncation point");
        }
    }
    const double mean = sample_mean(samples);
    if (!(mean > static_cast<double>(truncation))) {
        throw FitError("degenerate sample: mean must exceed the truncation point");
    }

    PoissonFit fit;
    fit.truncation = truncation;
    if (truncation == 0) {
        fit.lambda = mean; // closed-form MLE
    } else {
        // The conditional mean is increasing in lambda, and
        // truncated_mean(lambda) >= lambda, so the root lies in (0, mean].
        double lo = 1e-12;
        double hi = mean;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            if (truncated_mean(mid, truncation) < mean) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        fit.lambda = 0.5 * (lo + hi);
    }
    fit.log_likelihood = truncated_poisson_loglik(samples, fit.lambda, truncation);
    return fit;
}

PowerLawFit fit_powerlaw(std::span<const std::uint64_t> samples) {
    if (samples.size() < 10) throw FitError("need at least 10 samples");
    std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 1) throw FitError("samples must be >= 1");
    if (sorted.front() == sorted.back()) {
        throw FitError("degenerate sample: all values equal");
    }

    // Suffix sums of log x for O(1) tail statistics per candidate.
    std::vector<double> suffix_log(sorted.size() + 1, 0.0);
    for (std::size_t i = sorted.size(); i-- > 0;) {
        suffix_log[i] = suffix_log[i + 1] + std::log(static_cast<double>(sorted[i]));
    }

    // Candidate cutoffs: every distinct value whose tail still has spread
    // (the exponent is unidentifiable on an all-equal tail).
    std::vector<std::size_t> candidates;
    for (std::size_t start = 0; start < sorted.size();) {
        const std::uint64_t x_min = sorted[start];
        if (sorted.back() == x_min) break;
        candidates.push_back(start);
        while (start < sorted.size() && sorted[start] == x_min) ++start;
    }
    if (candidates.empty()) throw FitError("no viable x_min candidate");

    std::vector<double> alphas(candidates.size());
    std::vector<double> ks(candidates.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(candidates.size()); ++c) {
        const std::size_t start = candidates[c];
        const std::uint64_t x_min = sorted[start];
        const std::size_t n_tail = sorted.size() - start;
        alphas[c] = golden_min_alpha(suffix_log[start], n_tail, x_min);
        ks[c] = ks_distance({sorted.data() + start, n_tail}, alphas[c], x_min);
    }

    // Deterministic argmin: strict improvement keeps the smallest x_min on ties.
    std::size_t best_c = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
        if (ks[c] < ks[best_c]) best_c = c;
    }
    const std::size_t start = candidates[best_c];
    PowerLawFit best;
    best.alpha = alphas[best_c];
    best.x_min = sorted[start];
    best.ks_statistic = ks[best_c];
    best.log_likelihood =
        -powerlaw_negll(best.alpha, suffix_log[start], sorted.size() - start,
                        best.x_min);
    return best;
}

ModelComparison compare_models(std::span<const std::uint64_t> samples,
                               int truncation, double significance) {
    // Work on a sorted copy so the result is bitwise invariant under any
    // permutation of the input (summation order is fixed).
    std::vector<std::uint64_t> ordered(samples.begin(), samples.end());
    std::sort(ordered.begin(), ordered.end());
    samples = ordered;

    ModelComparison cmp;
    cmp.power_law = fit_powerlaw(samples);
    cmp.poisson = fit_poisson(samples, truncation);

    // Both models must explain the same observations, so the power law is
    // refit with its cutoff pinned to the common support floor: the discrete
    // power law starts at 1, the Poisson at the truncation point. A
    // KS-selected x_min would shrink the comparison to the extreme tail and
    // drain the test's power.
    const std::uint64_t m = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(truncation));
    cmp.common_support_min = m;

    double sum_log = 0.0;
    std::size_t n_tail = 0;
    for (auto x : samples) {
        if (x < m) continue;
        sum_log += std::log(static_cast<double>(x));
        ++n_tail;
    }
    if (n_tail < 2) throw FitError("too few samples on the common support");
    cmp.comparison_alpha = golden_min_alpha(sum_log, n_tail, m);

    const double log_zeta_m =
        std::log(hurwitz_zeta(cmp.comparison_alpha, static_cast<double>(m)));
    const double lambda = cmp.poisson.lambda;
    const double log_lambda = std::log(lambda);
    const double log_sf_m =
        std::log(std::max(poisson_sf_geq(lambda, m), 1e-300));

    std::vector<double> llrs;
    llrs.reserve(samples.size());
    for (auto x : samples) {
        if (x < m) continue;
        const double lp_pl =
            -cmp.comparison_alpha * std::log(static_cast<double>(x)) - log_zeta_m;
        const double lp_poi = static_cast<double>(x) * log_lambda - lambda -
                              log_factorial(x) - log_sf_m;
        llrs.push_back(lp_pl - lp_poi);
    }
    cmp.n_common = llrs.size();
    if (llrs.size() < 2) {
        throw FitError("too few samples on the common support");
    }

    double total = 0.0;
    for (double v : llrs) total += v;
    cmp.llr = total;

    // The z statistic uses winsorized per-sample ratios: under heavy-tailed
    // data the raw ratios have unbounded variance and a single extreme draw
    // saturates the normal approximation exactly when the evidence is
    // strongest. Clipping at the 1%/99% sample quantiles restores a stable
    // mean test; the reported llr stays unclipped.
    std::vector<double> sorted(llrs);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n_llr = sorted.size();
    const double lo_clip = sorted[(n_llr - 1) / 100];
    const double hi_clip = sorted[(n_llr - 1) * 99 / 100];
    double wsum = 0.0;
    for (double& v : llrs) {
        v = std::clamp(v, lo_clip, hi_clip);
        wsum += v;
    }

    const double n = static_cast<double>(n_llr);
    const double mean = wsum / n;
    double var = 0.0;
    for (double v : llrs) var += (v - mean) * (v - mean);
    var /= n;
    const double sd = std::sqrt(var);

    if (wsum == 0.0) {
        cmp.p_value = 1.0;
        cmp.verdict = Verdict::Indeterminate;
        return cmp;
    }
    if (sd == 0.0) {
        cmp.p_value = 0.0; // identical pointwise ratios with a nonzero sign
    } else {
        const double z = wsum / (sd * std::sqrt(n));
        cmp.p_value = normal_two_sided_p(z);
    }
    if (cmp.p_value > significance) {
        cmp.verdict = Verdict::Indeterminate;
    } else {
        cmp.verdict = wsum > 0.0 ? Verdict::PowerLaw : Verdict::Poisson;
    }
    return cmp;
}

std::vector<std::uint64_t> load_external_histogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open histogram: " + path);

    std::vector<std::uint64_t> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected value,count");
        }
        const std::string value_s = line.substr(0, comma);
        const std::string count_s = line.substr(comma + 1);
        char* end = nullptr;
        const long long value = std::strtoll(value_s.c_str(), &end, 10);
        if (end == value_s.c_str() || *end != '\0') {
            if (line_no == 1) continue; // header row
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": non-numeric value");
        }
        const long long count = std::strtoll(count_s.c_str(), &end, 10);
        if (end == count_s.c_str() || *end != '\0') {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": non-numeric count");
        }
        if (count < 0) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": negative count");
        }
        if (value < 0) {
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": negative value");
        }
        for (long long i = 0; i < count; ++i) {
            samples.push_back(static_cast<std::uint64_t>(value));
        }
    }
    return samples;
}

} // namespace displace
