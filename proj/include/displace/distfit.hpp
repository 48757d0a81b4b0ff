#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace displace {

/// Poisson fit, optionally left-truncated at t (support x >= t, t in {0,1,2}).
struct PoissonFit {
    double lambda = 0.0;
    int truncation = 0;
    double log_likelihood = 0.0;
};

/// Discrete (Hurwitz-zeta normalized) power-law fit with KS-selected x_min.
struct PowerLawFit {
    double alpha = 0.0;
    std::uint64_t x_min = 1;
    double log_likelihood = 0.0; // over the tail x >= x_min
    double ks_statistic = 0.0;
};

enum class Verdict : std::uint8_t { PowerLaw, Poisson, Indeterminate };

std::string_view to_string(Verdict v);

/// Vuong-style comparison of the two models on their common support
/// x >= max(x_min, truncation), with the power law refit at that support so
/// both models explain the same data.
struct ModelComparison {
    PoissonFit poisson;
    PowerLawFit power_law;  // the KS-selected fit, reported as-is
    std::uint64_t common_support_min = 0;
    double comparison_alpha = 0.0; // power-law exponent refit on the common support
    std::uint64_t n_common = 0;
    double llr = 0.0;     // total log-likelihood ratio, power-law minus Poisson
    double p_value = 1.0; // two-sided significance of the sign of llr
    Verdict verdict = Verdict::Indeterminate;
};

/// MLE of the (truncated) Poisson rate. Untruncated: the sample mean.
/// Truncated (t >= 1): bisection on the conditional-mean equation to 1e-10.
/// Throws FitError on empty input, samples below the truncation point, or a
/// sample mean not exceeding it.
PoissonFit fit_poisson(std::span<const std::uint64_t> samples, int truncation);

/// Discrete power-law MLE: for each candidate x_min, alpha maximizes the
/// zeta-normalized likelihood by golden-section search; the x_min minimizing
/// the KS distance between empirical and fitted CDFs wins (ties to the
/// smallest x_min). Requires >= 10 samples with >= 2 distinct values >= 1.
PowerLawFit fit_powerlaw(std::span<const std::uint64_t> samples);

/// Fits both models and compares their per-sample log-likelihoods on the
/// common support x >= max(x_min, truncation), with a normal approximation
/// for the significance of the ratio's sign.
ModelComparison compare_models(std::span<const std::uint64_t> samples,
                               int truncation, double significance = 0.05);

/// Reads a value,count CSV (an optional non-numeric header row is skipped)
/// and expands it into a sample multiset. Negative counts raise ParseError.
std::vector<std::uint64_t> load_external_histogram(const std::string& path);

} // namespace displace
