#include "displace/stats_math.hpp"

#include <cmath>

namespace displace {

double hurwitz_zeta(double s, double q) {
    // Head summation plus Euler-Maclaurin correction at q + K.
    constexpr int kHead = 16;
    double sum = 0.0;
    for (int k = kHead - 1; k >= 0; --k) {
        sum += std::pow(q + k, -s);
    }
    const double m = q + kHead;
    const double m_pow = std::pow(m, -s);
    sum += m * m_pow / (s - 1.0); // integral tail: m^(1-s) / (s-1)
    sum += 0.5 * m_pow;
    sum += s * m_pow / (12.0 * m);
    sum -= s * (s + 1.0) * (s + 2.0) * m_pow / (720.0 * m * m * m);
    return sum;
}

double log_factorial(std::uint64_t x) {
    return std::lgamma(static_cast<double>(x) + 1.0);
}

double poisson_sf_geq(double lambda, std::uint64_t m) {
    if (m == 0) return 1.0;
    // 1 - P(X <= m-1), head summed in log space for stability.
    double head = 0.0;
    double term = std::exp(-lambda); // P(X = 0)
    for (std::uint64_t k = 0; k < m; ++k) {
        head += term;
        term *= lambda / static_cast<double>(k + 1);
    }
    double sf = 1.0 - head;
    return sf > 0.0 ? sf : 0.0;
}

double normal_two_sided_p(double z) {
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

} // namespace displace
