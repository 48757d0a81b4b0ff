#pragma once

#include <cstdint>

namespace displace {

/// Hurwitz zeta, sum_{k>=0} (q+k)^-s, for s > 1 and q > 0.
/// Direct summation plus Euler-Maclaurin tail, accurate to ~1e-13 over the
/// parameter ranges used here (s in (1, 40], q >= 0.5).
double hurwitz_zeta(double s, double q);

/// log(x!) via lgamma.
double log_factorial(std::uint64_t x);

/// Poisson P(X >= m) for rate lambda, by direct summation of the head.
double poisson_sf_geq(double lambda, std::uint64_t m);

/// Two-sided normal tail probability 2*(1 - Phi(|z|)).
double normal_two_sided_p(double z);

} // namespace displace
