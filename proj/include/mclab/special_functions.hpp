#pragma once

#include <complex>

namespace mclab {

// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Gamma(x) for x in the reals minus the nonpositive integers.
// Lanczos approximation (g = 7, 9 coefficients), reflection below 1/2.
// Relative accuracy around 1e-13 on (0, 30].
double gamma_fn(double x);

// log Gamma(x) for x > 0.
double log_gamma_fn(double x);

// Modified Bessel functions of order 0 and 1 by their power series,
// summed to relative tolerance 1e-15. Intended for |x| <= ~60.
double bessel_i0(double x);
double bessel_i1(double x);

// Integral of (1 - e^{-s})/s over [0, r], r >= 0.  Equals
// gamma + log r + E1(r) for r > 0; evaluated by alternating series for
// small r and via a continued fraction for E1 beyond that.
double one_minus_exp_integral(double r);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace mclab
