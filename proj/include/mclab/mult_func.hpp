#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mclab/primes.hpp"

namespace mclab {

// A multiplicative function described by its prime-power values f(p^k),
// together with the density parameter theta of g = |f|^2 on primes
// (sum_{p<=t} |f(p)|^2 ~ theta * t/log t). Built-ins are real valued;
// complex rules are accepted.
struct MultiplicativeFunction {
    std::string name;
    double theta = 1.0;
    // declared bound sup_{p,k} |f(p^k)|; tail estimates rely on it
    double sup_abs_f = 1.0;
    // rule(p, k) = f(p^k), k >= 1
    std::function<std::complex<double>(std::uint64_t, std::uint32_t)> rule;

    std::complex<double> f(std::uint64_t p, std::uint32_t k) const { return rule(p, k); }
    double g(std::uint64_t p, std::uint32_t k) const { return std::norm(rule(p, k)); }
};

// indicator of sums of two squares: f(2^k) = 1, f(p^k) = 1 for p = 1 mod 4,
// f(p^k) = [k even] for p = 3 mod 4; theta = 1/2
MultiplicativeFunction two_squares_family();

// divisor-type family f(p^k) = Gamma(z+k)/(Gamma(z) k!); theta = z^2, z in (0, 1]
MultiplicativeFunction divisor_family(double z);

// f(p^k) = theta^{k/2} (prime factors counted with multiplicity)
MultiplicativeFunction omega_multiplicity_family(double theta);

// f(p^k) = theta^{1/2} for every k >= 1 (distinct prime factors)
MultiplicativeFunction omega_distinct_family(double theta);

// look up a built-in family by CLI/config name
MultiplicativeFunction family_by_name(const std::string& name, double theta);

// f(n) as the product of prime-power values, n <= table.limit()
std::complex<double> eval_f(const MultiplicativeFunction& F, std::uint64_t n, const PrimeTable& table);

// f(n) for all n <= limit by one pass over the spf table
std::vector<std::complex<double>> sieve_f_values(const MultiplicativeFunction& F, std::uint64_t limit,
                                                 const PrimeTable& table);
// g(n) = |f(n)|^2 for all n <= limit
std::vector<double> sieve_g_values(const MultiplicativeFunction& F, std::uint64_t limit, const PrimeTable& table);

// Prime-counting profile of g against the theta * t/log t main term.
struct PrimeDensityReport {
    std::vector<double> t_samples;
    std::vector<double> pi_g;               // sum_{p<=t} g(p)
    std::vector<double> main_term;          // theta * t / log t
    std::vector<double> error_profile;      // pi_g - main_term
    std::vector<double> error_profile_li;   // pi_g - theta * li(t), alternative profile
    double theta_hat = 0.0;                 // least-squares fit of pi_g against t/log t
    double integral_bound = 0.0;            // numeric integral of |error_profile(t)| / t^2
};

PrimeDensityReport chebyshev_pi_g(const MultiplicativeFunction& F, const std::vector<double>& t_samples,
                                  const PrimeTable& table);

// Shifted Mertens sum sum_{p<=y} g(p) p^{-1-c/log t} cos(s log p) and the
// main term theta * log(min(1/|s|, log y, log t)).
struct MertensSum {
    double value = 0.0;
    double main_term = 0.0;
};

MertensSum mertens_sum(const MultiplicativeFunction& F, double y, double t, double c, double s,
                       const PrimeTable& table);

// Convergent Euler-type constant prod_p (sum_i g(p^i) p^{-i}) (1 - 1/p)^theta.
struct EulerConstant {
    double value = 0.0;           // partial product times first-order tail correction
    double log_tail_correction = 0.0;  // -E(T)/T applied in the exponent
    double tail_uncertainty = 0.0;     // |E(T)|/T, magnitude of the dropped integral term
};

EulerConstant euler_constant_Cg(const MultiplicativeFunction& F, double cutoff, const PrimeTable& table);

// Exact quadratic mean sum_{n<=x} g(n) against the slowly-varying prediction
// (C_g / Gamma(theta)) * x * (log x)^{theta-1}.
struct QuadraticMean {
    double exact = 0.0;
    double prediction = 0.0;
    double ratio = 0.0;
};

QuadraticMean wirsing_sum(const MultiplicativeFunction& F, std::uint64_t x, const PrimeTable& table);

// sum over y-smooth n of g(n) * n^{-sigma2}, computed two ways.
// Enumerated route: exact partial sum over smooth n <= n_cap plus a rigorous
// geometric tail bound; throws PrecisionError if the bound exceeds tail_tol.
struct SmoothSum {
    double value = 0.0;
    double tail_bound = 0.0;
};

SmoothSum smooth_weighted_sum(const MultiplicativeFunction& F, double y, double sigma2, const PrimeTable& table,
                              double n_cap, double tail_tol = 1e-10);

// Product route: prod_{p<=y} sum_{k>=0} g(p^k) p^{-k*sigma2}; algebraically
// the same sum, never truncated in n. Requires sigma2 > 0 when y is large.
double smooth_weighted_product(const MultiplicativeFunction& F, double y, double sigma2, const PrimeTable& table);

// log of the product route, for callers that exponentiate differences
double log_smooth_weighted_product(const MultiplicativeFunction& F, double y, double sigma2,
                                   const PrimeTable& table);

}  // namespace mclab
