#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "mclab/chaos.hpp"
#include "mclab/mult_func.hpp"
#include "mclab/primes.hpp"
#include "mclab/steinhaus.hpp"
#include "mclab/step_weight.hpp"

namespace mclab {

// any source of completely multiplicative phases, for tests that force them
using AlphaFn = std::function<std::complex<double>(std::uint64_t)>;

// (sum_{n<=x} |f(n)|^2)^{-1/2} sum_n alpha(n) f(n) Phi(n/x); the sum runs to
// n <= A x with A the top of the weight's support
std::complex<double> partial_sum(const AlphaFn& alpha, const MultiplicativeFunction& F, double x,
                                 const StepWeight& phi, const PrimeTable& table);
std::complex<double> partial_sum(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x,
                                 const StepWeight& phi, const PrimeTable& table);

// exact E|S_x|^2 = sum |f(n)|^2 |Phi(n/x)|^2 / sum_{n<=x} |f(n)|^2
double partial_sum_second_moment(const MultiplicativeFunction& F, double x, const StepWeight& phi,
                                 const PrimeTable& table);

// t^{-1/2} sum over y-smooth n of alpha(n) f(n) Phi(n/t)
std::complex<double> s_ty(const SteinhausPhases& phases, const MultiplicativeFunction& F, double t, double y,
                          const StepWeight& phi, const PrimeTable& table);

// Truncation geometry x_k = x^{eps + k delta}, I_k = (x_k, x_{k+1}].
struct TruncationScheme {
    double eps = 0.2;
    double delta = 0.3;

    TruncationScheme(double eps_in, double delta_in);
};

// Edges instantiated for a concrete (x, A). K is the smallest k >= 0 with
// x_{K+1} >= A x; above `floor_threshold_x` this agrees with the closed form
// floor((1 - eps) / delta).
struct TruncationLayout {
    std::vector<double> edges;  // x_0 .. x_{K+1}
    int K = 0;
    bool floor_formula_holds = false;
    double floor_threshold_x = 0.0;

    double x_k(int k) const { return edges[static_cast<std::size_t>(k)]; }
};

TruncationLayout truncation_layout(const TruncationScheme& scheme, double x, double A);

// Partial sum restricted to n whose largest prime factor p lies in some I_k
// with the rest of n being x_k-smooth, split by p.
struct TruncatedSum {
    std::complex<double> total = 0.0;
    TruncationLayout layout;
    std::vector<std::uint64_t> primes;             // all primes in (x_0, x_{K+1}]
    std::vector<int> interval_of;                  // k with p in I_k
    std::vector<std::complex<double>> z_per_prime;  // normalized contribution of p
};

TruncatedSum truncated_sum(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x,
                           const StepWeight& phi, const TruncationScheme& scheme, const PrimeTable& table);

// sum_k (sum_{n<=x}|f(n)|^2)^{-1} sum_{p in I_k} |f(p)|^2
//     |sum_{x_k-smooth m} alpha(m) f(m) Phi(p m / x)|^2
struct BracketT {
    double total = 0.0;
    TruncationLayout layout;
    std::vector<double> per_k;
};

BracketT bracket_T(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x, const StepWeight& phi,
                   const TruncationScheme& scheme, const PrimeTable& table);

// (1/2pi) integral |K_Phi(1/2 + is)|^2 m_{y,t}(ds) on the grid, t = y^{1/r},
// plus the closed-form tail of the non-oscillating part of |K|^2 beyond the
// grid taken at the density's mean value 1.
struct VHat {
    double value = 0.0;
    double grid_part = 0.0;
    double tail_correction = 0.0;
    double tail_bound = 0.0;  // crude mass bound (C/|s|)^2 past the grid
};

VHat v_infty_estimator(const SteinhausPhases& phases, const MultiplicativeFunction& F, double y, double r,
                       const StepWeight& phi, const Grid& grid, const PrimeTable& table, double tail_tol = 0.01);

// MC estimate over replicates of sum_p |Z'_{x,p}|^4
MomentEstimate lindeberg_fourth(const MultiplicativeFunction& F, double x, const StepWeight& phi,
                                const TruncationScheme& scheme, const PrimeTable& table, std::size_t n_mc,
                                std::uint64_t seed0);

}  // namespace mclab
