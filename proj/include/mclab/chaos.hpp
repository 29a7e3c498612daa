#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "mclab/mult_func.hpp"
#include "mclab/primes.hpp"
#include "mclab/steinhaus.hpp"

namespace mclab {

// critical-strip abscissa 1/2 * (1 + 1/log t); t = infinity gives exactly 1/2
double scale_sigma(double t);

// Uniform grid of n nodes at the left endpoints of cells of width ds:
// s_i = lo + i*ds covering [lo, lo + n*ds).
struct Grid {
    double lo = 0.0;
    double ds = 0.0;
    std::size_t n = 0;

    double node(std::size_t i) const { return lo + ds * static_cast<double>(i); }
    double hi() const { return lo + ds * static_cast<double>(n); }

    // cover [lo, hi) with cells no wider than ds_max
    static Grid over(double lo, double hi, double ds_max);
};

// grid over [lo, hi) with the default spacing 1/(4 log y)
Grid default_grid(double y, double lo = 0.0, double hi = 1.0);

enum class FactorMode {
    full,        // local factor sum_k alpha(p)^k f(p^k) p^{-ks}
    exp_linear,  // local factor exp(alpha(p) f(p) p^{-s})
};

struct ChaosParams {
    double y = 2.0;  // prime cutoff
    double t = std::numeric_limits<double>::infinity();  // scale; finite t >= 3 or infinity
    FactorMode mode = FactorMode::full;
    int prime_power_cap = 0;  // 0: per prime, smallest k with p^{-k sigma}|f(p^k)| < 1e-14

    double sigma() const { return scale_sigma(t); }
};

// One truncated local factor at s = sigma + i*spt. cap <= 0 selects the
// per-prime default; an explicit cap must leave a tail below 1e-12.
std::complex<double> local_factor(const MultiplicativeFunction& F, std::uint64_t p, std::complex<double> alpha_p,
                                  double sigma, double spt, FactorMode mode, int cap);

// Product over p <= y of local factors, evaluated on every grid node.
// Regular factors accumulate as complex logs (continuous magnitude scale, one
// branch choice per factor); factors within 1e-8 of 0 are kept out of the log
// and multiplied directly, with the node recorded in `flagged`.
struct EulerProduct {
    Grid grid;
    std::vector<std::complex<double>> log_main;
    std::vector<std::complex<double>> near_zero_part;  // usually 1
    std::vector<std::uint32_t> flagged;

    std::complex<double> value(std::size_t i) const { return std::exp(log_main[i]) * near_zero_part[i]; }
    // |value|^2 * exp(-log_normalizer), stable against overflow of value()
    double normalized_sq_modulus(std::size_t i, double log_normalizer) const {
        return std::exp(2.0 * log_main[i].real() - log_normalizer) * std::norm(near_zero_part[i]);
    }
};

EulerProduct euler_product(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                           const Grid& grid, const PrimeTable& table);

// sum over y-smooth n of |f(n)|^2 n^{-2 sigma}: the mean of |A_y(sigma+is)|^2
// at every s. Enumerated with a rigorous tail bound (PrecisionError above
// tail_tol). The product route log_smooth_weighted_product(F, y, 2 sigma)
// gives the same value without truncation.
SmoothSum second_moment_normalizer(const MultiplicativeFunction& F, double y, double sigma, const PrimeTable& table,
                                   double n_cap, double tail_tol = 1e-10);

// density sampled at grid nodes; interval masses use left-closed node sets
struct GridMeasure {
    Grid grid;
    std::vector<double> density;

    double mass() const;
    double interval_mass(double a, double b) const;  // ds * sum over a <= s_i < b
    // ds * sum_i weights[i] * density[i]
    double integral(const std::vector<double>& weights) const;
    double integral(const std::function<double(double)>& h) const;
};

// density |A_y(sigma_t + is)|^2 / E|A_y|^2 with the full Euler factor
GridMeasure m_measure(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                      const Grid& grid, const PrimeTable& table);

// density exp(G(s)) / prod_{p<=y} I0(2|f(p)| p^{-sigma}) where
// G(s) = sum_{p<=y} 2 Re(f(p) alpha(p) p^{-sigma-is})
GridMeasure nu_measure(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                       const Grid& grid, const PrimeTable& table);

// the field G evaluated on the grid
struct FieldSlice {
    Grid grid;
    std::vector<double> values;
};

FieldSlice g_field(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                   const Grid& grid, const PrimeTable& table);

// log of the normalizer prod_{p<=y} I0(2|f(p)| p^{-sigma})
double log_tilt_normalizer(const MultiplicativeFunction& F, double y, double sigma, const PrimeTable& table);

// E[exp(G_A(s1) + G_B(s2))] / (E exp G_A(s1) * E exp G_B(s2)) for two fields
// sharing phases on p <= y but carrying their own abscissas
double tilt_covariance_ratio(const MultiplicativeFunction& F, double y, double sigma1, double s1, double sigma2,
                             double s2, const PrimeTable& table);

// same-abscissa case; computed from |s1 - s2| alone
double two_point_normalizer(const MultiplicativeFunction& F, const ChaosParams& params, double s1, double s2,
                            const PrimeTable& table);

// Pointwise ratio between the two chaos densities split into four factors:
// x0 = (E exp G) / (E|A|^2), constant in s;
// x1 = |A_{<y0}|^2 exp(-G_{<y0}) over the head primes;
// x2 = prod_{y0<=p<=y} |F_p|^2 / |1 + c_p|^2 with c_p the degree-1 term;
// x3 = prod_{y0<=p<=y} exp(-G_p) |1 + c_p|^2.
// The split point y0 is the smallest threshold with
// |f(p)| p^{-1/2} + |f(p^2)| p^{-1} <= 1/2 for every prime in [y0, y].
struct FactorizationCheck {
    double y0 = 0.0;
    std::vector<double> residual;  // |m_dens - x*nu_dens| / m_dens per point
    double x0_spread = 0.0;        // max - min of x0 across points
};

FactorizationCheck density_factorization_check(const SteinhausPhases& phases, const MultiplicativeFunction& F,
                                               const ChaosParams& params, const std::vector<double>& s_points,
                                               const PrimeTable& table);

// Monte Carlo moment of the measure of [grid.lo, grid.lo + eps)
struct MomentEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
    std::vector<double> samples;  // per-replicate values, replicate order
};

MomentEstimate multifractal_moment(const MultiplicativeFunction& F, const ChaosParams& params, const Grid& grid,
                                   double eps, double q, std::size_t n_mc, std::uint64_t seed0,
                                   const PrimeTable& table);

// scale of the moment bound eps^q * delta^{-theta q (qprime - 1)} for any
// qprime > q; delta is the correlation scale 1/log(min(y, t))
double interval_moment_bound(double theta, double eps, double q, double qprime, double delta);

// MC estimate of E[ |nu_{y,inf}(h) - nu_{ycap,y}(h)|^2 exp(-nu_{y,inf}(I)/K) ]
// with both measures driven by the same phases
MomentEstimate modified_second_moment(const MultiplicativeFunction& F, double y, double ycap,
                                      const std::vector<double>& h_weights, double K, const Grid& grid,
                                      std::size_t n_mc, std::uint64_t seed0, const PrimeTable& table);

// first-order size of the field variance dropped by cutting the prime product
// at ycap: 2 theta * ycap^{1-2 sigma} / ((2 sigma - 1) log ycap)
double cap_tail_estimate(const MultiplicativeFunction& F, double ycap, double sigma);

}  // namespace mclab
