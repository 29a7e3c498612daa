#include "mclab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mclab/errors.hpp"
#include "mclab/rng.hpp"
#include "mclab/special_functions.hpp"
#include "mclab/stats.hpp"

namespace mclab {

double scale_sigma(double t) {
    if (std::isinf(t) && t > 0.0) return 0.5;
    if (!(t >= 3.0)) throw std::domain_error("scale_sigma: t must be >= 3 or infinite");
    return 0.5 * (1.0 + 1.0 / std::log(t));
}

Grid Grid::over(double lo, double hi, double ds_max) {
    if (!(hi > lo) || !(ds_max > 0.0)) throw std::domain_error("Grid::over: need hi > lo and ds_max > 0");
    auto n = static_cast<std::size_t>(std::ceil((hi - lo) / ds_max - 1e-12));
    if (n == 0) n = 1;
    return Grid{lo, (hi - lo) / static_cast<double>(n), n};
}

Grid default_grid(double y, double lo, double hi) {
    if (!(y > 1.0)) throw std::domain_error("default_grid: need y > 1");
    return Grid::over(lo, hi, 1.0 / (4.0 * std::log(y)));
}

namespace {

// smallest k with p^{-k sigma}|f(p^k)| < 1e-14, widened until the geometric
// tail bound sup|f| * p^{-(k+1)sigma} / (1 - p^{-sigma}) drops below 1e-12
int default_power_cap(const MultiplicativeFunction& F, std::uint64_t p, double sigma) {
    double ps = std::pow(static_cast<double>(p), -sigma);
    double pw = 1.0;
    int k = 0;
    do {
        ++k;
        pw *= ps;
        if (k > 4000) throw ModelError("local_factor: power cap search exceeded k = 4000");
    } while (!(pw * std::abs(F.f(p, static_cast<std::uint32_t>(k))) < 1e-14));
    while (F.sup_abs_f * pw * ps / (1.0 - ps) >= 1e-12) {
        ++k;
        pw *= ps;
        if (k > 4000) throw ModelError("local_factor: power cap search exceeded k = 4000");
    }
    return k;
}

int checked_power_cap(const MultiplicativeFunction& F, std::uint64_t p, double sigma, int cap) {
    if (cap <= 0) return default_power_cap(F, p, sigma);
    double ps = std::pow(static_cast<double>(p), -sigma);
    double tail = F.sup_abs_f * std::pow(ps, cap + 1) / (1.0 - ps);
    if (tail >= 1e-12)
        throw PrecisionError("local_factor: explicit prime_power_cap leaves a local tail above 1e-12");
    return cap;
}

// principal log(1 + z) by alternating series for |z| <= 1/4; agrees with
// std::log(1 + z) since Re(1 + z) > 0 there, at a fraction of the cost
std::complex<double> log1p_series(std::complex<double> z) {
    std::complex<double> term = z, acc = z;
    for (int k = 2; k < 64; ++k) {
        term *= -z;
        std::complex<double> add = term / static_cast<double>(k);
        acc += add;
        if (std::norm(add) <= std::norm(acc) * 1e-34) break;
    }
    return acc;
}

}  // namespace

std::complex<double> local_factor(const MultiplicativeFunction& F, std::uint64_t p, std::complex<double> alpha_p,
                                  double sigma, double spt, FactorMode mode, int cap) {
    double lp = std::log(static_cast<double>(p));
    std::complex<double> sexp = std::polar(std::pow(static_cast<double>(p), -sigma), -spt * lp);
    if (mode == FactorMode::exp_linear) return std::exp(F.f(p, 1) * alpha_p * sexp);
    int kmax = checked_power_cap(F, p, sigma, cap);
    std::complex<double> w = alpha_p * sexp;
    std::complex<double> acc = 0.0;
    for (int k = kmax; k >= 1; --k) acc = F.f(p, static_cast<std::uint32_t>(k)) + w * acc;
    return 1.0 + w * acc;
}

EulerProduct euler_product(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                           const Grid& grid, const PrimeTable& table) {
    double sigma = params.sigma();
    std::size_t np = table.prime_count(params.y);
    EulerProduct out;
    out.grid = grid;
    out.log_main.assign(grid.n, 0.0);
    out.near_zero_part.assign(grid.n, 1.0);
    std::vector<char> hit(grid.n, 0);

    std::vector<std::complex<double>> coeff;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t p = table.primes()[i];
        double lp = std::log(static_cast<double>(p));
        double ps = std::pow(static_cast<double>(p), -sigma);
        std::complex<double> alpha = phases.at_prime(p);
        // w holds alpha(p) p^{-sigma - i s}; advance s node-by-node by one rotation
        std::complex<double> w = alpha * std::polar(ps, -grid.lo * lp);
        std::complex<double> rot = std::polar(1.0, -grid.ds * lp);

        if (params.mode == FactorMode::exp_linear) {
            std::complex<double> f1 = F.f(p, 1);
            if (f1 == 0.0) continue;
            for (std::size_t j = 0; j < grid.n; ++j) {
                out.log_main[j] += f1 * w;
                w *= rot;
            }
            continue;
        }

        int kmax = checked_power_cap(F, p, sigma, params.prime_power_cap);
        coeff.resize(static_cast<std::size_t>(kmax));
        for (int k = 1; k <= kmax; ++k) coeff[static_cast<std::size_t>(k - 1)] = F.f(p, static_cast<std::uint32_t>(k));
        for (std::size_t j = 0; j < grid.n; ++j) {
            std::complex<double> acc = 0.0;
            for (int k = kmax; k >= 1; --k) acc = coeff[static_cast<std::size_t>(k - 1)] + w * acc;
            std::complex<double> z = w * acc;
            std::complex<double> local = 1.0 + z;
            if (std::abs(local) <= 1e-8) {
                out.near_zero_part[j] *= local;
                hit[j] = 1;
            } else if (std::norm(z) <= 0.0625) {
                out.log_main[j] += log1p_series(z);
            } else {
                out.log_main[j] += std::log(local);
            }
            w *= rot;
        }
    }
    for (std::size_t j = 0; j < grid.n; ++j)
        if (hit[j]) out.flagged.push_back(static_cast<std::uint32_t>(j));
    return out;
}

SmoothSum second_moment_normalizer(const MultiplicativeFunction& F, double y, double sigma, const PrimeTable& table,
                                   double n_cap, double tail_tol) {
    return smooth_weighted_sum(F, y, 2.0 * sigma, table, n_cap, tail_tol);
}

double GridMeasure::mass() const {
    Kahan acc;
    for (double d : density) acc.add(d);
    return grid.ds * acc.sum;
}

double GridMeasure::interval_mass(double a, double b) const {
    // left-closed node set [a, b), indices snapped to cells
    auto lo_idx = static_cast<std::ptrdiff_t>(std::ceil((a - grid.lo) / grid.ds - 1e-9));
    auto hi_idx = static_cast<std::ptrdiff_t>(std::ceil((b - grid.lo) / grid.ds - 1e-9));
    lo_idx = std::max<std::ptrdiff_t>(lo_idx, 0);
    hi_idx = std::min<std::ptrdiff_t>(hi_idx, static_cast<std::ptrdiff_t>(grid.n));
    Kahan acc;
    for (std::ptrdiff_t i = lo_idx; i < hi_idx; ++i) acc.add(density[static_cast<std::size_t>(i)]);
    return grid.ds * acc.sum;
}

double GridMeasure::integral(const std::vector<double>& weights) const {
    if (weights.size() != density.size())
        throw std::invalid_argument("GridMeasure::integral: weights must match the grid");
    Kahan acc;
    for (std::size_t i = 0; i < density.size(); ++i) acc.add(weights[i] * density[i]);
    return grid.ds * acc.sum;
}

double GridMeasure::integral(const std::function<double(double)>& h) const {
    Kahan acc;
    for (std::size_t i = 0; i < density.size(); ++i) acc.add(h(grid.node(i)) * density[i]);
    return grid.ds * acc.sum;
}

GridMeasure m_measure(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                      const Grid& grid, const PrimeTable& table) {
    ChaosParams q = params;
    q.mode = FactorMode::full;
    EulerProduct ep = euler_product(phases, F, q, grid, table);
    double log_norm = log_smooth_weighted_product(F, params.y, 2.0 * params.sigma(), table);
    GridMeasure out{grid, std::vector<double>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) out.density[i] = ep.normalized_sq_modulus(i, log_norm);
    return out;
}

double log_tilt_normalizer(const MultiplicativeFunction& F, double y, double sigma, const PrimeTable& table) {
    std::size_t np = table.prime_count(y);
    Kahan acc;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t p = table.primes()[i];
        double b = 2.0 * std::abs(F.f(p, 1)) * std::pow(static_cast<double>(p), -sigma);
        if (b > 0.0) acc.add(std::log(bessel_i0(b)));
    }
    return acc.sum;
}

GridMeasure nu_measure(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                       const Grid& grid, const PrimeTable& table) {
    ChaosParams q = params;
    q.mode = FactorMode::exp_linear;
    EulerProduct ep = euler_product(phases, F, q, grid, table);
    double log_norm = log_tilt_normalizer(F, params.y, params.sigma(), table);
    GridMeasure out{grid, std::vector<double>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) out.density[i] = ep.normalized_sq_modulus(i, log_norm);
    return out;
}

FieldSlice g_field(const SteinhausPhases& phases, const MultiplicativeFunction& F, const ChaosParams& params,
                   const Grid& grid, const PrimeTable& table) {
    ChaosParams q = params;
    q.mode = FactorMode::exp_linear;
    EulerProduct ep = euler_product(phases, F, q, grid, table);
    FieldSlice out{grid, std::vector<double>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) out.values[i] = 2.0 * ep.log_main[i].real();
    return out;
}

double tilt_covariance_ratio(const MultiplicativeFunction& F, double y, double sigma1, double s1, double sigma2,
                             double s2, const PrimeTable& table) {
    std::size_t np = table.prime_count(y);
    Kahan acc;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t p = table.primes()[i];
        double fa = std::abs(F.f(p, 1));
        if (fa == 0.0) continue;
        double lp = std::log(static_cast<double>(p));
        double r1 = std::pow(static_cast<double>(p), -sigma1);
        double r2 = std::pow(static_cast<double>(p), -sigma2);
        double comb = 2.0 * fa * std::abs(std::polar(r1, -s1 * lp) + std::polar(r2, -s2 * lp));
        acc.add(std::log(bessel_i0(comb)) - std::log(bessel_i0(2.0 * fa * r1)) - std::log(bessel_i0(2.0 * fa * r2)));
    }
    return std::exp(acc.sum);
}

double two_point_normalizer(const MultiplicativeFunction& F, const ChaosParams& params, double s1, double s2,
                            const PrimeTable& table) {
    double sigma = params.sigma();
    return tilt_covariance_ratio(F, params.y, sigma, 0.0, sigma, std::fabs(s2 - s1), table);
}

FactorizationCheck density_factorization_check(const SteinhausPhases& phases, const MultiplicativeFunction& F,
                                               const ChaosParams& params, const std::vector<double>& s_points,
                                               const PrimeTable& table) {
    double sigma = params.sigma();
    std::size_t np = table.prime_count(params.y);
    if (np == 0) throw std::domain_error("density_factorization_check: no primes below cutoff");
    const auto& P = table.primes();

    // head/tail split: all primes from split_idx on satisfy the smallness test
    std::size_t split_idx = 0;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t p = P[i];
        double v = std::abs(F.f(p, 1)) / std::sqrt(static_cast<double>(p)) +
                   std::abs(F.f(p, 2)) / static_cast<double>(p);
        if (v > 0.5) split_idx = i + 1;
    }
    if (split_idx >= np)
        throw ModelError("density_factorization_check: no split point below the cutoff keeps degree-2 tails small");

    FactorizationCheck out;
    out.y0 = static_cast<double>(P[split_idx]);

    double log_norm_m = log_smooth_weighted_product(F, params.y, 2.0 * sigma, table);
    double log_norm_nu = log_tilt_normalizer(F, params.y, sigma, table);
    double x0 = std::exp(log_norm_nu - log_norm_m);

    double implied_min = std::numeric_limits<double>::infinity();
    double implied_max = -std::numeric_limits<double>::infinity();
    for (double s : s_points) {
        double log_a2 = 0.0;  // log |A|^2
        double g_sum = 0.0;   // field value at s
        double x1 = 1.0, x2 = 1.0, x3 = 1.0;
        for (std::size_t i = 0; i < np; ++i) {
            std::uint64_t p = P[i];
            std::complex<double> alpha = phases.at_prime(p);
            std::complex<double> fp = local_factor(F, p, alpha, sigma, s, FactorMode::full, params.prime_power_cap);
            std::complex<double> c1 = F.f(p, 1) * alpha *
                                      std::polar(std::pow(static_cast<double>(p), -sigma),
                                                 -s * std::log(static_cast<double>(p)));
            double gp = 2.0 * c1.real();
            log_a2 += std::log(std::norm(fp));
            g_sum += gp;
            if (i < split_idx) {
                x1 *= std::norm(fp) * std::exp(-gp);
            } else {
                x2 *= std::norm(fp) / std::norm(1.0 + c1);
                x3 *= std::exp(-gp) * std::norm(1.0 + c1);
            }
        }
        double m_dens = std::exp(log_a2 - log_norm_m);
        double nu_dens = std::exp(g_sum - log_norm_nu);
        double implied_x0 = m_dens / (nu_dens * x1 * x2 * x3);
        implied_min = std::min(implied_min, implied_x0);
        implied_max = std::max(implied_max, implied_x0);
        out.residual.push_back(std::fabs(m_dens - x0 * x1 * x2 * x3 * nu_dens) / m_dens);
    }
    out.x0_spread = s_points.empty() ? 0.0 : implied_max - implied_min;
    return out;
}

MomentEstimate multifractal_moment(const MultiplicativeFunction& F, const ChaosParams& params, const Grid& grid,
                                   double eps, double q, std::size_t n_mc, std::uint64_t seed0,
                                   const PrimeTable& table) {
    auto nodes = static_cast<std::size_t>(std::llround(eps / grid.ds));
    if (nodes < 8) throw std::domain_error("multifractal_moment: eps must span at least 8 grid nodes");
    if (n_mc == 0) throw std::invalid_argument("multifractal_moment: n_mc must be positive");
    MomentEstimate out;
    out.samples.resize(n_mc);
    for (std::size_t r = 0; r < n_mc; ++r) {
        SteinhausPhases phases(replicate_seed(seed0, r));
        GridMeasure nu = nu_measure(phases, F, params, grid, table);
        out.samples[r] = std::pow(nu.interval_mass(grid.lo, grid.lo + eps), q);
    }
    MeanSE ms = mean_se(out.samples);
    out.mean = ms.mean;
    out.se = ms.se;
    out.n = ms.n;
    return out;
}

double interval_moment_bound(double theta, double eps, double q, double qprime, double delta) {
    if (!(qprime > q)) throw std::domain_error("interval_moment_bound: need qprime > q");
    if (!(eps > 0.0) || !(delta > 0.0)) throw std::domain_error("interval_moment_bound: need eps, delta > 0");
    return std::pow(eps, q) * std::pow(delta, -theta * q * (qprime - 1.0));
}

MomentEstimate modified_second_moment(const MultiplicativeFunction& F, double y, double ycap,
                                      const std::vector<double>& h_weights, double K, const Grid& grid,
                                      std::size_t n_mc, std::uint64_t seed0, const PrimeTable& table) {
    if (!(ycap >= y * y)) throw std::domain_error("modified_second_moment: need ycap >= y^2");
    if (!(K > 0.0)) throw std::domain_error("modified_second_moment: need K > 0");
    if (n_mc == 0) throw std::invalid_argument("modified_second_moment: n_mc must be positive");
    ChaosParams inner{y, std::numeric_limits<double>::infinity(), FactorMode::exp_linear, 0};
    ChaosParams outer{ycap, y, FactorMode::exp_linear, 0};
    MomentEstimate out;
    out.samples.resize(n_mc);
    for (std::size_t r = 0; r < n_mc; ++r) {
        SteinhausPhases phases(replicate_seed(seed0, r));
        GridMeasure nu_a = nu_measure(phases, F, inner, grid, table);
        GridMeasure nu_b = nu_measure(phases, F, outer, grid, table);
        double diff = nu_a.integral(h_weights) - nu_b.integral(h_weights);
        out.samples[r] = diff * diff * std::exp(-nu_a.mass() / K);
    }
    MeanSE ms = mean_se(out.samples);
    out.mean = ms.mean;
    out.se = ms.se;
    out.n = ms.n;
    return out;
}

double cap_tail_estimate(const MultiplicativeFunction& F, double ycap, double sigma) {
    if (!(ycap > 2.0)) throw std::domain_error("cap_tail_estimate: need ycap > 2");
    if (sigma <= 0.5) return std::numeric_limits<double>::infinity();
    return 2.0 * F.theta * std::pow(ycap, 1.0 - 2.0 * sigma) / ((2.0 * sigma - 1.0) * std::log(ycap));
}

}  // namespace mclab
