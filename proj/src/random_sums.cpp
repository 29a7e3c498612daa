#include "mclab/random_sums.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "mclab/errors.hpp"
#include "mclab/rng.hpp"
#include "mclab/stats.hpp"

namespace mclab {

namespace {

using cd = std::complex<double>;

struct ComplexKahan {
    Kahan re, im;
    void add(cd z) {
        re.add(z.real());
        im.add(z.imag());
    }
    cd sum() const { return {re.sum, im.sum}; }
};

// sum_{n<=x} |f(n)|^2; at least 1 because f(1) = 1
double weight_normalizer(const MultiplicativeFunction& F, double x, const PrimeTable& table) {
    if (!(x >= 1.0)) throw std::domain_error("partial_sum: x must be at least 1");
    auto nx = static_cast<std::uint64_t>(x);
    if (nx > table.limit()) throw std::out_of_range("partial_sum: x exceeds prime table limit");
    auto g = sieve_g_values(F, nx, table);
    Kahan acc;
    for (std::uint64_t n = 1; n <= nx; ++n) acc.add(g[n]);
    return acc.sum;
}

// alpha(n) f(n) from a factorization carried by the smooth enumerator
cd smooth_coefficient(const SteinhausPhases& phases, const MultiplicativeFunction& F, const PrimeTable& table,
                      const std::vector<std::size_t>& pidx, const std::vector<std::uint32_t>& expo) {
    cd c = 1.0;
    double ang = 0.0;
    for (std::size_t i = 0; i < pidx.size(); ++i) {
        std::uint64_t p = table.primes()[pidx[i]];
        c *= F.f(p, expo[i]);
        ang += expo[i] * phases.angle(p);
    }
    return c * std::polar(1.0, ang);
}

struct SmoothTerm {
    double m;
    cd c;  // alpha(m) f(m)
};

// x_k-smooth m <= cap with coefficients, sorted by m for early exit per prime
std::vector<SmoothTerm> smooth_terms(const SteinhausPhases& phases, const MultiplicativeFunction& F, double cap,
                                     double y, const PrimeTable& table) {
    std::vector<SmoothTerm> out;
    for_each_smooth(cap, y, table,
                    [&](std::uint64_t n, const std::vector<std::size_t>& pidx, const std::vector<std::uint32_t>& expo) {
                        out.push_back({static_cast<double>(n), smooth_coefficient(phases, F, table, pidx, expo)});
                    });
    std::sort(out.begin(), out.end(), [](const SmoothTerm& a, const SmoothTerm& b) { return a.m < b.m; });
    return out;
}

// Visits every prime p in (x_0, x_{K+1}] (capped at the table limit) in
// ascending order with its interval index and the inner smooth sum
// W_p = sum_{x_k-smooth m, p m <= A x} alpha(m) f(m) Phi(p m / x).
template <typename PerPrime>
void truncation_scan(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x, const StepWeight& phi,
                     const TruncationLayout& layout, const PrimeTable& table, PerPrime&& per_prime) {
    double target = phi.support_end() * x;
    if (target > static_cast<double>(table.limit()))
        throw std::out_of_range("truncated_sum: A x exceeds prime table limit");
    for (int k = 0; k <= layout.K; ++k) {
        double lo = layout.x_k(k);
        double hi = std::min(layout.x_k(k + 1), static_cast<double>(table.limit()));
        if (hi <= lo) continue;
        auto terms = smooth_terms(phases, F, target / lo, lo, table);
        for (std::size_t i = table.prime_count(lo); i < table.prime_count(hi); ++i) {
            std::uint64_t p = table.primes()[i];
            double mcap = target / static_cast<double>(p);
            ComplexKahan w;
            for (const auto& t : terms) {
                if (t.m > mcap) break;
                w.add(t.c * phi(static_cast<double>(p) * t.m / x));
            }
            per_prime(k, p, w.sum());
        }
    }
}

}  // namespace

std::complex<double> partial_sum(const AlphaFn& alpha, const MultiplicativeFunction& F, double x,
                                 const StepWeight& phi, const PrimeTable& table) {
    double norm = weight_normalizer(F, x, table);
    double top = phi.support_end() * x;
    auto nmax = static_cast<std::uint64_t>(top * (1.0 + 1e-12));
    if (nmax > table.limit()) throw std::out_of_range("partial_sum: A x exceeds prime table limit");
    auto f = sieve_f_values(F, nmax, table);
    ComplexKahan acc;
    for (std::uint64_t n = 1; n <= nmax; ++n) {
        if (f[n] == 0.0) continue;
        cd w = phi(static_cast<double>(n) / x);
        if (w == 0.0) continue;
        acc.add(alpha(n) * f[n] * w);
    }
    return acc.sum() / std::sqrt(norm);
}

std::complex<double> partial_sum(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x,
                                 const StepWeight& phi, const PrimeTable& table) {
    return partial_sum([&](std::uint64_t n) { return phases.at(n, table); }, F, x, phi, table);
}

double partial_sum_second_moment(const MultiplicativeFunction& F, double x, const StepWeight& phi,
                                 const PrimeTable& table) {
    double norm = weight_normalizer(F, x, table);
    double top = phi.support_end() * x;
    auto nmax = static_cast<std::uint64_t>(top * (1.0 + 1e-12));
    if (nmax > table.limit()) throw std::out_of_range("partial_sum_second_moment: A x exceeds prime table limit");
    auto g = sieve_g_values(F, nmax, table);
    Kahan acc;
    for (std::uint64_t n = 1; n <= nmax; ++n) {
        if (g[n] == 0.0) continue;
        acc.add(g[n] * std::norm(phi(static_cast<double>(n) / x)));
    }
    return acc.sum / norm;
}

std::complex<double> s_ty(const SteinhausPhases& phases, const MultiplicativeFunction& F, double t, double y,
                          const StepWeight& phi, const PrimeTable& table) {
    if (!(t > 0.0)) throw std::domain_error("s_ty: t must be positive");
    if (!(y >= 0.0) || y > static_cast<double>(table.limit()))
        throw std::out_of_range("s_ty: smoothness cutoff outside the prime table");
    ComplexKahan acc;
    for_each_smooth(phi.support_end() * t, y, table,
                    [&](std::uint64_t n, const std::vector<std::size_t>& pidx, const std::vector<std::uint32_t>& expo) {
                        cd w = phi(static_cast<double>(n) / t);
                        if (w == 0.0) return;
                        acc.add(w * smooth_coefficient(phases, F, table, pidx, expo));
                    });
    return acc.sum() / std::sqrt(t);
}

TruncationScheme::TruncationScheme(double eps_in, double delta_in) : eps(eps_in), delta(delta_in) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("TruncationScheme: eps must lie in (0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("TruncationScheme: delta must lie in (0, 1)");
}

TruncationLayout truncation_layout(const TruncationScheme& scheme, double x, double A) {
    if (!(x > 1.0)) throw std::domain_error("truncation_layout: x must exceed 1");
    if (!(A > 0.0)) throw std::domain_error("truncation_layout: A must be positive");
    double target = A * x;
    auto edge = [&](int k) { return std::pow(x, scheme.eps + k * scheme.delta); };
    TruncationLayout out;
    while (edge(out.K + 1) < target) {
        ++out.K;
        if (out.K > (1 << 20)) throw ResourceError("truncation_layout: interval count exploded");
    }
    for (int k = 0; k <= out.K + 1; ++k) out.edges.push_back(edge(k));
    int k_floor = static_cast<int>(std::floor((1.0 - scheme.eps) / scheme.delta + 1e-12));
    out.floor_formula_holds = (out.K == k_floor);
    // x_{k_floor + 1} = x^{1 + gap}; the floor value takes over once x^gap >= A
    double gap = scheme.eps + (k_floor + 1) * scheme.delta - 1.0;
    if (gap > 1e-12)
        out.floor_threshold_x = std::max(1.0, std::pow(A, 1.0 / gap));
    else
        out.floor_threshold_x = A <= 1.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return out;
}

TruncatedSum truncated_sum(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x,
                           const StepWeight& phi, const TruncationScheme& scheme, const PrimeTable& table) {
    TruncatedSum out;
    out.layout = truncation_layout(scheme, x, phi.support_end());
    double rsn = 1.0 / std::sqrt(weight_normalizer(F, x, table));
    ComplexKahan total;
    truncation_scan(phases, F, x, phi, out.layout, table, [&](int k, std::uint64_t p, cd w) {
        cd z = rsn * F.f(p, 1) * phases.at_prime(p) * w;
        out.primes.push_back(p);
        out.interval_of.push_back(k);
        out.z_per_prime.push_back(z);
        total.add(z);
    });
    out.total = total.sum();
    return out;
}

BracketT bracket_T(const SteinhausPhases& phases, const MultiplicativeFunction& F, double x, const StepWeight& phi,
                   const TruncationScheme& scheme, const PrimeTable& table) {
    BracketT out;
    out.layout = truncation_layout(scheme, x, phi.support_end());
    double norm = weight_normalizer(F, x, table);
    std::vector<Kahan> acc(static_cast<std::size_t>(out.layout.K) + 1);
    truncation_scan(phases, F, x, phi, out.layout, table, [&](int k, std::uint64_t p, cd w) {
        acc[static_cast<std::size_t>(k)].add(std::norm(F.f(p, 1)) * std::norm(w) / norm);
    });
    Kahan total;
    for (const auto& a : acc) {
        out.per_k.push_back(a.sum);
        total.add(a.sum);
    }
    out.total = total.sum;
    return out;
}

VHat v_infty_estimator(const SteinhausPhases& phases, const MultiplicativeFunction& F, double y, double r,
                       const StepWeight& phi, const Grid& grid, const PrimeTable& table, double tail_tol) {
    if (!(r > 0.0)) throw std::domain_error("v_infty_estimator: r must be positive");
    double s_pos = grid.hi();
    double s_neg = -grid.lo;
    if (!(grid.lo < 0.0 && s_pos > 0.0) || std::fabs(s_pos - s_neg) > grid.ds * (1.0 + 1e-9))
        throw std::domain_error("v_infty_estimator: grid must straddle 0 symmetrically");

    ChaosParams params;
    params.y = y;
    params.t = std::pow(y, 1.0 / r);
    params.mode = FactorMode::full;
    auto m = m_measure(phases, F, params, grid, table);

    std::vector<double> w(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i)
        w[i] = std::norm(mellin_K(phi, {0.5, grid.node(i)})) / (2.0 * std::numbers::pi);

    VHat out;
    out.grid_part = m.integral(w);
    // beyond the grid the density is replaced by its unit mean, so the
    // non-oscillating part of |kernel|^2 integrates in closed form per side
    double d = kernel_diagonal_mass(phi);
    auto side = [](double s) { return 0.5 * std::numbers::pi - std::atan(2.0 * s); };
    out.tail_correction = d / std::numbers::pi * (side(s_pos) + side(s_neg));
    double c = phi.kernel_tail_constant();
    out.tail_bound = c * c / (2.0 * std::numbers::pi) * (1.0 / s_pos + 1.0 / s_neg);
    if (!(out.tail_bound < tail_tol)) {
        std::ostringstream msg;
        msg << "v_infty_estimator: neglected tail bound " << out.tail_bound << " exceeds tolerance " << tail_tol
            << " (extend the grid)";
        throw PrecisionError(msg.str());
    }
    out.value = out.grid_part + out.tail_correction;
    return out;
}

MomentEstimate lindeberg_fourth(const MultiplicativeFunction& F, double x, const StepWeight& phi,
                                const TruncationScheme& scheme, const PrimeTable& table, std::size_t n_mc,
                                std::uint64_t seed0) {
    if (n_mc == 0) throw std::invalid_argument("lindeberg_fourth: need at least one replicate");
    MomentEstimate out;
    out.samples.reserve(n_mc);
    for (std::size_t rep = 0; rep < n_mc; ++rep) {
        SteinhausPhases phases(replicate_seed(seed0, rep));
        auto ts = truncated_sum(phases, F, x, phi, scheme, table);
        Kahan s;
        for (auto z : ts.z_per_prime) {
            double q = std::norm(z);
            s.add(q * q);
        }
        out.samples.push_back(s.sum);
    }
    auto ms = mean_se(out.samples);
    out.mean = ms.mean;
    out.se = ms.se;
    out.n = ms.n;
    return out;
}

}  // namespace mclab
