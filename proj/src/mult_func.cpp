#include "mclab/mult_func.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mclab/errors.hpp"
#include "mclab/special_functions.hpp"
#include "mclab/stats.hpp"

namespace mclab {

namespace {

void check_theta(double theta) {
    // theta = 1 is allowed as a diagnostic edge (f identically 1)
    if (!(theta > 0.0) || theta > 1.0) throw ModelError("family: theta must lie in (0, 1]");
}

double li_integral(double t) {
    // integral of 1/log u over [2, t], composite Simpson
    if (t <= 2.0) return 0.0;
    const int panels = 4096;
    double h = (t - 2.0) / panels;
    double acc = 1.0 / std::log(2.0) + 1.0 / std::log(t);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) / std::log(2.0 + i * h);
    return acc * h / 3.0;
}

}  // namespace

MultiplicativeFunction two_squares_family() {
    MultiplicativeFunction F;
    F.name = "two-squares";
    F.theta = 0.5;
    F.rule = [](std::uint64_t p, std::uint32_t k) -> std::complex<double> {
        if (p == 2 || p % 4 == 1) return 1.0;
        return (k % 2 == 0) ? 1.0 : 0.0;
    };
    return F;
}

MultiplicativeFunction divisor_family(double z) {
    if (!(z > 0.0) || z > 1.0) throw ModelError("divisor_family: z must lie in (0, 1]");
    MultiplicativeFunction F;
    F.name = "divisor";
    F.theta = z * z;
    F.rule = [z](std::uint64_t, std::uint32_t k) -> std::complex<double> {
        // Gamma(z+k) / (Gamma(z) k!) by the recurrence f_k = f_{k-1} (z+k-1)/k
        double v = 1.0;
        for (std::uint32_t i = 1; i <= k; ++i) v *= (z + i - 1.0) / i;
        return v;
    };
    return F;
}

MultiplicativeFunction omega_multiplicity_family(double theta) {
    check_theta(theta);
    MultiplicativeFunction F;
    F.name = "omega-multiplicity";
    F.theta = theta;
    F.rule = [theta](std::uint64_t, std::uint32_t k) -> std::complex<double> {
        return std::pow(theta, 0.5 * k);
    };
    return F;
}

MultiplicativeFunction omega_distinct_family(double theta) {
    check_theta(theta);
    MultiplicativeFunction F;
    F.name = "omega-distinct";
    F.theta = theta;
    F.rule = [theta](std::uint64_t, std::uint32_t) -> std::complex<double> { return std::sqrt(theta); };
    return F;
}

MultiplicativeFunction family_by_name(const std::string& name, double theta) {
    if (name == "two-squares") return two_squares_family();
    if (name == "divisor") return divisor_family(std::sqrt(theta));
    if (name == "omega-multiplicity") return omega_multiplicity_family(theta);
    if (name == "omega-distinct") return omega_distinct_family(theta);
    throw ConfigError("unknown family: " + name);
}

std::complex<double> eval_f(const MultiplicativeFunction& F, std::uint64_t n, const PrimeTable& table) {
    std::complex<double> v = 1.0;
    for (auto [p, e] : factor(n, table)) v *= F.f(p, e);
    return v;
}

namespace {

// shared spf-driven multiplicative sieve; emit(n, base, p, k) with n = base * p^k, p = spf(n), p !| base
template <typename Emit>
void multiplicative_pass(std::uint64_t limit, const PrimeTable& table, Emit&& emit) {
    std::vector<std::uint32_t> base(limit + 1, 1);
    std::vector<std::uint8_t> cnt(limit + 1, 0);
    for (std::uint64_t n = 2; n <= limit; ++n) {
        std::uint64_t p = table.spf(n);
        std::uint64_t m = n / p;
        if (m > 1 && table.spf(m) == p) {
            cnt[n] = cnt[m] + 1;
            base[n] = base[m];
        } else {
            cnt[n] = 1;
            base[n] = static_cast<std::uint32_t>(m);
        }
        emit(n, base[n], p, static_cast<std::uint32_t>(cnt[n]));
    }
}

}  // namespace

std::vector<std::complex<double>> sieve_f_values(const MultiplicativeFunction& F, std::uint64_t limit,
                                                 const PrimeTable& table) {
    if (limit > table.limit()) throw std::out_of_range("sieve_f_values: limit exceeds table limit");
    std::vector<std::complex<double>> f(limit + 1, 0.0);
    f[1] = 1.0;
    multiplicative_pass(limit, table,
                        [&](std::uint64_t n, std::uint64_t b, std::uint64_t p, std::uint32_t k) { f[n] = f[b] * F.f(p, k); });
    return f;
}

std::vector<double> sieve_g_values(const MultiplicativeFunction& F, std::uint64_t limit, const PrimeTable& table) {
    if (limit > table.limit()) throw std::out_of_range("sieve_g_values: limit exceeds table limit");
    std::vector<double> g(limit + 1, 0.0);
    g[1] = 1.0;
    multiplicative_pass(limit, table,
                        [&](std::uint64_t n, std::uint64_t b, std::uint64_t p, std::uint32_t k) { g[n] = g[b] * F.g(p, k); });
    return g;
}

PrimeDensityReport chebyshev_pi_g(const MultiplicativeFunction& F, const std::vector<double>& t_samples,
                                  const PrimeTable& table) {
    if (t_samples.empty()) throw std::invalid_argument("chebyshev_pi_g: empty sample list");
    if (!std::is_sorted(t_samples.begin(), t_samples.end()))
        throw std::invalid_argument("chebyshev_pi_g: samples must be ascending");
    if (t_samples.front() < 2.0 || t_samples.back() > static_cast<double>(table.limit()))
        throw std::out_of_range("chebyshev_pi_g: samples outside [2, table limit]");

    const auto& primes = table.primes();
    std::vector<double> prefix(primes.size() + 1, 0.0);
    {
        Kahan acc;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            acc.add(F.g(primes[i], 1));
            prefix[i + 1] = acc.sum;
        }
    }
    auto pi_g_at = [&](double t) { return prefix[table.prime_count(t)]; };

    PrimeDensityReport rep;
    rep.t_samples = t_samples;
    for (double t : t_samples) {
        double pg = pi_g_at(t);
        double main = F.theta * t / std::log(t);
        rep.pi_g.push_back(pg);
        rep.main_term.push_back(main);
        rep.error_profile.push_back(pg - main);
        rep.error_profile_li.push_back(pg - F.theta * li_integral(t));
    }

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t_samples.size(); ++i) {
        double m = t_samples[i] / std::log(t_samples[i]);
        num += rep.pi_g[i] * m;
        den += m * m;
    }
    rep.theta_hat = num / den;

    // integral of |pi_g(t) - theta t/log t| / t^2 over the sampled range, log-spaced trapezoid
    double lo = std::max(2.0, t_samples.front()), hi = t_samples.back();
    if (hi > lo) {
        const int n = 4000;
        double lr = std::log(hi / lo);
        Kahan acc;
        double prev_t = lo;
        double prev_v = std::fabs(pi_g_at(lo) - F.theta * lo / std::log(lo)) / (lo * lo);
        for (int i = 1; i <= n; ++i) {
            double t = lo * std::exp(lr * i / n);
            double v = std::fabs(pi_g_at(t) - F.theta * t / std::log(t)) / (t * t);
            acc.add(0.5 * (prev_v + v) * (t - prev_t));
            prev_t = t;
            prev_v = v;
        }
        rep.integral_bound = acc.sum;
    }
    return rep;
}

MertensSum mertens_sum(const MultiplicativeFunction& F, double y, double t, double c, double s,
                       const PrimeTable& table) {
    if (!(y >= 2.0) || y > static_cast<double>(table.limit()))
        throw std::out_of_range("mertens_sum: y outside [2, table limit]");
    if (!(t >= 2.0)) throw std::domain_error("mertens_sum: t must be >= 2 (may be infinite)");
    if (!(c >= 0.0 && c <= 1.0)) throw std::domain_error("mertens_sum: c must lie in [0, 1]");
    double expo = std::isinf(t) ? 0.0 : c / std::log(t);
    std::size_t np = table.prime_count(y);
    Kahan acc;
    for (std::size_t i = 0; i < np; ++i) {
        double p = static_cast<double>(table.primes()[i]);
        acc.add(F.g(table.primes()[i], 1) * std::pow(p, -1.0 - expo) * std::cos(s * std::log(p)));
    }
    double cap = std::min(std::min(s == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::fabs(s),
                                   std::log(y)),
                          std::isinf(t) ? std::numeric_limits<double>::infinity() : std::log(t));
    return {acc.sum, F.theta * std::log(cap)};
}

EulerConstant euler_constant_Cg(const MultiplicativeFunction& F, double cutoff, const PrimeTable& table) {
    if (!(cutoff >= 2.0) || cutoff > static_cast<double>(table.limit()))
        throw std::out_of_range("euler_constant_Cg: cutoff outside [2, table limit]");
    std::size_t np = table.prime_count(cutoff);
    Kahan log_acc;
    double pig = 0.0;
    double gsup = F.sup_abs_f * F.sup_abs_f;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t p = table.primes()[i];
        double pinv = 1.0 / static_cast<double>(p);
        // local series sum_k g(p^k) p^{-k}; individual terms may vanish, so
        // stop on the geometric envelope gsup p^{-k-1}/(1 - 1/p) instead
        double local = 1.0, pw = 1.0;
        for (std::uint32_t k = 1; k <= 200; ++k) {
            pw *= pinv;
            local += F.g(p, k) * pw;
            if (gsup * pw * pinv / (1.0 - pinv) < 1e-17 * local) break;
            if (k == 200) throw ModelError("euler_constant_Cg: local series at p did not converge");
        }
        log_acc.add(std::log(local) + F.theta * std::log1p(-pinv));
        pig += F.g(p, 1);
    }
    // first-order tail: -E(T)/T with E(T) = pi_g(T) - theta pi(T)
    double E = pig - F.theta * static_cast<double>(np);
    double T = cutoff;
    EulerConstant out;
    out.log_tail_correction = -E / T;
    out.tail_uncertainty = std::fabs(E) / T;
    out.value = std::exp(log_acc.sum + out.log_tail_correction);
    return out;
}

QuadraticMean wirsing_sum(const MultiplicativeFunction& F, std::uint64_t x, const PrimeTable& table) {
    if (x < 2 || x > table.limit()) throw std::out_of_range("wirsing_sum: x outside [2, table limit]");
    auto g = sieve_g_values(F, x, table);
    Kahan acc;
    for (std::uint64_t n = 1; n <= x; ++n) acc.add(g[n]);
    double Cg = euler_constant_Cg(F, static_cast<double>(x), table).value;
    double lx = std::log(static_cast<double>(x));
    QuadraticMean out;
    out.exact = acc.sum;
    out.prediction = Cg / gamma_fn(F.theta) * static_cast<double>(x) * std::pow(lx, F.theta - 1.0);
    out.ratio = out.exact / out.prediction;
    return out;
}

SmoothSum smooth_weighted_sum(const MultiplicativeFunction& F, double y, double sigma2, const PrimeTable& table,
                              double n_cap, double tail_tol) {
    if (!(sigma2 > 0.0)) throw std::domain_error("smooth_weighted_sum: exponent must be > 0");
    if (!(n_cap >= 2.0) || n_cap > 1e18) throw std::domain_error("smooth_weighted_sum: n_cap outside [2, 1e18]");

    // enumerated partial sum over smooth n <= n_cap, with a node budget
    const std::uint64_t kNodeBudget = 80000000ULL;
    std::uint64_t visited = 0;
    Kahan acc;
    for_each_smooth(n_cap, y, table,
                    [&](std::uint64_t n, const std::vector<std::size_t>& pidx, const std::vector<std::uint32_t>& expo) {
                        if (++visited > kNodeBudget)
                            throw ResourceError("smooth_weighted_sum: enumeration exceeds node budget of " +
                                                std::to_string(kNodeBudget));
                        double gn = 1.0;
                        for (std::size_t i = 0; i < pidx.size(); ++i) gn *= F.g(table.primes()[pidx[i]], expo[i]);
                        acc.add(gn * std::pow(static_cast<double>(n), -sigma2));
                    });

    // Rankin tail bound: sum_{smooth n > N} g(n) n^{-sigma2} <= N^{-beta} prod_p L_p(sigma2 - beta)
    // with L_p(e) = sum_k g(p^k) p^{-ke}. The log of the bound is convex in
    // beta, so minimize by ternary search. Local series are truncated with a
    // rigorous geometric remainder using the declared sup |f|.
    std::size_t np = table.prime_count(y);
    double gsup = F.sup_abs_f * F.sup_abs_f;
    auto log_bound = [&](double beta) {
        double e = sigma2 - beta;
        double lp = -beta * std::log(n_cap);
        for (std::size_t i = 0; i < np; ++i) {
            std::uint64_t p = table.primes()[i];
            double step = std::pow(static_cast<double>(p), -e);
            double pw = 1.0, local = 1.0;
            std::uint32_t k = 1;
            for (; k <= 2000; ++k) {
                pw *= step;
                double gpk = F.g(p, k);
                if (gpk > gsup * (1.0 + 1e-12))
                    throw ModelError("smooth_weighted_sum: |f(p^k)| exceeds the declared sup bound");
                local += gpk * pw;
                if (gsup * pw * step / (1.0 - step) < 1e-16 * local) break;
            }
            local += gsup * pw * step / (1.0 - step);  // geometric remainder
            lp += std::log(local);
        }
        return lp;
    };
    double lo = 0.005 * sigma2, hi = 0.995 * sigma2;
    for (int it = 0; it < 60 && hi - lo > 1e-4 * sigma2; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (log_bound(m1) < log_bound(m2)) hi = m2; else lo = m1;
    }
    double best = std::exp(log_bound(0.5 * (lo + hi)));
    if (!(best < tail_tol)) {
        std::ostringstream msg;
        msg << "smooth_weighted_sum: tail bound " << best << " exceeds tolerance " << tail_tol
            << " (raise n_cap)";
        throw PrecisionError(msg.str());
    }
    return {acc.sum, best};
}

double log_smooth_weighted_product(const MultiplicativeFunction& F, double y, double sigma2,
                                   const PrimeTable& table) {
    if (!(sigma2 > 0.0)) throw std::domain_error("smooth_weighted_product: exponent must be > 0");
    std::size_t np = table.prime_count(y);
    Kahan log_acc;
    double gsup = F.sup_abs_f * F.sup_abs_f;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t p = table.primes()[i];
        double step = std::pow(static_cast<double>(p), -sigma2);
        double pw = 1.0, local = 1.0;
        for (std::uint32_t k = 1; k <= 400; ++k) {
            pw *= step;
            local += F.g(p, k) * pw;
            if (gsup * pw * step / (1.0 - step) < 1e-17 * local) break;
            if (k == 400) throw ModelError("smooth_weighted_product: local series at p did not converge");
        }
        log_acc.add(std::log(local));
    }
    return log_acc.sum;
}

double smooth_weighted_product(const MultiplicativeFunction& F, double y, double sigma2, const PrimeTable& table) {
    return std::exp(log_smooth_weighted_product(F, y, sigma2, table));
}

}  // namespace mclab
