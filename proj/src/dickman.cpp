#include "mclab/dickman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mclab/errors.hpp"
#include "mclab/special_functions.hpp"

namespace mclab {

DickmanTable::DickmanTable(double theta, double t_max, double h) : theta_(theta), t_max_(t_max), h_(h) {
    if (!(theta > 0.0) || theta > 1.0) throw std::domain_error("DickmanTable: theta must lie in (0, 1]");
    if (!(h > 0.0) || h > 1e-3) throw std::domain_error("DickmanTable: step h must lie in (0, 1e-3]");
    double steps_per_unit = 1.0 / h;
    long m1 = std::lround(steps_per_unit);
    if (std::fabs(steps_per_unit - m1) > 1e-9 * steps_per_unit || m1 % 2 != 0)
        throw std::domain_error("DickmanTable: 1/h must be an even integer");
    if (!(t_max > 1.0)) throw std::domain_error("DickmanTable: t_max must exceed 1");
    if (t_max > 120.0) throw ResourceError("DickmanTable: t_max above the positivity budget of 120");

    inv_gamma_theta_ = 1.0 / gamma_fn(theta);
    inv_gamma_theta1_ = 1.0 / gamma_fn(theta + 1.0);

    std::size_t M = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));
    values_.resize(M);
    std::size_t M1 = static_cast<std::size_t>(m1);  // index of t = 1 is M1 - 1
    for (std::size_t j = 0; j < std::min(M1, M); ++j) {
        double t = (j + 1) * h;
        values_[j] = std::pow(t, theta - 1.0) * inv_gamma_theta_;
    }

    // slide the window integral W = integral_{t-1}^{t} rho forward one step
    // at a time; pieces below t = 1 use the exact closed form
    long double W = inv_gamma_theta1_;  // integral_0^1 rho

    // recompute W from the stored values (all-positive trapezoid sum, plus
    // the exact sub-1 part while the window still crosses t = 1)
    auto window_trapz = [&](std::size_t j) {
        double t = (j + 1) * h;
        double lo = t - 1.0;
        long double acc = 0.0L;
        std::size_t start;
        if (lo <= 1.0 + 1e-12) {
            acc = (1.0 - std::pow(lo, theta)) * (long double)inv_gamma_theta1_;
            start = M1 - 1;
        } else {
            start = j - M1;
        }
        for (std::size_t i = start; i < j; ++i) acc += 0.5L * h * (values_[i] + values_[i + 1]);
        return acc;
    };

    for (std::size_t j = M1; j < M; ++j) {
        double t = (j + 1) * h;
        // subtract integral over [t-1-h, t-1]
        double u1 = t - 1.0;
        long double left;
        if (u1 <= 1.0 + 1e-12) {
            double u0 = u1 - h;
            left = (std::pow(u1, theta) - std::pow(std::max(u0, 0.0), theta)) * (long double)inv_gamma_theta1_;
        } else {
            left = 0.5L * h * (values_[j - M1 - 1] + values_[j - M1]);
        }
        // add integral over [t-h, t] by an implicit trapezoid step
        double prev = values_[j - 1];
        double rho_j = theta * (double)(W - left + 0.5L * h * prev) / (t - 0.5 * theta * h);
        values_[j] = rho_j;
        W = W - left + 0.5L * h * (prev + rho_j);
        if (!(values_[j] > 0.0)) throw PrecisionError("DickmanTable: value underflowed to nonpositive at t = " + std::to_string(t));
        // the sliding add/subtract leaves absolute rounding debris of order
        // eps * max W, which would swamp W once rho has decayed by ~17 digits;
        // a periodic fresh sum keeps the error relative to the current scale
        if ((j - M1) % M1 == M1 - 1) W = window_trapz(j);
    }
}

double DickmanTable::rho(double t) const {
    if (!(t > 0.0)) throw std::domain_error("DickmanTable::rho: t must be positive");
    if (t <= 1.0) return std::pow(t, theta_ - 1.0) * inv_gamma_theta_;
    if (t > t_max_) return 0.0;
    double x = t / h_ - 1.0;  // grid index space
    std::size_t j = static_cast<std::size_t>(x);
    if (j + 1 >= values_.size()) return values_.back();
    double w = x - j;
    return values_[j] * (1.0 - w) + values_[j + 1] * w;
}

double DickmanTable::head_integral(double a) const {
    if (!(a >= 0.0 && a <= 1.0)) throw std::domain_error("DickmanTable::head_integral: a must lie in [0, 1]");
    return std::pow(a, theta_) * inv_gamma_theta1_;
}

double DickmanTable::max_delay_residual(std::size_t stride) const {
    if (stride == 0) stride = 1;
    std::size_t M1 = static_cast<std::size_t>(std::lround(1.0 / h_));
    std::size_t j_first = static_cast<std::size_t>(std::ceil(2.25 / h_ - 1e-9)) - 1;  // first window clear of the kink
    double worst = 0.0;
    for (std::size_t j = std::max(M1, j_first); j < values_.size(); j += stride) {
        double t = (j + 1) * h_;
        // composite Simpson re-quadrature of integral_{t-1}^{t} rho on the
        // grid; the window spans exactly M1 subintervals and M1 is even
        std::size_t s = j - M1;
        double acc = 0.0;
        for (std::size_t i = 0; i + 2 <= M1; i += 2)
            acc += h_ / 3.0 * (values_[s + i] + 4.0 * values_[s + i + 1] + values_[s + i + 2]);
        double residual = std::fabs(t * values_[j] - theta_ * acc);
        worst = std::max(worst, residual);
    }
    return worst;
}

DickmanLaplace dickman_laplace(double theta, double r, double h, double t_max) {
    if (!(theta > 0.0) || theta > 1.0) throw std::domain_error("dickman_laplace: theta must lie in (0, 1]");
    if (!(r >= 0.0)) throw std::domain_error("dickman_laplace: r must be >= 0");
    if (r > 25.0) throw std::domain_error("dickman_laplace: r above the supported range [0, 25]");

    DickmanTable table(theta, t_max, h);

    // head: integral_0^1 e^{-rv} v^{theta-1} dv / Gamma(theta)
    //     = sum_k (-r)^k / (k! (theta+k)) / Gamma(theta), in extended precision
    long double term = 1.0L, head = 0.0L;
    for (int k = 0; k <= 400; ++k) {
        if (k > 0) term *= -(long double)r / k;
        long double contrib = term / (theta + k);
        head += contrib;
        if (std::fabs((double)contrib) < 1e-19 * std::fabs((double)head) + 1e-300 && k > (int)r) break;
    }
    double lhs = (double)head / gamma_fn(theta);

    // grid part: trapezoid of e^{-rv} rho(v) over [1, t_max]
    const auto& vals = table.values();
    std::size_t M1 = static_cast<std::size_t>(std::lround(1.0 / h));
    long double acc = 0.0L;
    for (std::size_t j = M1 - 1; j + 1 < vals.size(); ++j) {
        double v0 = (j + 1) * h, v1 = (j + 2) * h;
        acc += 0.5L * h * (std::exp(-r * v0) * vals[j] + std::exp(-r * v1) * vals[j + 1]);
    }
    lhs += (double)acc;

    // tail beyond t_max: rho(t) <= rho(T) (theta/T)^{floor(t-T)} gives
    // integral_T^inf e^{-rv} rho <= e^{-rT} rho(T) T/(T-theta)
    double rho_T = vals.back();
    double tail = std::exp(-r * t_max) * rho_T * t_max / (t_max - theta);

    DickmanLaplace out;
    out.lhs = lhs;
    out.lhs_tail_bound = tail;
    out.rhs = std::exp(theta * kEulerGamma - theta * one_minus_exp_integral(r));
    return out;
}

namespace {

// integral_0^{v0} rho_theta(v) * w(v) dv where w(v) = sum_j w_j v^j converges
// on [0, v0]; resolves the v^{theta-1} endpoint singularity exactly.
// Returns sum_j w_j v0^{theta+j} / (theta+j) / Gamma(theta).
template <typename CoeffFn>
double singular_head(double theta, double v0, CoeffFn&& coeff) {
    double acc = 0.0, pw = std::pow(v0, theta);
    for (int j = 0; j <= 600; ++j) {
        double c = coeff(j);
        double contrib = c * pw / (theta + j);
        acc += contrib;
        pw *= v0;
        if (std::fabs(contrib) < 1e-17 * std::fabs(acc) + 1e-300 && j > 3) break;
        if (j == 600) throw PrecisionError("singular_head: weight series did not converge");
    }
    return acc / gamma_fn(theta);
}

// composite Simpson of f over [a, b] with about `target` panels (rounded up to even)
template <typename Fn>
double simpson(double a, double b, int target, Fn&& f) {
    if (b <= a) return 0.0;
    int n = std::max(2, target + (target % 2));
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
}

}  // namespace

TruncationConstants c_eps_delta(double theta, double eps, double delta) {
    if (!(theta > 0.0) || theta > 1.0) throw std::domain_error("c_eps_delta: theta must lie in (0, 1]");
    if (!(eps > 0.0 && delta > 0.0 && eps + delta < 1.0))
        throw std::domain_error("c_eps_delta: need eps > 0, delta > 0, eps + delta < 1");

    double vmax = (1.0 - eps) / eps;
    DickmanTable table(theta, std::max(2.0, vmax) + 1.0, 5e-4);
    double gamma_theta1 = gamma_fn(theta + 1.0);

    TruncationConstants out;
    out.K = static_cast<int>(std::floor((1.0 - eps) / delta + 1e-12));
    for (int k = 0; k <= out.K; ++k) {
        double a = eps + k * delta;
        double v_hi = std::max((1.0 - a) / a, 0.0);
        double v_lo = std::max((1.0 - (a + delta)) / a, 0.0);
        double val = 0.0;
        if (v_hi > v_lo) {
            double v0 = v_lo;
            if (v_lo == 0.0) {
                // singular start: expand (1 - a v)^{-1} = sum_j (a v)^j;
                // needs a*v0 < 1 for the series and v0 <= 1 for the closed form
                v0 = std::min({0.5 / std::max(a, 1e-9), 0.25 * (v_hi - v_lo), 1.0});
                double apw = 1.0;
                val += singular_head(theta, v0, [&](int) {
                    double c = apw;
                    apw *= a;
                    return c;
                });
            }
            val += simpson(v0, v_hi, 400, [&](double v) { return table.rho(v) / (1.0 - a * v); });
            val *= gamma_theta1 * std::pow(a, theta);
        }
        out.per_k.push_back(val);
        out.total += val;
    }
    return out;
}

double c_eps_limit(double theta, double eps) {
    if (!(theta > 0.0) || theta > 1.0) throw std::domain_error("c_eps_limit: theta must lie in (0, 1]");
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("c_eps_limit: eps must lie in (0, 1)");
    double vmax = 1.0 / eps - 1.0;
    if (vmax <= 0.0) return 0.0;
    DickmanTable table(theta, std::max(2.0, vmax) + 1.0, 5e-4);

    // singular start with (1+v)^{-theta} = sum_j binom(-theta, j) v^j
    double v0 = std::min(0.25, 0.5 * vmax);
    double coeff = 1.0;
    double head = singular_head(theta, v0, [&](int j) {
        double c = coeff;
        coeff *= -(theta + j) / (j + 1.0);  // binom(-theta, j+1) from binom(-theta, j)
        return c;
    });
    double body = simpson(v0, vmax, static_cast<int>(std::max(800.0, 200.0 * vmax)),
                          [&](double v) { return table.rho(v) * std::pow(1.0 + v, -theta); });
    return gamma_fn(theta + 1.0) * (head + body);
}

}  // namespace mclab
