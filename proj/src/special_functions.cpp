#include "mclab/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mclab {

namespace {

// Lanczos coefficients for g = 7.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

double lanczos_core(double x) {
    // valid for x >= 0.5
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (x - 1.0 + i);
    double t = x + 6.5;  // x - 1 + g + 0.5
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x - 0.5) * std::exp(-t) * acc;
}

// E1(r) by the Lentz continued fraction, r > 0.
double exp_e1_cf(double r) {
    const double tiny = 1e-300;
    double b = r + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-r);
}

}  // namespace

double gamma_fn(double x) {
    if (std::isnan(x)) throw std::domain_error("gamma_fn: nan argument");
    if (x <= 0.0 && x == std::floor(x)) throw std::domain_error("gamma_fn: nonpositive integer argument");
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_core(1.0 - x));
    }
    return lanczos_core(x);
}

double log_gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma_fn: argument must be positive");
    if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma_fn(1.0 - x);
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (x - 1.0 + i);
    double t = x + 6.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t + std::log(acc);
}

double bessel_i0(double x) {
    double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 500; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-16 * sum) return sum;
    }
    throw std::domain_error("bessel_i0: series did not converge (argument too large)");
}

double bessel_i1(double x) {
    double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + 1.0));
        sum += term;
        if (term < 1e-16 * sum) return 0.5 * x * sum;
    }
    throw std::domain_error("bessel_i1: series did not converge (argument too large)");
}

double one_minus_exp_integral(double r) {
    if (!(r >= 0.0)) throw std::domain_error("one_minus_exp_integral: r must be >= 0");
    if (r == 0.0) return 0.0;
    if (r <= 12.0) {
        // sum_{k>=1} (-1)^{k+1} r^k / (k * k!)
        double term = 1.0, sum = 0.0;
        for (int k = 1; k <= 200; ++k) {
            term *= r / k;  // r^k / k!
            double contrib = term / k;
            sum += (k % 2 == 1) ? contrib : -contrib;
            if (contrib < 1e-17 * std::fabs(sum) + 1e-300) break;
        }
        return sum;
    }
    return kEulerGamma + std::log(r) + exp_e1_cf(r);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace mclab
