#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mclab/special_functions.hpp"

using namespace mclab;

namespace {

// quadrature oracle: I0(x) = (1/pi) integral_0^pi e^{x cos t} dt
double i0_quadrature(double x) {
    const int n = 20000;
    double h = std::numbers::pi / n;
    double acc = std::exp(x) + std::exp(-x);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * std::exp(x * std::cos(i * h));
    return acc * h / 3.0 / std::numbers::pi;
}

// quadrature oracle: I1(x) = (1/pi) integral_0^pi e^{x cos t} cos t dt
double i1_quadrature(double x) {
    const int n = 20000;
    double h = std::numbers::pi / n;
    double acc = std::exp(x) - std::exp(-x);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * std::exp(x * std::cos(i * h)) * std::cos(i * h);
    return acc * h / 3.0 / std::numbers::pi;
}

// quadrature oracle for integral_0^r (1 - e^{-s})/s ds (integrand extended by 1 at s = 0)
double ome_quadrature(double r) {
    const int n = 40000;
    double h = r / n;
    auto f = [](double s) { return s == 0.0 ? 1.0 : (1.0 - std::exp(-s)) / s; };
    double acc = f(0.0) + f(r);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("gamma closed forms") {
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_fn(2.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(gamma_fn(4.0) == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(gamma_fn(0.3) * gamma_fn(0.7) ==
          doctest::Approx(std::numbers::pi / std::sin(0.3 * std::numbers::pi)).epsilon(1e-12));
    // functional equation on a grid
    for (double x = 0.1; x < 5.0; x += 0.137)
        CHECK(gamma_fn(x + 1.0) == doctest::Approx(x * gamma_fn(x)).epsilon(1e-12));
}

TEST_CASE("gamma matches libm") {
    for (double x = 0.05; x <= 30.0; x += 0.09) {
        CHECK(gamma_fn(x) == doctest::Approx(std::tgamma(x)).epsilon(5e-13));
        CHECK(log_gamma_fn(x) == doctest::Approx(std::lgamma(x)).epsilon(5e-12));
    }
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), std::domain_error);
}

TEST_CASE("bessel I0/I1 against quadrature oracle") {
    for (double x : {0.0, 0.1, 0.5, 1.0, std::numbers::sqrt2, 2.0, 4.0, 10.0}) {
        CHECK(bessel_i0(x) == doctest::Approx(i0_quadrature(x)).epsilon(1e-11));
        CHECK(bessel_i1(x) == doctest::Approx(i1_quadrature(x)).epsilon(1e-10));
    }
    // frozen reference points
    CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-12));
    CHECK(bessel_i0(std::numbers::sqrt2) == doctest::Approx(1.5660829297563505).epsilon(1e-11));
    CHECK(bessel_i1(0.5) / bessel_i0(0.5) == doctest::Approx(0.24249961258080195).epsilon(1e-9));
}

TEST_CASE("one_minus_exp_integral") {
    CHECK(one_minus_exp_integral(0.0) == 0.0);
    for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 11.0}) {
        CHECK(one_minus_exp_integral(r) == doctest::Approx(ome_quadrature(r)).epsilon(1e-11));
    }
    // the two evaluation routes agree across the switch at r = 12
    CHECK(one_minus_exp_integral(12.0) == doctest::Approx(one_minus_exp_integral(12.0 + 1e-12)).epsilon(5e-12));
    // frozen points in the continued-fraction region
    CHECK(one_minus_exp_integral(13.0) == doctest::Approx(3.1421651845496915).epsilon(1e-12));
    CHECK(one_minus_exp_integral(18.0) == doctest::Approx(3.4675874236013066).epsilon(1e-12));
    CHECK(one_minus_exp_integral(25.0) == doctest::Approx(3.7960914897702685).epsilon(1e-12));
    // large r: integral ~ gamma + log r
    CHECK(one_minus_exp_integral(25.0) == doctest::Approx(kEulerGamma + std::log(25.0)).epsilon(1e-10));
    CHECK_THROWS_AS(one_minus_exp_integral(-1.0), std::domain_error);
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
}
