#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "mclab/special_functions.hpp"
#include "mclab/steinhaus.hpp"

using namespace mclab;

namespace {

// (1/2pi) integral_0^{2pi} f(t) dt by composite Simpson
template <typename Fn>
double circle_average(Fn&& f, int panels = 20000) {
    double h = 2.0 * std::numbers::pi / panels;
    double acc = f(0.0) + f(2.0 * std::numbers::pi);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0 / (2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("phases are deterministic unit-modulus functions of (seed, p)") {
    SteinhausPhases a(42), b(42), c(43);
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 101ULL, 99991ULL}) {
        CHECK(a.angle(p) == b.angle(p));
        CHECK(std::abs(a.at_prime(p)) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(a.angle(2) != c.angle(2));
    CHECK(a.angle(2) != a.angle(3));
}

TEST_CASE("phase angles fill the circle evenly") {
    PrimeTable table(100000);
    SteinhausPhases ph(7);
    // mean of alpha(p) over many primes should be ~ N^{-1/2}
    std::complex<double> acc = 0.0;
    std::size_t np = table.primes().size();
    for (std::size_t i = 0; i < np; ++i) acc += ph.at_prime(table.primes()[i]);
    CHECK(std::abs(acc) / static_cast<double>(np) < 4.0 / std::sqrt(static_cast<double>(np)));
}

TEST_CASE("complete multiplicativity") {
    PrimeTable table(1000);
    SteinhausPhases ph(11);
    auto a2 = ph.at_prime(2), a3 = ph.at_prime(3), a5 = ph.at_prime(5);
    CHECK(std::abs(ph.at(12, table) - a2 * a2 * a3) < 1e-12);
    CHECK(std::abs(ph.at(360, table) - a2 * a2 * a2 * a3 * a3 * a5) < 1e-12);
    CHECK(std::abs(ph.at(1, table) - std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("pair correlation vanishes off the diagonal") {
    PrimeTable table(200);
    const int N = 4000;
    double bound = 4.0 / std::sqrt(static_cast<double>(N));
    for (auto [n, m] : {std::pair<std::uint64_t, std::uint64_t>{2, 3},
                        {6, 10},
                        {12, 18},
                        {1, 2},
                        {30, 36}}) {
        auto est = pair_correlation_estimate(n, m, 12345, N, table);
        CHECK(std::abs(est) < bound);
    }
    for (std::uint64_t n : {1ULL, 7ULL, 60ULL}) {
        auto diag = pair_correlation_estimate(n, n, 999, 50, table);
        CHECK(std::abs(diag - std::complex<double>(1.0, 0.0)) < 1e-12);
    }
}

TEST_CASE("tilt mgf equals the bessel value") {
    for (double kappa : {0.0, 0.3, 1.0, 2.5}) {
        std::complex<double> a = std::polar(kappa, 0.6);
        double quad = circle_average([&](double t) { return std::exp(kappa * std::cos(t)); });
        CHECK(circle_tilt_mgf(a) == doctest::Approx(quad).epsilon(1e-10));

        // Monte Carlo cross-check
        CounterRng rng(hash_pair(5, static_cast<std::uint64_t>(kappa * 100)));
        const int N = 20000;
        double acc = 0.0, acc2 = 0.0;
        for (int i = 0; i < N; ++i) {
            double v = std::exp(kappa * std::cos(rng.next_angle()));
            acc += v;
            acc2 += v * v;
        }
        double mean = acc / N;
        double se = std::sqrt(std::max(acc2 / N - mean * mean, 0.0) / N);
        CHECK(std::fabs(mean - circle_tilt_mgf(a)) < 4.0 * se + 1e-12);
    }
}

TEST_CASE("tilted pair: marginals and coupling probability") {
    const int N = 60000;
    for (std::complex<double> a : {std::complex<double>(0.5, 0.0), std::polar(1.5, 2.0), std::polar(0.1, -1.0)}) {
        double kappa = std::abs(a);
        CounterRng rng(hash_pair(77, static_cast<std::uint64_t>(kappa * 1e6)));
        std::complex<double> mean_u = 0.0, mean_t = 0.0;
        double moved = 0.0, dist = 0.0, dist2 = 0.0;
        for (int i = 0; i < N; ++i) {
            auto cp = sample_tilted_pair(a, rng);
            CHECK(std::abs(std::abs(cp.u) - 1.0) < 1e-12);
            CHECK(std::abs(std::abs(cp.u_tilted) - 1.0) < 1e-12);
            mean_u += cp.u;
            mean_t += cp.u_tilted;
            moved += cp.moved ? 1.0 : 0.0;
            double d = std::abs(cp.u_tilted - cp.u);
            dist += d;
            dist2 += d * d;
            if (!cp.moved) CHECK(cp.u == cp.u_tilted);
        }
        mean_u /= N;
        mean_t /= N;
        moved /= N;
        dist /= N;
        dist2 /= N;
        double se = 1.0 / std::sqrt(static_cast<double>(N));

        // uniform marginal is centered
        CHECK(std::abs(mean_u) < 4.0 * se);
        // tilted marginal has mean (I1/I0)(kappa) in the tilt direction
        std::complex<double> want = tilted_mean_length(kappa) * (a / kappa);
        CHECK(std::abs(mean_t - want) < 4.0 * se);
        // split frequency matches the total variation distance
        CHECK(std::fabs(moved - tilt_total_variation(kappa)) < 4.0 * se);
        // displacement bounds
        CHECK(dist <= 2.5 * kappa + 4.0 * se);
        CHECK(dist2 <= 2.0 * dist + 4.0 * se);
    }
}

TEST_CASE("moved draws follow the excess density") {
    // second circular moment of the tilted law is I2/I0; verify through the
    // mixture decomposition using only moved draws
    std::complex<double> a(1.2, 0.0);
    double kappa = std::abs(a);
    double i0 = bessel_i0(kappa);
    const int N = 80000;
    CounterRng rng(4242);
    std::complex<double> acc = 0.0;
    int nmoved = 0;
    for (int i = 0; i < N; ++i) {
        auto cp = sample_tilted_pair(a, rng);
        if (cp.moved) {
            acc += cp.u_tilted;
            ++nmoved;
        }
    }
    REQUIRE(nmoved > 500);
    std::complex<double> sample_mean = acc / static_cast<double>(nmoved);
    // quadrature of the normalized excess density (ratio - 1)_+ / TV
    double tv = tilt_total_variation(kappa);
    double mean_excess = circle_average([&](double t) {
        double ex = std::exp(kappa * std::cos(t)) / i0 - 1.0;
        return ex > 0.0 ? std::cos(t) * ex : 0.0;
    }) / tv;
    CHECK(std::fabs(sample_mean.real() - mean_excess) < 5.0 / std::sqrt(static_cast<double>(nmoved)));
    CHECK(std::fabs(sample_mean.imag()) < 5.0 / std::sqrt(static_cast<double>(nmoved)));
}

TEST_CASE("tilt preconditions") {
    CHECK_THROWS_AS(tilted_mean_length(-0.1), std::domain_error);
    CHECK_THROWS_AS(tilt_total_variation(-1.0), std::domain_error);
    CHECK(tilt_total_variation(0.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(tilted_mean_length(0.0) == 0.0);
    PrimeTable table(100);
    CHECK_THROWS_AS(pair_correlation_estimate(2, 3, 1, 0, table), std::domain_error);
}
