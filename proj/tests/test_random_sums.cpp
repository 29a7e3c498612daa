#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "mclab/errors.hpp"
#include "mclab/random_sums.hpp"
#include "mclab/rng.hpp"
#include "mclab/stats.hpp"

using namespace mclab;
using cd = std::complex<double>;

namespace {

SteinhausPhases phases_for(std::uint64_t master, std::uint64_t r) { return SteinhausPhases(replicate_seed(master, r)); }

MultiplicativeFunction zero_family() {
    MultiplicativeFunction F;
    F.name = "zero";
    F.theta = 0.5;
    F.sup_abs_f = 0.0;
    F.rule = [](std::uint64_t, std::uint32_t) { return cd(0.0); };
    return F;
}

// complex two-step weight used to exercise non-symmetric kernels
StepWeight complex_step() { return StepWeight({0.4, 1.0}, {cd(1.0, 0.5), cd(-0.7, 0.0)}); }

double sum_g(const MultiplicativeFunction& F, std::uint64_t limit, const PrimeTable& table) {
    auto g = sieve_g_values(F, limit, table);
    Kahan acc;
    for (std::uint64_t n = 1; n <= limit; ++n) acc.add(g[n]);
    return acc.sum;
}

}  // namespace

TEST_CASE("forced phases recover the plain normalized sum") {
    PrimeTable table(100);
    auto F = divisor_family(1.0);
    AlphaFn one = [](std::uint64_t) { return cd(1.0); };

    auto s3 = partial_sum(one, F, 3.0, indicator_weight(), table);
    CHECK(std::abs(s3 - cd(std::sqrt(3.0))) < 1e-12);

    auto s10 = partial_sum(one, F, 10.0, indicator_weight(), table);
    CHECK(std::abs(s10 - cd(std::sqrt(10.0))) < 1e-12);

    // alternating phases on an explicit window
    AlphaFn alt = [](std::uint64_t n) { return cd(n % 2 ? 1.0 : -1.0); };
    auto sa = partial_sum(alt, F, 4.0, indicator_weight(), table);
    CHECK(std::abs(sa - cd((1.0 - 1.0 + 1.0 - 1.0) / 2.0)) < 1e-12);
}

TEST_CASE("unit window second moment is exactly one") {
    PrimeTable table(2000);
    CHECK(partial_sum_second_moment(two_squares_family(), 777.0, indicator_weight(), table) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(partial_sum_second_moment(divisor_family(0.7), 500.0, indicator_weight(), table) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sampled second moment matches the exact one") {
    PrimeTable table(1200);
    auto F = two_squares_family();
    auto phi = complex_step();
    double x = 1000.0;
    double exact = partial_sum_second_moment(F, x, phi, table);

    std::size_t n_mc = 6000;
    std::vector<double> samples;
    samples.reserve(n_mc);
    for (std::size_t r = 0; r < n_mc; ++r) {
        auto ph = phases_for(9101, r);
        samples.push_back(std::norm(partial_sum(ph, F, x, phi, table)));
    }
    auto ms = mean_se(samples);
    CHECK(std::fabs(ms.mean - exact) <= 3.0 * ms.se);
}

TEST_CASE("only n = 1 survives below the window scale") {
    PrimeTable table(100);
    auto ph = phases_for(5, 0);
    auto s = s_ty(ph, two_squares_family(), 1.5, 50.0, indicator_weight(), table);
    CHECK(std::abs(s - cd(1.0 / std::sqrt(1.5))) < 1e-14);
}

TEST_CASE("smooth sum second moment matches enumeration") {
    PrimeTable table(800);
    auto F = divisor_family(0.8);
    auto phi = complex_step();
    double t = 400.0, y = 7.0;

    // exact E|s|^2 = t^{-1} sum over smooth n of |f(n)|^2 |Phi(n/t)|^2
    Kahan exact;
    for (auto n : smooth_numbers(phi.support_end() * t, y, table))
        exact.add(std::norm(eval_f(F, n, table)) * std::norm(phi(static_cast<double>(n) / t)));
    double target = exact.sum / t;

    std::size_t n_mc = 5000;
    std::vector<double> samples;
    samples.reserve(n_mc);
    for (std::size_t r = 0; r < n_mc; ++r) {
        auto ph = phases_for(777, r);
        samples.push_back(std::norm(s_ty(ph, F, t, y, phi, table)));
    }
    auto ms = mean_se(samples);
    CHECK(std::fabs(ms.mean - target) <= 3.0 * ms.se);
}

TEST_CASE("high cutoff removes the smoothness restriction") {
    PrimeTable table(800);
    auto F = two_squares_family();
    auto ph = phases_for(5, 1);
    double t = 300.5;

    auto restricted = s_ty(ph, F, t, t, indicator_weight(), table);

    auto f = sieve_f_values(F, 300, table);
    cd direct = 0.0;
    for (std::uint64_t n = 1; n <= 300; ++n) direct += ph.at(n, table) * f[n];
    direct /= std::sqrt(t);
    CHECK(std::abs(restricted - direct) < 1e-12);
}

TEST_CASE("truncation layout pins interval count and threshold") {
    TruncationScheme scheme(0.2, 0.3);

    auto lay = truncation_layout(scheme, 200.0, 1.0);
    CHECK(lay.K == 2);
    REQUIRE(lay.edges.size() == 4);
    CHECK(lay.x_k(0) == doctest::Approx(std::pow(200.0, 0.2)).epsilon(1e-14));
    CHECK(lay.x_k(3) == doctest::Approx(std::pow(200.0, 1.1)).epsilon(1e-14));
    CHECK(lay.floor_formula_holds);
    CHECK(lay.floor_threshold_x == 1.0);

    // widening the window pushes K past the floor value until x crosses A^{10}
    auto wide_low = truncation_layout(scheme, 1000.0, 2.0);
    CHECK(wide_low.K == 3);
    CHECK_FALSE(wide_low.floor_formula_holds);
    CHECK(wide_low.floor_threshold_x == doctest::Approx(1024.0).epsilon(1e-12));
    auto wide_high = truncation_layout(scheme, 2000.0, 2.0);
    CHECK(wide_high.K == 2);
    CHECK(wide_high.floor_formula_holds);

    CHECK_THROWS_AS(TruncationScheme(0.0, 0.3), std::domain_error);
    CHECK_THROWS_AS(TruncationScheme(0.2, 1.0), std::domain_error);
    CHECK_THROWS_AS(truncation_layout(scheme, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(truncation_layout(scheme, 200.0, 0.0), std::domain_error);
}

TEST_CASE("truncated sum matches the direct classification") {
    PrimeTable table(1000);
    auto F = two_squares_family();
    auto phi = indicator_weight();
    TruncationScheme scheme(0.2, 0.3);
    double x = 200.0;
    auto ph = phases_for(7001, 0);

    auto ts = truncated_sum(ph, F, x, phi, scheme, table);
    REQUIRE(ts.layout.K == 2);

    // classify n <= x directly by its largest prime factor
    auto f = sieve_f_values(F, 200, table);
    cd captured = 0.0;
    cd discarded = f[1] * phi(1.0 / x);
    for (std::uint64_t n = 2; n <= 200; ++n) {
        cd term = ph.at(n, table) * f[n] * phi(static_cast<double>(n) / x);
        std::uint64_t p = largest_prime_factor(n, table);
        std::uint64_t m = n / p;
        int k = -1;
        for (int j = 0; j <= ts.layout.K; ++j)
            if (static_cast<double>(p) > ts.layout.x_k(j) && static_cast<double>(p) <= ts.layout.x_k(j + 1)) k = j;
        bool smooth_rest =
            k >= 0 && (m == 1 || static_cast<double>(largest_prime_factor(m, table)) <= ts.layout.x_k(k));
        if (smooth_rest)
            captured += term;
        else
            discarded += term;
    }
    double norm = sum_g(F, 200, table);
    captured /= std::sqrt(norm);
    discarded /= std::sqrt(norm);

    CHECK(std::abs(ts.total - captured) < 1e-12);

    // the pieces recompose the plain partial sum
    auto full = partial_sum(ph, F, x, phi, table);
    CHECK(std::abs(ts.total + discarded - full) < 1e-12);

    // per-prime contributions add back to the total and vanish past the window
    cd z_sum = 0.0;
    for (std::size_t i = 0; i < ts.primes.size(); ++i) {
        z_sum += ts.z_per_prime[i];
        if (static_cast<double>(ts.primes[i]) > x) CHECK(std::abs(ts.z_per_prime[i]) == 0.0);
    }
    CHECK(std::abs(z_sum - ts.total) < 1e-12);
    CHECK(static_cast<double>(ts.primes.back()) > x);  // the last interval reaches past the window

    // a window ending below n = 1 leaves nothing
    StepWeight tiny({0.004}, {cd(1.0)});
    auto empty = truncated_sum(ph, F, x, tiny, scheme, table);
    CHECK(std::abs(empty.total) == 0.0);
    for (auto z : empty.z_per_prime) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("bracket equals the squared per-prime contributions") {
    PrimeTable table(1000);
    auto F = two_squares_family();
    auto phi = complex_step();
    TruncationScheme scheme(0.2, 0.3);
    double x = 200.0;
    auto ph = phases_for(7001, 3);

    auto ts = truncated_sum(ph, F, x, phi, scheme, table);
    auto br = bracket_T(ph, F, x, phi, scheme, table);

    Kahan sq;
    for (auto z : ts.z_per_prime) sq.add(std::norm(z));
    CHECK(br.total == doctest::Approx(sq.sum).epsilon(1e-12));

    Kahan per;
    for (auto v : br.per_k) per.add(v);
    CHECK(br.total == doctest::Approx(per.sum).epsilon(1e-14));

    // zero heights kill every bracket
    StepWeight dead({1.0}, {cd(0.0)});
    auto none = bracket_T(ph, F, x, dead, scheme, table);
    CHECK(none.total == 0.0);
}

TEST_CASE("bracket of a tiny window is computable by hand") {
    PrimeTable table(100);
    auto F = divisor_family(1.0);
    TruncationScheme scheme(0.4, 0.5);
    auto ph = phases_for(424242, 0);

    auto br = bracket_T(ph, F, 9.0, indicator_weight(), scheme, table);
    REQUIRE(br.layout.K == 1);

    // surviving terms: p = 3 pairs with m in {1, 2}, p in {5, 7} with m = 1
    cd w3 = 1.0 + ph.at_prime(2);
    double expected = (std::norm(w3) + 2.0) / 9.0;
    CHECK(br.per_k[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK(br.per_k[1] == 0.0);
    CHECK(br.total == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("bracket intervals match the rescaled smooth sums") {
    PrimeTable table(1000);
    auto F = two_squares_family();
    auto phi = complex_step();
    TruncationScheme scheme(0.2, 0.3);
    double x = 200.0;
    auto ph = phases_for(31415, 0);

    auto br = bracket_T(ph, F, x, phi, scheme, table);
    double norm = sum_g(F, 200, table);

    for (int k = 0; k <= br.layout.K; ++k) {
        double lo = br.layout.x_k(k);
        double hi = std::min(br.layout.x_k(k + 1), static_cast<double>(table.limit()));
        Kahan acc;
        for (std::size_t i = table.prime_count(lo); i < table.prime_count(hi); ++i) {
            std::uint64_t p = table.primes()[i];
            auto s = s_ty(ph, F, x / static_cast<double>(p), lo, phi, table);
            acc.add(F.g(p, 1) / static_cast<double>(p) * std::norm(s));
        }
        double rescaled = x / norm * acc.sum;
        CHECK(std::fabs(br.per_k[static_cast<std::size_t>(k)] - rescaled) <=
              1e-10 * std::max(1.0, std::fabs(rescaled)));
    }
}

TEST_CASE("variance estimator is deterministic when f vanishes") {
    PrimeTable table(200);
    auto F = zero_family();
    auto grid = Grid::over(-40.0, 40.0, 0.01);

    auto a = v_infty_estimator(phases_for(1, 0), F, 20.0, 1.0, indicator_weight(), grid, table);
    auto b = v_infty_estimator(phases_for(2, 0), F, 20.0, 1.0, indicator_weight(), grid, table);
    CHECK(a.value == b.value);
    CHECK(std::fabs(a.value - 1.0) < 1e-3);
    CHECK(a.grid_part > 0.9);
    CHECK(a.tail_correction > 0.0);

    // complex heights need a longer grid to pass the tail gate
    auto phi = complex_step();
    auto wide = Grid::over(-160.0, 160.0, 0.01);
    auto c = v_infty_estimator(phases_for(1, 0), F, 20.0, 1.0, phi, wide, table);
    CHECK(std::fabs(c.value - phi.l2_norm_sq()) < 1e-3);
}

TEST_CASE("variance estimator scales with the squared height") {
    PrimeTable table(200);
    auto F = two_squares_family();
    auto grid = Grid::over(-40.0, 40.0, 0.01);
    auto ph = phases_for(606, 0);

    auto base = v_infty_estimator(ph, F, 20.0, 1.0, indicator_weight(), grid, table);
    cd c(0.3, -0.4);
    StepWeight scaled({1.0}, {c});
    auto boosted = v_infty_estimator(ph, F, 20.0, 1.0, scaled, grid, table);
    CHECK(boosted.value == doctest::Approx(std::norm(c) * base.value).epsilon(1e-12));
}

TEST_CASE("variance estimator is unbiased over replicates") {
    PrimeTable table(200);
    auto F = two_squares_family();
    auto grid = Grid::over(-40.0, 40.0, 0.01);
    double reference = v_infty_estimator(phases_for(1, 0), zero_family(), 20.0, 1.0, indicator_weight(), grid, table).value;

    std::size_t n_mc = 250;
    std::vector<double> samples;
    samples.reserve(n_mc);
    for (std::size_t r = 0; r < n_mc; ++r)
        samples.push_back(v_infty_estimator(phases_for(3131, r), F, 20.0, 1.0, indicator_weight(), grid, table).value);
    auto ms = mean_se(samples);
    CHECK(std::fabs(ms.mean - reference) <= 3.0 * ms.se);
}

TEST_CASE("variance estimator rejects unusable grids") {
    PrimeTable table(200);
    auto F = two_squares_family();
    auto ph = phases_for(1, 0);

    CHECK_THROWS_AS(v_infty_estimator(ph, F, 20.0, 1.0, indicator_weight(), Grid::over(-2.0, 2.0, 0.01), table),
                    PrecisionError);
    CHECK_THROWS_AS(v_infty_estimator(ph, F, 20.0, 1.0, indicator_weight(), Grid::over(-1.0, 3.0, 0.01), table),
                    std::domain_error);
    CHECK_THROWS_AS(v_infty_estimator(ph, F, 20.0, 0.0, indicator_weight(), Grid::over(-40.0, 40.0, 0.01), table),
                    std::domain_error);
}

TEST_CASE("fourth moments shrink as the window grows") {
    PrimeTable big(26000);
    auto F = two_squares_family();
    auto phi = indicator_weight();
    TruncationScheme scheme(0.2, 0.3);

    auto small_x = lindeberg_fourth(F, 1000.0, phi, scheme, big, 300, 2718);
    auto large_x = lindeberg_fourth(F, 10000.0, phi, scheme, big, 300, 2718);
    CHECK(small_x.mean - large_x.mean > 2.0 * std::hypot(small_x.se, large_x.se));

    auto again = lindeberg_fourth(F, 1000.0, phi, scheme, big, 300, 2718);
    CHECK(again.mean == small_x.mean);

    StepWeight dead({1.0}, {cd(0.0)});
    auto none = lindeberg_fourth(F, 1000.0, dead, scheme, big, 8, 1);
    CHECK(none.mean == 0.0);
    CHECK(none.se == 0.0);
}
