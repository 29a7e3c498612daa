#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mclab/errors.hpp"
#include "mclab/primes.hpp"
#include "mclab/rng.hpp"

using namespace mclab;

namespace {

// trial-division sieve, the oracle
std::vector<std::uint64_t> primes_oracle(std::uint64_t limit) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 2; n <= limit; ++n) {
        bool prime = true;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) {
                prime = false;
                break;
            }
        if (prime) out.push_back(n);
    }
    return out;
}

}  // namespace

TEST_CASE("sieve matches trial division up to 10^4") {
    PrimeTable table(10000);
    CHECK(table.primes() == primes_oracle(10000));
    CHECK(table.prime_count(100) == 25);
    CHECK(table.prime_count(10000) == 1229);
    // spf is the least divisor
    for (std::uint64_t n = 2; n <= 10000; ++n) {
        std::uint64_t least = 0;
        for (std::uint64_t d = 2; d <= n; ++d)
            if (n % d == 0) {
                least = d;
                break;
            }
        REQUIRE(table.spf(n) == least);
    }
}

TEST_CASE("factor reconstructs n, exponents positive, primes ascending") {
    PrimeTable table(1 << 20);
    CounterRng rng(42);
    for (int i = 0; i < 10000; ++i) {
        std::uint64_t n = 1 + rng.next_u64() % ((1 << 20) - 1);
        auto fac = factor(n, table);
        std::uint64_t prod = 1;
        std::uint64_t prev = 0;
        for (auto [p, e] : fac) {
            CHECK(p > prev);
            CHECK(table.is_prime(p));
            CHECK(e >= 1);
            for (std::uint32_t j = 0; j < e; ++j) prod *= p;
            prev = p;
        }
        REQUIRE(prod == n);
        REQUIRE(factor_trial(n) == fac);
    }
    CHECK(factor(1, table).empty());
    CHECK(largest_prime_factor(1, table) == 1);
    CHECK(largest_prime_factor(2 * 3 * 5 * 7, table) == 7);
    CHECK(largest_prime_factor(1 << 16, table) == 2);
}

TEST_CASE("smooth numbers: frozen small case and filter oracle") {
    PrimeTable table(10000);
    CHECK(smooth_numbers(20, 3, table) ==
          std::vector<std::uint64_t>{1, 2, 3, 4, 6, 8, 9, 12, 16, 18});
    for (double y : {2.0, 7.0, 50.0, 9973.0}) {
        auto fast = smooth_numbers(10000, y, table);
        std::vector<std::uint64_t> slow;
        for (std::uint64_t n = 1; n <= 10000; ++n)
            if (largest_prime_factor(n, table) <= y) slow.push_back(n);
        REQUIRE(fast == slow);
    }
    // smoothness cutoff below 2 leaves only n = 1
    CHECK(smooth_numbers(100, 1.5, table) == std::vector<std::uint64_t>{1});
}

TEST_CASE("visitor carries the factorization") {
    PrimeTable table(1000);
    for_each_smooth(720.0, 10.0, table, [&](std::uint64_t n, const auto& pidx, const auto& expo) {
        std::uint64_t prod = 1;
        for (std::size_t i = 0; i < pidx.size(); ++i)
            for (std::uint32_t j = 0; j < expo[i]; ++j) prod *= table.primes()[pidx[i]];
        REQUIRE(prod == n);
    });
}

TEST_CASE("memory budget is enforced and named") {
    CHECK_THROWS_AS(PrimeTable(1 << 24, 1024), ResourceError);
    try {
        PrimeTable(1 << 24, 1024);
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("1024") != std::string::npos);
    }
}

TEST_CASE("counter rng basics") {
    // same (seed, counter) gives identical streams; disjoint seeds differ
    CounterRng a(7), b(7), c(8);
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
    // unit doubles stay in [0, 1)
    CounterRng d(123);
    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = d.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        mean += u;
    }
    mean /= 100000;
    CHECK(std::abs(mean - 0.5) < 4.0 * 0.2887 / std::sqrt(100000.0));
}
