#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace mclab {

// Sieve tables shared by everything that touches integers: the ascending
// prime list up to `limit` and the smallest prime factor of every n <= limit.
class PrimeTable {
  public:
    // Default memory budget for the spf array (bytes). 2^31 covers limits
    // up to ~5.3e8 with 4-byte entries, far beyond desk scale.
    static constexpr std::uint64_t kDefaultBudgetBytes = 2147483648ULL;

    explicit PrimeTable(std::uint64_t limit, std::uint64_t budget_bytes = kDefaultBudgetBytes);

    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint64_t>& primes() const { return primes_; }

    bool is_prime(std::uint64_t n) const;
    // smallest prime factor of n, 2 <= n <= limit
    std::uint64_t spf(std::uint64_t n) const;

    // number of primes <= x (x <= limit)
    std::size_t prime_count(double x) const;
    // index range [0, prime_count(x)) restricted to primes > lo:
    // first index with primes_[i] > lo
    std::size_t first_prime_above(double lo) const;

  private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint64_t> primes_;
};

// prime factorization of n as (p, exponent) pairs, ascending in p.
// n must satisfy 1 <= n <= table.limit(); n = 1 gives the empty list.
std::vector<std::pair<std::uint64_t, std::uint32_t>> factor(std::uint64_t n, const PrimeTable& table);

// factorization by trial division, no table needed; fine for n up to ~1e12
std::vector<std::pair<std::uint64_t, std::uint32_t>> factor_trial(std::uint64_t n);

// largest prime factor, P(1) = 1 by convention
std::uint64_t largest_prime_factor(std::uint64_t n, const PrimeTable& table);

// Ascending list of y-smooth integers in [1, x] (largest prime factor <= y).
// Cost is proportional to the output size plus the sort.
std::vector<std::uint64_t> smooth_numbers(double x, double y, const PrimeTable& table);

// Visitor over y-smooth n <= x together with the factorization carried
// along the recursion. `visit(n, prime_indices, exponents, depth)` sees the
// distinct primes of n as indices into table.primes(). Enumeration order is
// deterministic (lexicographic in the exponent vector), not sorted by n.
template <typename Visitor>
void for_each_smooth(double x, double y, const PrimeTable& table, Visitor&& visit) {
    if (x < 1.0) return;
    std::vector<std::size_t> pidx;
    std::vector<std::uint32_t> expo;
    struct Rec {
        double x;
        const PrimeTable& t;
        std::vector<std::size_t>& pidx;
        std::vector<std::uint32_t>& expo;
        Visitor& v;
        std::size_t nprimes;
        void go(std::uint64_t n, std::size_t from) {
            v(static_cast<std::uint64_t>(n), pidx, expo);
            for (std::size_t i = from; i < nprimes; ++i) {
                double p = static_cast<double>(t.primes()[i]);
                if (static_cast<double>(n) * p > x) break;
                std::uint64_t m = n;
                pidx.push_back(i);
                expo.push_back(0);
                while (static_cast<double>(m) * p <= x) {
                    m *= t.primes()[i];
                    ++expo.back();
                    go(m, i + 1);
                }
                pidx.pop_back();
                expo.pop_back();
            }
        }
    };
    Rec rec{x, table, pidx, expo, visit, table.prime_count(y)};
    rec.go(1, 0);
}

}  // namespace mclab
