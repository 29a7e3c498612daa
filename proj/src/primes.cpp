#include "mclab/primes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mclab/errors.hpp"

namespace mclab {

PrimeTable::PrimeTable(std::uint64_t limit, std::uint64_t budget_bytes) : limit_(limit) {
    if (limit < 2) throw std::invalid_argument("PrimeTable: limit must be >= 2");
    std::uint64_t need = (limit + 1) * sizeof(std::uint32_t);
    if (limit + 1 > 0xffffffffULL || need > budget_bytes)
        throw ResourceError("PrimeTable: limit " + std::to_string(limit) + " exceeds memory budget of " +
                            std::to_string(budget_bytes) + " bytes for the spf array");
    spf_.assign(limit + 1, 0);
    // linear sieve: every composite is crossed once via its smallest prime factor
    for (std::uint64_t n = 2; n <= limit; ++n) {
        if (spf_[n] == 0) {
            spf_[n] = static_cast<std::uint32_t>(n);
            primes_.push_back(n);
        }
        for (std::uint64_t p : primes_) {
            if (p > spf_[n] || n * p > limit) break;
            spf_[n * p] = static_cast<std::uint32_t>(p);
        }
    }
}

bool PrimeTable::is_prime(std::uint64_t n) const {
    if (n < 2) return false;
    if (n > limit_) throw std::out_of_range("PrimeTable::is_prime: n exceeds table limit");
    return spf_[n] == n;
}

std::uint64_t PrimeTable::spf(std::uint64_t n) const {
    if (n < 2 || n > limit_) throw std::out_of_range("PrimeTable::spf: n outside [2, limit]");
    return spf_[n];
}

std::size_t PrimeTable::prime_count(double x) const {
    if (x > static_cast<double>(limit_))
        throw std::out_of_range("PrimeTable::prime_count: x exceeds table limit");
    auto it = std::upper_bound(primes_.begin(), primes_.end(), x,
                               [](double a, std::uint64_t b) { return a < static_cast<double>(b); });
    return static_cast<std::size_t>(it - primes_.begin());
}

std::size_t PrimeTable::first_prime_above(double lo) const {
    auto it = std::upper_bound(primes_.begin(), primes_.end(), lo,
                               [](double a, std::uint64_t b) { return a < static_cast<double>(b); });
    return static_cast<std::size_t>(it - primes_.begin());
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> factor(std::uint64_t n, const PrimeTable& table) {
    if (n < 1 || n > table.limit()) throw std::out_of_range("factor: n outside [1, limit]");
    std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
    while (n > 1) {
        std::uint64_t p = table.spf(n);
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

std::vector<std::pair<std::uint64_t, std::uint32_t>> factor_trial(std::uint64_t n) {
    if (n < 1) throw std::out_of_range("factor_trial: n must be >= 1");
    std::vector<std::pair<std::uint64_t, std::uint32_t>> out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

std::uint64_t largest_prime_factor(std::uint64_t n, const PrimeTable& table) {
    if (n < 1 || n > table.limit()) throw std::out_of_range("largest_prime_factor: n outside [1, limit]");
    std::uint64_t best = 1;
    while (n > 1) {
        std::uint64_t p = table.spf(n);
        best = p;  // spf chain visits prime factors in ascending order
        while (n % p == 0) n /= p;
    }
    return best;
}

std::vector<std::uint64_t> smooth_numbers(double x, double y, const PrimeTable& table) {
    if (x >= 9.007199254740992e15) throw ResourceError("smooth_numbers: x exceeds the 2^53 exactness budget");
    std::vector<std::uint64_t> out;
    for_each_smooth(x, y, table, [&](std::uint64_t n, const auto&, const auto&) { out.push_back(n); });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace mclab
