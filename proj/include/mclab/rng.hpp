#pragma once

#include <cstdint>
#include <numbers>

namespace mclab {

// splitmix64 finalizer. Full-avalanche mixing of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash of a (seed, key) pair; applied twice so either word avalanches.
inline std::uint64_t hash_pair(std::uint64_t seed, std::uint64_t key) {
    return mix64(mix64(seed ^ 0x8f0c1c3a6e2b5d97ULL) ^ key);
}

// uniform double in [0, 1) from a 64-bit word (53 mantissa bits)
inline double to_unit_double(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// Tiny counter-based generator: the n-th output is hash_pair(key, n).
// Streams with distinct keys are independent for practical purposes and
// a stream can be replayed from any counter value.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    std::uint64_t next_u64() { return hash_pair(key_, counter_++); }
    double next_double() { return to_unit_double(next_u64()); }
    // uniform on [0, 2*pi)
    double next_angle() { return 2.0 * std::numbers::pi * next_double(); }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

// Seed for the replicate-r stream of an experiment run.
inline std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
    return hash_pair(master_seed, 0x5eedc0de00000000ULL ^ replicate);
}

}  // namespace mclab
