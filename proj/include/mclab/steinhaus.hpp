#pragma once

#include <complex>
#include <cstdint>

#include "mclab/primes.hpp"
#include "mclab/rng.hpp"

namespace mclab {

// Phases alpha(p), i.i.d. uniform on the unit circle as p runs over the
// primes, extended completely multiplicatively to alpha(n). Each phase is a
// pure function of (seed, p), so any module handed the same seed sees the
// same realization without coordination.
class SteinhausPhases {
  public:
    explicit SteinhausPhases(std::uint64_t seed) : seed_(seed) {}

    double angle(std::uint64_t p) const;  // in [0, 2 pi)
    std::complex<double> at_prime(std::uint64_t p) const;
    std::complex<double> at(std::uint64_t n, const PrimeTable& table) const;

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
};

// sample average of alpha(n) conj(alpha(m)) over independent realizations;
// the expectation is 1 at n = m and 0 otherwise
std::complex<double> pair_correlation_estimate(std::uint64_t n, std::uint64_t m, std::uint64_t master_seed,
                                               int replicates, const PrimeTable& table);

// E exp(Re(conj(a) U)) for U uniform on the circle; equals I0(|a|)
double circle_tilt_mgf(std::complex<double> a);

// mean resultant length of the tilted phase law, I1(kappa) / I0(kappa)
double tilted_mean_length(double kappa);

// total variation distance between the uniform phase law and the tilted law
// with density exp(kappa cos t) / I0(kappa), by quadrature of |density - 1|/2
double tilt_total_variation(double kappa, int panels = 4000);

// One draw of the maximal coupling between a uniform phase U and a phase
// U_a with density exp(Re(conj(a) u)) / I0(|a|) against the uniform law.
// The pair agrees except on an event of probability equal to the total
// variation distance; on that event U_a is redrawn from the excess density.
struct CoupledPhases {
    std::complex<double> u;         // uniform marginal
    std::complex<double> u_tilted;  // tilted marginal
    bool moved = false;             // true when the draw had to split
};

CoupledPhases sample_tilted_pair(std::complex<double> a, CounterRng& rng);

}  // namespace mclab
