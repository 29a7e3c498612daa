#include "mclab/steinhaus.hpp"

#include <cmath>
#include <numbers>

#include "mclab/errors.hpp"
#include "mclab/special_functions.hpp"

namespace mclab {

double SteinhausPhases::angle(std::uint64_t p) const {
    return 2.0 * std::numbers::pi * to_unit_double(hash_pair(seed_, p));
}

std::complex<double> SteinhausPhases::at_prime(std::uint64_t p) const { return std::polar(1.0, angle(p)); }

std::complex<double> SteinhausPhases::at(std::uint64_t n, const PrimeTable& table) const {
    double total = 0.0;
    for (auto [p, k] : factor(n, table)) total += k * angle(p);
    return std::polar(1.0, total);
}

std::complex<double> pair_correlation_estimate(std::uint64_t n, std::uint64_t m, std::uint64_t master_seed,
                                               int replicates, const PrimeTable& table) {
    if (replicates <= 0) throw std::domain_error("pair_correlation_estimate: replicates must be positive");
    std::complex<double> acc = 0.0;
    for (int r = 0; r < replicates; ++r) {
        SteinhausPhases phases(replicate_seed(master_seed, static_cast<std::uint64_t>(r)));
        acc += phases.at(n, table) * std::conj(phases.at(m, table));
    }
    return acc / static_cast<double>(replicates);
}

double circle_tilt_mgf(std::complex<double> a) { return bessel_i0(std::abs(a)); }

double tilted_mean_length(double kappa) {
    if (!(kappa >= 0.0)) throw std::domain_error("tilted_mean_length: kappa must be >= 0");
    if (kappa == 0.0) return 0.0;
    return bessel_i1(kappa) / bessel_i0(kappa);
}

double tilt_total_variation(double kappa, int panels) {
    if (!(kappa >= 0.0)) throw std::domain_error("tilt_total_variation: kappa must be >= 0");
    if (panels < 2) panels = 2;
    if (panels % 2 == 1) ++panels;
    // Simpson over [0, pi]; the integrand is even around 0, so half the
    // circle with weight 1/pi replaces the full average
    double i0 = bessel_i0(kappa);
    auto f = [&](double t) { return std::fabs(std::exp(kappa * std::cos(t)) / i0 - 1.0); };
    double h = std::numbers::pi / panels;
    double acc = f(0.0) + f(std::numbers::pi);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return 0.5 * acc * h / 3.0 / std::numbers::pi;
}

CoupledPhases sample_tilted_pair(std::complex<double> a, CounterRng& rng) {
    double kappa = std::abs(a);
    double i0 = bessel_i0(kappa);
    std::complex<double> dir = kappa > 0.0 ? a / kappa : std::complex<double>(1.0, 0.0);

    CoupledPhases out;
    double theta = rng.next_angle();
    out.u = std::polar(1.0, theta);

    // density of the tilted law against uniform, at u rotated into the frame
    // where the tilt direction is 1
    auto ratio = [&](double t) { return std::exp(kappa * std::cos(t)) / i0; };

    // angle of u relative to the tilt direction
    double rel = theta - std::arg(dir);
    if (rng.next_double() <= std::min(1.0, ratio(rel))) {
        out.u_tilted = out.u;
        return out;
    }

    out.moved = true;
    // redraw from the excess (ratio - 1)_+ by rejection with the flat
    // envelope max(ratio) - 1 = e^kappa / I0 - 1
    double envelope = std::exp(kappa) / i0 - 1.0;
    for (int it = 0; it < 100000; ++it) {
        double t = rng.next_angle();
        double excess = ratio(t) - 1.0;
        if (excess > 0.0 && rng.next_double() * envelope <= excess) {
            out.u_tilted = std::polar(1.0, t) * dir;
            return out;
        }
    }
    throw SamplingError("sample_tilted_pair: excess-density rejection did not terminate");
}

}  // namespace mclab
