#include "mclab/step_weight.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mclab {

StepWeight::StepWeight(std::vector<double> edges_in, std::vector<std::complex<double>> values_in)
    : edges(std::move(edges_in)), values(std::move(values_in)) {
    if (edges.empty() || edges.size() != values.size())
        throw std::domain_error("StepWeight: need matching nonempty edges and values");
    double prev = 0.0;
    for (double b : edges) {
        if (!(b > prev)) throw std::domain_error("StepWeight: edges must be positive and strictly increasing");
        prev = b;
    }
}

std::complex<double> StepWeight::operator()(double w) const {
    if (w < 0.0 || w > edges.back()) return 0.0;
    for (std::size_t j = 0; j < edges.size(); ++j)
        if (w < edges[j]) return values[j];
    return values.back();  // w == b_J exactly
}

std::complex<double> StepWeight::mass() const {
    std::complex<double> acc = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < edges.size(); ++j) {
        acc += values[j] * (edges[j] - prev);
        prev = edges[j];
    }
    return acc;
}

double StepWeight::l2_norm_sq() const {
    double acc = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < edges.size(); ++j) {
        acc += std::norm(values[j]) * (edges[j] - prev);
        prev = edges[j];
    }
    return acc;
}

double StepWeight::kernel_tail_constant() const {
    double acc = 0.0, prev = 0.0;
    for (std::size_t j = 0; j < edges.size(); ++j) {
        acc += std::abs(values[j]) * (std::sqrt(edges[j]) + std::sqrt(prev));
        prev = edges[j];
    }
    return acc;
}

StepWeight indicator_weight() { return StepWeight({1.0}, {1.0}); }

std::complex<double> mellin_K(const StepWeight& phi, std::complex<double> s) {
    if (!(s.real() > 0.0)) throw std::domain_error("mellin_K: Re s must be positive");
    std::complex<double> acc = 0.0;
    double prev = 0.0;
    for (std::size_t j = 0; j < phi.edges.size(); ++j) {
        std::complex<double> hi = std::exp(s * std::log(phi.edges[j]));
        std::complex<double> lo = prev > 0.0 ? std::exp(s * std::log(prev)) : 0.0;
        acc += phi.values[j] * (hi - lo);
        prev = phi.edges[j];
    }
    return acc / s;
}

namespace {

// point masses of the kernel numerator on the critical line: weight w_m at
// log-position L_m, with shared edges combined
struct EdgeMasses {
    std::vector<std::complex<double>> w;
    std::vector<double> L;
};

EdgeMasses edge_masses(const StepWeight& phi) {
    EdgeMasses out;
    std::size_t J = phi.edges.size();
    for (std::size_t j = 0; j < J; ++j) {
        double b = phi.edges[j];
        std::complex<double> w = phi.values[j] * std::sqrt(b);
        if (j + 1 < J) w -= phi.values[j + 1] * std::sqrt(b);
        if (w != 0.0) {
            out.w.push_back(w);
            out.L.push_back(std::log(b));
        }
    }
    return out;
}

}  // namespace

double kernel_diagonal_mass(const StepWeight& phi) {
    auto masses = edge_masses(phi);
    double D = 0.0;
    for (auto w : masses.w) D += std::norm(w);
    return D;
}

PlancherelCheck plancherel_identity(const StepWeight& phi, double S, int panels) {
    if (!(S > 0.0)) throw std::domain_error("plancherel_identity: S must be positive");
    if (panels < 8) panels = 8;
    if (panels % 2 == 1) ++panels;

    // complex heights break the tau -> -tau symmetry, so cover [-S, S]
    auto f = [&](double tau) { return std::norm(mellin_K(phi, {0.5, tau})); };
    double h = 2.0 * S / panels;
    double acc = f(-S) + f(S);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(-S + i * h);

    PlancherelCheck out;
    out.grid_part = acc * h / 3.0 / (2.0 * std::numbers::pi);

    auto masses = edge_masses(phi);
    double D = 0.0;
    for (auto w : masses.w) D += std::norm(w);
    // closed form of the non-oscillating tail: (1/pi) integral_S^inf D/(1/4+tau^2)
    out.diagonal_tail = D / std::numbers::pi * 2.0 * (0.5 * std::numbers::pi - std::atan(2.0 * S));

    // each oscillating pair integrates by parts twice against 1/(1/4+tau^2)
    double g_S = 1.0 / (0.25 + S * S);
    double bound = 0.0;
    for (std::size_t m = 0; m < masses.w.size(); ++m)
        for (std::size_t n = m + 1; n < masses.w.size(); ++n) {
            double lam = std::fabs(masses.L[m] - masses.L[n]);
            bound += 4.0 / std::numbers::pi * std::abs(masses.w[m] * masses.w[n]) * g_S / lam;
        }
    out.oscillatory_bound = bound;
    return out;
}

}  // namespace mclab
