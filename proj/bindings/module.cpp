#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "mclab/chaos.hpp"
#include "mclab/config.hpp"
#include "mclab/dickman.hpp"
#include "mclab/experiments.hpp"
#include "mclab/mult_func.hpp"
#include "mclab/primes.hpp"
#include "mclab/random_sums.hpp"
#include "mclab/rng.hpp"
#include "mclab/stats.hpp"
#include "mclab/steinhaus.hpp"
#include "mclab/step_weight.hpp"

namespace py = pybind11;
using namespace mclab;
using cd = std::complex<double>;

namespace {

ChaosParams params_for(double y, double t, const std::string& mode) {
    ChaosParams p;
    p.y = y;
    p.t = t;
    if (mode == "full")
        p.mode = FactorMode::full;
    else if (mode == "exp-linear")
        p.mode = FactorMode::exp_linear;
    else
        throw py::value_error("mode must be 'full' or 'exp-linear'");
    return p;
}

std::pair<std::vector<double>, std::vector<double>> density_pair(const GridMeasure& gm) {
    std::vector<double> nodes(gm.grid.n);
    for (std::size_t i = 0; i < gm.grid.n; ++i) nodes[i] = gm.grid.node(i);
    return {std::move(nodes), gm.density};
}

}  // namespace

PYBIND11_MODULE(_mclab, m) {
    m.doc() = "monte carlo laboratory for random multiplicative functions";

    m.def(
        "primes_up_to",
        [](std::uint64_t limit) {
            PrimeTable table(limit);
            return table.primes();
        },
        py::arg("limit"), "ascending primes <= limit");

    m.def(
        "f_values",
        [](const std::string& family, double theta, std::uint64_t limit) {
            PrimeTable table(limit);
            return sieve_f_values(family_by_name(family, theta), limit, table);
        },
        py::arg("family"), py::arg("theta"), py::arg("limit"),
        "f(n) for n = 0..limit (index 0 unused); families: two-squares, divisor, "
        "omega-multiplicity, omega-distinct");

    m.def(
        "steinhaus_alpha",
        [](std::uint64_t seed, std::uint64_t n) {
            PrimeTable table(n + 1);
            return SteinhausPhases(seed).at(n, table);
        },
        py::arg("seed"), py::arg("n"), "completely multiplicative unit phase at n");

    m.def(
        "m_density",
        [](std::uint64_t seed, const std::string& family, double theta, double y, double t, double ds) {
            PrimeTable table(static_cast<std::uint64_t>(y) + 1);
            auto grid = Grid::over(0.0, 1.0, ds);
            SteinhausPhases phases(seed);
            return density_pair(m_measure(phases, family_by_name(family, theta), params_for(y, t, "full"), grid,
                                          table));
        },
        py::arg("seed"), py::arg("family"), py::arg("theta"), py::arg("y"),
        py::arg("t") = std::numeric_limits<double>::infinity(), py::arg("ds") = 0.01,
        "normalized squared-modulus density of the random product on [0, 1): (nodes, density)");

    m.def(
        "nu_density",
        [](std::uint64_t seed, const std::string& family, double theta, double y, double t, double ds) {
            PrimeTable table(static_cast<std::uint64_t>(y) + 1);
            auto grid = Grid::over(0.0, 1.0, ds);
            SteinhausPhases phases(seed);
            return density_pair(nu_measure(phases, family_by_name(family, theta), params_for(y, t, "exp-linear"),
                                           grid, table));
        },
        py::arg("seed"), py::arg("family"), py::arg("theta"), py::arg("y"),
        py::arg("t") = std::numeric_limits<double>::infinity(), py::arg("ds") = 0.01,
        "normalized exponential-field density on [0, 1): (nodes, density)");

    m.def(
        "partial_sum",
        [](std::uint64_t seed, const std::string& family, double theta, double x) {
            PrimeTable table(static_cast<std::uint64_t>(x) + 1);
            return partial_sum(SteinhausPhases(seed), family_by_name(family, theta), x, indicator_weight(), table);
        },
        py::arg("seed"), py::arg("family"), py::arg("theta"), py::arg("x"),
        "normalized weighted partial sum with the unit window");

    m.def(
        "partial_sum_second_moment",
        [](const std::string& family, double theta, double x) {
            PrimeTable table(static_cast<std::uint64_t>(x) + 1);
            return partial_sum_second_moment(family_by_name(family, theta), x, indicator_weight(), table);
        },
        py::arg("family"), py::arg("theta"), py::arg("x"), "exact second moment of the normalized partial sum");

    m.def(
        "v_hat",
        [](std::uint64_t seed, const std::string& family, double theta, double y, double r, double half_width,
           double ds) {
            PrimeTable table(static_cast<std::uint64_t>(y) + 2);
            auto grid = Grid::over(-half_width, half_width, ds);
            return v_infty_estimator(SteinhausPhases(seed), family_by_name(family, theta), y, r, indicator_weight(),
                                     grid, table)
                .value;
        },
        py::arg("seed"), py::arg("family"), py::arg("theta"), py::arg("y"), py::arg("r") = 1.0,
        py::arg("half_width") = 40.0, py::arg("ds") = 0.01,
        "variance estimate: kernel-weighted mass of the product measure plus closed-form tail");

    m.def(
        "bracket_total",
        [](std::uint64_t seed, const std::string& family, double theta, double x, double eps, double delta) {
            TruncationScheme scheme(eps, delta);
            auto layout = truncation_layout(scheme, x, 1.0);
            PrimeTable table(static_cast<std::uint64_t>(layout.edges.back()) + 2);
            return bracket_T(SteinhausPhases(seed), family_by_name(family, theta), x, indicator_weight(), scheme,
                             table)
                .total;
        },
        py::arg("seed"), py::arg("family"), py::arg("theta"), py::arg("x"), py::arg("eps") = 0.2,
        py::arg("delta") = 0.3, "total of the square bracket over the truncation intervals");

    m.def(
        "truncation_edges",
        [](double x, double eps, double delta) {
            return truncation_layout(TruncationScheme(eps, delta), x, 1.0).edges;
        },
        py::arg("x"), py::arg("eps") = 0.2, py::arg("delta") = 0.3, "interval edges x^(eps + k delta)");

    m.def(
        "dickman_rho",
        [](double theta, double t, double h) {
            DickmanTable table(theta, std::max(t, 1.5) + 0.5, h);
            return table.rho(t);
        },
        py::arg("theta"), py::arg("t"), py::arg("h") = 1e-3, "generalized smoothness density rho_theta(t)");

    m.def(
        "dickman_laplace_sides",
        [](double theta, double r) {
            auto id = dickman_laplace(theta, r);
            return std::make_pair(id.lhs, id.rhs);
        },
        py::arg("theta"), py::arg("r"), "(integral side, closed-form side) of the Laplace identity");

    m.def("window_constant", &c_eps_limit, py::arg("theta"), py::arg("eps"),
          "small-delta limit of the truncation window constant");

    m.def(
        "window_constant_sum",
        [](double theta, double eps, double delta) { return c_eps_delta(theta, eps, delta).total; },
        py::arg("theta"), py::arg("eps"), py::arg("delta"), "sum of the per-interval window constants");

    m.def("tilted_mean_length", &tilted_mean_length, py::arg("kappa"),
          "mean resultant length of the tilted phase law");
    m.def("tilt_total_variation", &tilt_total_variation, py::arg("kappa"), py::arg("panels") = 4000,
          "total variation between uniform and tilted phase laws");

    m.def("ks_cdf", &ks_cdf_exact, py::arg("d"), py::arg("n"), "finite-sample Kolmogorov-Smirnov CDF");

    m.def(
        "run_experiment",
        [](const std::string& kind, const std::string& config_text, const std::string& out_dir) {
            auto cfg = KeyValueConfig::from_text(config_text);
            auto rec = run_experiment(kind, cfg);
            if (!out_dir.empty()) write_record(rec, out_dir);
            return py::make_tuple(rec.all_pass, rec.summary.dump(2), rec.rows_csv);
        },
        py::arg("kind"), py::arg("config_text") = "", py::arg("out_dir") = "",
        "run one experiment (clt, chaos, multifractal, coupling, analytics, dickman-table); "
        "returns (all_pass, summary_json, rows_csv)");
}
