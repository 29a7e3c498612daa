#pragma once

#include <vector>

namespace mclab {

// Generalized Dickman density rho_theta:
//   rho_theta(t) = t^{theta-1} / Gamma(theta)          on (0, 1],
//   t rho_theta(t) = theta * integral_{t-1}^{t} rho    for t > 1.
// Values on a uniform grid t_j = j h, built by a sliding trapezoid rule with
// the sub-1 window parts handled by the exact closed form. Accuracy O(h^2).
class DickmanTable {
  public:
    // pre: theta in (0, 1], h <= 1e-3 with 1/h an even integer, t_max <= 120
    DickmanTable(double theta, double t_max, double h);

    double theta() const { return theta_; }
    double h() const { return h_; }
    double t_max() const { return t_max_; }
    const std::vector<double>& values() const { return values_; }  // values_[j] = rho((j+1) h)

    // closed form on (0,1], linear interpolation on (1, t_max], 0 beyond
    double rho(double t) const;

    // integral of rho over [0, a], a <= 1, exact: a^theta / Gamma(theta+1)
    double head_integral(double a) const;

    // |t rho(t) - theta * integral_{t-1}^t rho| measured against an
    // independent Simpson re-quadrature of the stored grid; max over every
    // `stride`-th grid point with t >= 2.25. Windows whose left edge sits
    // near t = 1 are skipped: rho' has an integrable singularity there for
    // theta < 1, which would contaminate the re-quadrature at order h^{1+theta}
    // and mask the O(h^2) behaviour everywhere else.
    double max_delay_residual(std::size_t stride = 1) const;

  private:
    double theta_, t_max_, h_;
    double inv_gamma_theta_;   // 1 / Gamma(theta)
    double inv_gamma_theta1_;  // 1 / Gamma(theta+1)
    std::vector<double> values_;
};

// Both sides of the Laplace identity
//   integral_0^inf e^{-rv} rho_theta(v) dv
//     = exp(theta*gamma - theta*integral_0^r (1-e^{-s})/s ds).
struct DickmanLaplace {
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_tail_bound = 0.0;  // bound on the integral beyond the table
};

// pre: theta in (0,1], 0 <= r <= 25
DickmanLaplace dickman_laplace(double theta, double r, double h = 1e-3, double t_max = 12.0);

// Truncation-window constants
//   C(k,e,d) = Gamma(theta+1) a^theta * integral rho_theta(v) (1 - a v)^{-1} dv,
//   a = e + k d, over [max((1-(e+(k+1)d))/a, 0), max((1-a)/a, 0)],
// summed for k = 0..K with K = floor((1-e)/d).
struct TruncationConstants {
    std::vector<double> per_k;
    double total = 0.0;
    int K = 0;
};

TruncationConstants c_eps_delta(double theta, double eps, double delta);

// delta -> 0 limit: Gamma(theta+1) * integral_0^{1/eps - 1} rho_theta(v) (1+v)^{-theta} dv
double c_eps_limit(double theta, double eps);

}  // namespace mclab
