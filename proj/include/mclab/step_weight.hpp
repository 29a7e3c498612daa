#pragma once

#include <complex>
#include <vector>

namespace mclab {

// Step weight sum_j v_j 1_{[b_{j-1}, b_j)} with 0 = b_0 < b_1 < ... < b_J and
// complex heights v_j. Pieces are closed on the left; the top edge b_J is
// included so the weight is v_J there and 0 beyond. `edges` holds b_1..b_J,
// `values` holds v_1..v_J.
struct StepWeight {
    std::vector<double> edges;
    std::vector<std::complex<double>> values;

    StepWeight(std::vector<double> edges_in, std::vector<std::complex<double>> values_in);

    std::complex<double> operator()(double w) const;
    std::complex<double> mass() const;  // integral of the function
    double l2_norm_sq() const;          // integral of its squared modulus

    // C with |kernel(1/2 + i tau)| <= C / |1/2 + i tau|
    double kernel_tail_constant() const;

    double support_end() const { return edges.back(); }
};

// weight 1 on [0, 1]
StepWeight indicator_weight();

// sum of squared edge masses of the kernel numerator; this is the constant D
// in the non-oscillating part D / (1/4 + tau^2) of |kernel(1/2 + i tau)|^2
double kernel_diagonal_mass(const StepWeight& phi);

// Transform integral_0^infty Phi(w) w^{s-1} dw = sum_j v_j (b_j^s - b_{j-1}^s) / s,
// defined for Re s > 0.
std::complex<double> mellin_K(const StepWeight& phi, std::complex<double> s);

// Evaluation of (1/2pi) integral |kernel(1/2 + i tau)|^2 dtau, which equals
// the squared L2 norm of the weight. The grid covers |tau| <= S; beyond S the
// non-oscillating part of |kernel|^2 integrates in closed form and the
// oscillating part is bounded by integration by parts.
struct PlancherelCheck {
    double grid_part = 0.0;
    double diagonal_tail = 0.0;
    double oscillatory_bound = 0.0;  // bound on the neglected remainder
    double total() const { return grid_part + diagonal_tail; }
};

PlancherelCheck plancherel_identity(const StepWeight& phi, double S, int panels);

}  // namespace mclab
