#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace mclab {

// Kahan-compensated accumulator
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// sample mean and standard error of the mean
struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

inline MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE out;
    out.n = xs.size();
    if (xs.empty()) return out;
    Kahan s;
    for (double x : xs) s.add(x);
    out.mean = s.sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    Kahan v;
    for (double x : xs) v.add((x - out.mean) * (x - out.mean));
    double var = v.sum / static_cast<double>(xs.size() - 1);
    out.se = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

// standard normal CDF
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// sup |F_n - F| for the empirical CDF of the samples against a model CDF
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// P(D_n <= d) for the Kolmogorov-Smirnov statistic at finite n, evaluated
// exactly by the Marsaglia-Tsang-Wang matrix-power recursion
double ks_cdf_exact(double d, std::size_t n);

// least-squares line fit with the standard error of the slope
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double se_slope = 0.0;
};

SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace mclab
