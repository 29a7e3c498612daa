#include "mclab/stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace mclab {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
    }
    return d;
}

namespace {

// non-negative matrix with a separate power-of-ten exponent so that n-fold
// products at large n stay inside double range
struct ScaledMat {
    int m = 0;
    long exp10 = 0;
    std::vector<double> a;

    static ScaledMat identity(int m) {
        ScaledMat out;
        out.m = m;
        out.a.assign(static_cast<std::size_t>(m) * m, 0.0);
        for (int i = 0; i < m; ++i) out.a[static_cast<std::size_t>(i) * m + i] = 1.0;
        return out;
    }
};

ScaledMat mat_mul(const ScaledMat& A, const ScaledMat& B, int sentinel) {
    ScaledMat C;
    C.m = A.m;
    C.exp10 = A.exp10 + B.exp10;
    C.a.assign(A.a.size(), 0.0);
    int m = A.m;
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < m; ++l) {
            double v = A.a[static_cast<std::size_t>(i) * m + l];
            if (v == 0.0) continue;
            for (int j = 0; j < m; ++j) C.a[static_cast<std::size_t>(i) * m + j] += v * B.a[static_cast<std::size_t>(l) * m + j];
        }
    if (C.a[static_cast<std::size_t>(sentinel) * m + sentinel] > 1e140) {
        for (auto& v : C.a) v *= 1e-140;
        C.exp10 += 140;
    }
    return C;
}

ScaledMat mat_pow(ScaledMat base, unsigned long e, int sentinel) {
    ScaledMat out = ScaledMat::identity(base.m);
    while (e > 0) {
        if (e & 1UL) out = mat_mul(out, base, sentinel);
        e >>= 1UL;
        if (e > 0) base = mat_mul(base, base, sentinel);
    }
    return out;
}

}  // namespace

double ks_cdf_exact(double d, std::size_t n_in) {
    if (n_in == 0) throw std::invalid_argument("ks_cdf_exact: n must be positive");
    auto n = static_cast<double>(n_in);
    if (!(d > 0.5 / n)) return 0.0;
    if (d >= 1.0) return 1.0;

    double nd = n * d;
    int k = static_cast<int>(nd) + 1;
    double h = k - nd;
    int m = 2 * k - 1;

    ScaledMat H;
    H.m = m;
    H.a.assign(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](int i, int j) -> double& { return H.a[static_cast<std::size_t>(i) * m + j]; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 >= 0) at(i, j) = 1.0;
    for (int i = 0; i < m; ++i) {
        at(i, 0) -= std::pow(h, i + 1);
        at(m - 1, i) -= std::pow(h, m - i);
    }
    if (2.0 * h - 1.0 > 0.0) at(m - 1, 0) += std::pow(2.0 * h - 1.0, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i - j + 1 > 0)
                for (int g = 1; g <= i - j + 1; ++g) at(i, j) /= g;

    auto Q = mat_pow(H, n_in, k - 1);
    double s = Q.a[static_cast<std::size_t>(k - 1) * m + (k - 1)];
    long e = Q.exp10;
    // multiply by n! / n^n one factor at a time
    for (std::size_t i = 1; i <= n_in; ++i) {
        s *= static_cast<double>(i) / n;
        if (s < 1e-140 && s > 0.0) {
            s *= 1e140;
            e -= 140;
        }
    }
    if (e == 0) return std::min(s, 1.0);
    double scaled = s * std::pow(10.0, static_cast<double>(e));
    return std::clamp(scaled, 0.0, 1.0);
}

SlopeFit slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("slope_fit: need matching lists, n >= 2");
    auto n = static_cast<double>(xs.size());
    Kahan sx, sy;
    for (double x : xs) sx.add(x);
    for (double y : ys) sy.add(y);
    double xbar = sx.sum / n, ybar = sy.sum / n;
    Kahan sxx, sxy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx.add((xs[i] - xbar) * (xs[i] - xbar));
        sxy.add((xs[i] - xbar) * (ys[i] - ybar));
    }
    if (sxx.sum == 0.0) throw std::invalid_argument("slope_fit: all abscissas equal");
    SlopeFit out;
    out.slope = sxy.sum / sxx.sum;
    out.intercept = ybar - out.slope * xbar;
    if (xs.size() > 2) {
        Kahan rss;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double r = ys[i] - (out.intercept + out.slope * xs[i]);
            rss.add(r * r);
        }
        out.se_slope = std::sqrt(rss.sum / (n - 2.0) / sxx.sum);
    }
    return out;
}

}  // namespace mclab
