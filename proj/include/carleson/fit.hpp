#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace carleson {

// Least-squares line through (x, log2 y).  The slope is the empirical decay
// exponent: y ~ C * 2^(slope * x).
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
    bool degenerate = false;
};

inline DecayFit fit_log2(const std::vector<double>& x,
                         const std::vector<double>& y,
                         double floor = 1e-12) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_log2: size mismatch");
    DecayFit fit;
    fit.points = x.size();
    if (x.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    for (double v : y)
        if (!(v > floor)) {
            fit.degenerate = true;
            return fit;
        }

    const std::size_t n = x.size();
    double mx = 0.0, ml = 0.0;
    std::vector<double> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        l[i] = std::log2(y[i]);
        mx += x[i];
        ml += l[i];
    }
    mx /= static_cast<double>(n);
    ml /= static_cast<double>(n);

    double sxx = 0.0, sxl = 0.0, sll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxl += (x[i] - mx) * (l[i] - ml);
        sll += (l[i] - ml) * (l[i] - ml);
    }
    if (sxx == 0.0) {
        fit.degenerate = true;
        return fit;
    }
    fit.slope = sxl / sxx;
    fit.intercept = ml - fit.slope * mx;
    if (sll == 0.0) {
        // constant data: the zero-slope line is exact, but there is no
        // variance to explain, so flag rather than claim r2 = 1
        fit.r2 = 1.0;
        fit.degenerate = true;
        return fit;
    }
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = l[i] - (fit.intercept + fit.slope * x[i]);
        ssr += e * e;
    }
    fit.r2 = 1.0 - ssr / sll;
    return fit;
}

}
