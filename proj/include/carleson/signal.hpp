#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace carleson {

using complexd = std::complex<double>;

struct SampledSignal1D {
    double origin = 0.0;
    double spacing = 1.0;
    std::vector<complexd> samples;

    double x(std::size_t i) const { return origin + spacing * static_cast<double>(i); }
    std::size_t size() const { return samples.size(); }

    double l2() const {
        double s = 0.0;
        for (const auto& v : samples) s += std::norm(v);
        return std::sqrt(spacing * s);
    }
    double linf() const {
        double m = 0.0;
        for (const auto& v : samples) m = std::max(m, std::abs(v));
        return m;
    }
};

inline SampledSignal1D make_signal(double origin, double spacing, std::size_t n) {
    if (n < 2 || !(spacing > 0.0))
        throw std::invalid_argument("make_signal: need n >= 2 and spacing > 0");
    SampledSignal1D s;
    s.origin = origin;
    s.spacing = spacing;
    s.samples.assign(n, complexd{0.0, 0.0});
    return s;
}

// Row-major rectangle: sample (i1, i2) at (x1_origin + i1*d1, x2_origin + i2*d2).
struct SampledSignal2D {
    double origin1 = 0.0, origin2 = 0.0;
    double spacing1 = 1.0, spacing2 = 1.0;
    std::size_t n1 = 0, n2 = 0;
    std::vector<complexd> samples;

    complexd& at(std::size_t i1, std::size_t i2) { return samples[i1 * n2 + i2]; }
    const complexd& at(std::size_t i1, std::size_t i2) const { return samples[i1 * n2 + i2]; }
    double x1(std::size_t i1) const { return origin1 + spacing1 * static_cast<double>(i1); }
    double x2(std::size_t i2) const { return origin2 + spacing2 * static_cast<double>(i2); }

    double l2() const {
        double s = 0.0;
        for (const auto& v : samples) s += std::norm(v);
        return std::sqrt(spacing1 * spacing2 * s);
    }
};

inline SampledSignal2D make_signal2d(double o1, double o2, double d1, double d2,
                                     std::size_t n1, std::size_t n2) {
    if (n1 < 2 || n2 < 2 || !(d1 > 0.0) || !(d2 > 0.0))
        throw std::invalid_argument("make_signal2d: need n >= 2 and spacings > 0");
    SampledSignal2D s;
    s.origin1 = o1;
    s.origin2 = o2;
    s.spacing1 = d1;
    s.spacing2 = d2;
    s.n1 = n1;
    s.n2 = n2;
    s.samples.assign(n1 * n2, complexd{0.0, 0.0});
    return s;
}

}
