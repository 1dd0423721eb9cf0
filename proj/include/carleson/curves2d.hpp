#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "carleson/fft.hpp"
#include "carleson/operators.hpp"
#include "carleson/phase.hpp"
#include "carleson/signal.hpp"

// Principal-value transform along a monomial curve on a 2-D grid:
//
//   (H_eps^u f)(x1, x2) = pv int f(x1 - t, x2 - u(x1) sgn(t)|t|^eps) dt / t.
//
// The second variable is treated as periodic, so a partial DFT there turns the
// curve shift into a fiber family of 1-D modulated transforms: bin q picks up
// the odd-branch phase with coefficient -omega_q * u(x1), where omega_q is the
// signed bin frequency.  The first variable uses the same staggered midpoint
// discretization as the 1-D operators (outputs offset by half a cell, kernel
// taps 1/(k+1/2), zero extension outside the grid).
//
// Two evaluation routes are provided: the fiberwise one (partial DFT, tap sums
// per frequency, inverse partial DFT) that backs hilbert_along_curve, and a
// direct physical-space quadrature that interpolates each shifted slice
// explicitly.  plancherel_check compares their norms; with the periodic
// convention the discrete Parseval identity makes the two agree to rounding.

namespace carleson {

// Displacement amplitudes u(x1), one real value per staggered output abscissa
// of the first variable.  Zeros and negative values are fine.
struct CurveField {
    std::vector<double> values;
};

namespace detail {

inline void validate_curve(const SampledSignal2D& f, const CurveField& u, double eps,
                           const char* who) {
    if (f.n1 < 2 || f.n2 < 2 || f.samples.size() != f.n1 * f.n2)
        throw std::invalid_argument(std::string(who) + ": malformed 2-D signal");
    if (!(f.spacing1 > 0.0) || !(f.spacing2 > 0.0))
        throw std::invalid_argument(std::string(who) + ": spacings must be positive");
    if (u.values.size() != f.n1)
        throw std::invalid_argument(std::string(who) +
                                    ": field length must match the first grid dimension");
    for (const double v : u.values)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(who) + ": field values must be finite");
    if (!(eps != 0.0) || !std::isfinite(eps))
        throw std::invalid_argument(std::string(who) + ": exponent must be finite and nonzero");
}

// Partial DFT along the second variable, in place per line.
inline SampledSignal2D partial_dft_rows(const SampledSignal2D& f, bool inverse) {
    SampledSignal2D out = f;
    std::vector<complexd> row(f.n2);
    for (std::size_t i1 = 0; i1 < f.n1; ++i1) {
        for (std::size_t i2 = 0; i2 < f.n2; ++i2) row[i2] = f.at(i1, i2);
        std::vector<complexd> tr = inverse ? idft(row) : dft(row);
        for (std::size_t i2 = 0; i2 < f.n2; ++i2) out.at(i1, i2) = tr[i2];
    }
    return out;
}

// Fiber image of the curve transform: input rows DFT'd in x2, output rows
// still in the frequency domain, staggered in x1.
inline SampledSignal2D curve_fiber_spectrum(const SampledSignal2D& f, const CurveField& u,
                                            double eps) {
    const std::size_t n1 = f.n1, n2 = f.n2;
    const SampledSignal2D spec = partial_dft_rows(f, false);
    SampledSignal2D out = spec;
    out.origin1 += 0.5 * f.spacing1;
    std::fill(out.samples.begin(), out.samples.end(), complexd{0.0, 0.0});

    std::vector<double> mag(n1), inv(n1);
    for (std::size_t k = 0; k < n1; ++k) {
        const double kh = static_cast<double>(k) + 0.5;
        mag[k] = fpow(kh * f.spacing1, eps);
        inv[k] = 1.0 / kh;
    }
    for (std::size_t q = 0; q < n2; ++q) {
        const double w = bin_frequency(q, n2, f.spacing2);
        for (std::size_t i = 0; i < n1; ++i) {
            const double a = -w * u.values[i];
            complexd acc{0.0, 0.0};
            for (std::size_t k = 0; k < n1; ++k) {
                const long mp = static_cast<long>(i) - static_cast<long>(k);
                const std::size_t mn = i + 1 + k;
                if (mp < 0 && mn >= n1) break;
                const double ph = a * mag[k];
                if (mp >= 0)
                    acc += std::polar(inv[k], ph) * spec.at(static_cast<std::size_t>(mp), q);
                if (mn < n1) acc -= std::polar(inv[k], -ph) * spec.at(mn, q);
            }
            out.at(i, q) = acc;
        }
    }
    return out;
}

// Physical-space route: interpolate each shifted slice from its trigonometric
// expansion and accumulate the staggered tap sum directly, pixel by pixel.
inline SampledSignal2D curve_transform_direct(const SampledSignal2D& f, const CurveField& u,
                                              double eps) {
    const std::size_t n1 = f.n1, n2 = f.n2;
    const SampledSignal2D coef = partial_dft_rows(f, false);

    SampledSignal2D out = f;
    out.origin1 += 0.5 * f.spacing1;
    std::fill(out.samples.begin(), out.samples.end(), complexd{0.0, 0.0});

    std::vector<double> qsign(n2);
    for (std::size_t q = 0; q < n2; ++q)
        qsign[q] = (q <= n2 / 2) ? static_cast<double>(q)
                                 : static_cast<double>(q) - static_cast<double>(n2);
    const double two_pi = 2.0 * 3.14159265358979323846;

    std::vector<complexd> shifted(n2);
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t m1 = 0; m1 < n1; ++m1) {
            const double kh = static_cast<double>(i) - static_cast<double>(m1) + 0.5;
            const double y = kh * f.spacing1;
            const double s = u.values[i] * sgn(y) * fpow(std::fabs(y), eps);
            const double t = s / f.spacing2;  // shift in fractional samples
            for (std::size_t m2 = 0; m2 < n2; ++m2) {
                complexd v{0.0, 0.0};
                for (std::size_t q = 0; q < n2; ++q)
                    v += coef.at(m1, q) *
                         std::polar(1.0, two_pi * qsign[q] *
                                             (static_cast<double>(m2) - t) /
                                             static_cast<double>(n2));
                out.at(i, m2) += v / (kh * static_cast<double>(n2));
            }
        }
    return out;
}

}

// Curve transform via the fiberwise route.  A vanishing field collapses every
// fiber phase to one, so that case short-circuits to the plain transform along
// x1 and is exact by construction.
inline SampledSignal2D hilbert_along_curve(const SampledSignal2D& f, const CurveField& u,
                                           double eps) {
    detail::validate_curve(f, u, eps, "hilbert_along_curve");
    const bool flat = std::all_of(u.values.begin(), u.values.end(),
                                  [](double v) { return v == 0.0; });
    if (flat) {
        SampledSignal2D out = f;
        out.origin1 += 0.5 * f.spacing1;
        SampledSignal1D line = make_signal(f.origin1, f.spacing1, f.n1);
        for (std::size_t i2 = 0; i2 < f.n2; ++i2) {
            for (std::size_t i1 = 0; i1 < f.n1; ++i1) line.samples[i1] = f.at(i1, i2);
            const SampledSignal1D h = discrete_hilbert(line);
            for (std::size_t i1 = 0; i1 < f.n1; ++i1) out.at(i1, i2) = h.samples[i1];
        }
        return out;
    }
    return detail::partial_dft_rows(detail::curve_fiber_spectrum(f, u, eps), true);
}

// L2 norm of the curve transform computed two ways: first by the direct
// physical-space quadrature, then fiberwise through the partial DFT (Parseval
// weight 1/n2 per line).  Both use the grid measure spacing1 * spacing2.
inline std::pair<double, double> plancherel_check(const SampledSignal2D& f,
                                                  const CurveField& u, double eps) {
    detail::validate_curve(f, u, eps, "plancherel_check");
    const SampledSignal2D direct = detail::curve_transform_direct(f, u, eps);
    const double phys = direct.l2();

    const SampledSignal2D spec = detail::curve_fiber_spectrum(f, u, eps);
    double s = 0.0;
    for (const auto& v : spec.samples) s += std::norm(v);
    const double fib =
        std::sqrt(f.spacing1 * f.spacing2 * s / static_cast<double>(f.n2));
    return {phys, fib};
}

}
