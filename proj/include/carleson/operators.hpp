#pragma once

// Discretized singular and maximal operators on sampled one-dimensional
// signals.
//
// Grid convention: operators consume samples f(origin + m dx) and emit values
// on the staggered grid origin + (i + 1/2) dx.  Singular kernels are sampled
// at the half-integer offsets y = (k + 1/2) dx, which avoids y = 0, keeps the
// 1/y taps antisymmetric, and keeps modulation diagonal on the samples, so
// conjugation identities hold to rounding.  Convolutions are evaluated with a
// zero-padded transform; sums run over the data window only, and the
// neglected 1/y tail is O(||f||_1 / R) at window radius R.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "carleson/bump.hpp"
#include "carleson/fft.hpp"
#include "carleson/phase.hpp"
#include "carleson/random.hpp"
#include "carleson/signal.hpp"

namespace carleson {

// Positive modulation samples A(x), aligned with the staggered output points
// of the operators below.
struct ModulationField {
    std::vector<double> values;
};

inline ModulationField constant_field(double A, std::size_t n) {
    if (!(A > 0.0) || !std::isfinite(A))
        throw std::invalid_argument("constant_field: A must be positive and finite");
    ModulationField f;
    f.values.assign(n, A);
    return f;
}

namespace detail {

inline void validate_signal(const SampledSignal1D& f, const char* who) {
    if (f.size() < 2)
        throw std::invalid_argument(std::string(who) + ": need at least 2 samples");
    if (!(f.spacing > 0.0) || !std::isfinite(f.spacing) || !std::isfinite(f.origin))
        throw std::invalid_argument(std::string(who) + ": bad grid geometry");
}

inline void validate_modulation(double eps, const char* who) {
    if (eps == 0.0 || !std::isfinite(eps))
        throw std::invalid_argument(std::string(who) + ": epsilon must be finite and nonzero");
}

// Full linear convolution g_i = sum_m f_m taps[(i - m) + K] with taps indexed
// k in [-K, K]; the result covers i in [-K, n-1+K], stored shifted by K.
inline std::vector<complexd> convolve_taps(const std::vector<complexd>& f,
                                           const std::vector<complexd>& taps) {
    const std::size_t n = f.size();
    const std::size_t tl = taps.size();
    const std::size_t p = next_pow2(n + tl - 1);
    std::vector<complexd> fa(p, complexd{0.0, 0.0}), fb(p, complexd{0.0, 0.0});
    std::copy(f.begin(), f.end(), fa.begin());
    std::copy(taps.begin(), taps.end(), fb.begin());
    fa = dft(std::move(fa));
    fb = dft(std::move(fb));
    for (std::size_t i = 0; i < p; ++i) fa[i] *= fb[i];
    fa = idft(std::move(fa));
    fa.resize(n + tl - 1);
    return fa;
}

// Same convolution restricted to the input window, i in [0, n).
inline std::vector<complexd> apply_taps_windowed(const std::vector<complexd>& f,
                                                 const std::vector<complexd>& taps) {
    const std::size_t K = taps.size() / 2;
    auto full = convolve_taps(f, taps);
    return std::vector<complexd>(full.begin() + static_cast<std::ptrdiff_t>(K),
                                 full.begin() + static_cast<std::ptrdiff_t>(K + f.size()));
}

// e^{i A branch(y)|y|^eps} / (k + 1/2) at the half-integer offsets.  At A = 0
// this is exactly the principal-value Hilbert tap 1/(k + 1/2).
inline std::vector<complexd> modulated_taps(std::size_t n, double dx, double A,
                                            Branch parity, double eps) {
    const long K = static_cast<long>(n) - 1;
    std::vector<complexd> taps(2 * n - 1);
    for (long k = -K; k <= K; ++k) {
        const double kh = static_cast<double>(k) + 0.5;
        if (A == 0.0) {
            taps[static_cast<std::size_t>(k + K)] = complexd{1.0 / kh, 0.0};
            continue;
        }
        const double y = kh * dx;
        double phase = A * fpow(std::fabs(y), eps);
        if (parity == Branch::odd && y < 0.0) phase = -phase;
        taps[static_cast<std::size_t>(k + K)] = std::polar(1.0, phase) / kh;
    }
    return taps;
}

inline SampledSignal1D staggered_like(const SampledSignal1D& f) {
    SampledSignal1D g;
    g.origin = f.origin + 0.5 * f.spacing;
    g.spacing = f.spacing;
    g.samples.assign(f.size(), complexd{0.0, 0.0});
    return g;
}

}

// PV int e^{i A branch(y)|y|^eps} f(x - y) dy / y on the staggered grid.
inline SampledSignal1D modulated_transform(const SampledSignal1D& f, double A,
                                           Branch parity, double eps) {
    detail::validate_signal(f, "modulated_transform");
    detail::validate_modulation(eps, "modulated_transform");
    if (!(A >= 0.0) || !std::isfinite(A))
        throw std::invalid_argument("modulated_transform: A must be finite and nonnegative");
    SampledSignal1D g = detail::staggered_like(f);
    g.samples = detail::apply_taps_windowed(
        f.samples, detail::modulated_taps(f.size(), f.spacing, A, parity, eps));
    return g;
}

// Principal-value Hilbert transform: the zero-modulation special case, shared
// code path so the two agree bitwise.
inline SampledSignal1D discrete_hilbert(const SampledSignal1D& f) {
    detail::validate_signal(f, "discrete_hilbert");
    return modulated_transform(f, 0.0, Branch::odd, 1.0);
}

// Centered averages of |f| over radii dx, 2 dx, 4 dx, ... up to the window,
// maximized.  On the staggered grid the radius-r cells sit flush with the
// averaging interval, so plateaus are reproduced exactly.
inline SampledSignal1D hl_maximal(const SampledSignal1D& f) {
    detail::validate_signal(f, "hl_maximal");
    const long n = static_cast<long>(f.size());
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (long m = 0; m < n; ++m)
        prefix[static_cast<std::size_t>(m) + 1] =
            prefix[static_cast<std::size_t>(m)] + std::abs(f.samples[static_cast<std::size_t>(m)]);
    SampledSignal1D g = detail::staggered_like(f);
    for (long i = 0; i < n; ++i) {
        double best = 0.0;
        for (long r = 1;; r <<= 1) {
            const long lo = std::max(i + 1 - r, 0L);
            const long hi = std::min(i + r, n - 1);
            if (hi >= lo) {
                const double mass =
                    prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
                best = std::max(best, mass / (2.0 * static_cast<double>(r)));
            }
            if (r >= n) break;
        }
        g.samples[static_cast<std::size_t>(i)] = best;
    }
    return g;
}

// sup over dyadic truncations delta in {dx, 2 dx, ...} of |sum_{|y| > delta}
// f(x - y) / (k + 1/2)|.
inline SampledSignal1D maximal_hilbert(const SampledSignal1D& f) {
    detail::validate_signal(f, "maximal_hilbert");
    const std::size_t n = f.size();
    const long K = static_cast<long>(n) - 1;
    std::vector<complexd> taps = detail::modulated_taps(n, f.spacing, 0.0, Branch::odd, 1.0);
    SampledSignal1D g = detail::staggered_like(f);
    for (long r = 1; r < static_cast<long>(n); r <<= 1) {
        // drop the taps |k + 1/2| < r; the zeroed band only grows as r doubles
        for (long k = std::max(-r, -K); k <= std::min(r - 1, K); ++k)
            taps[static_cast<std::size_t>(k + K)] = complexd{0.0, 0.0};
        const auto conv = detail::apply_taps_windowed(f.samples, taps);
        for (std::size_t i = 0; i < n; ++i)
            g.samples[i] = std::max(g.samples[i].real(), std::abs(conv[i]));
    }
    return g;
}

// Pointwise sup over a modulation grid of |modulated_transform|.  The forward
// transform of the padded signal is shared across the grid, so a singleton
// grid reproduces one transform exactly.
inline SampledSignal1D carleson_maximal(const SampledSignal1D& f,
                                        const std::vector<double>& A_grid, Branch parity,
                                        double eps) {
    detail::validate_signal(f, "carleson_maximal");
    detail::validate_modulation(eps, "carleson_maximal");
    if (A_grid.empty())
        throw std::invalid_argument("carleson_maximal: modulation grid is empty");
    for (double A : A_grid)
        if (!(A >= 0.0) || !std::isfinite(A))
            throw std::invalid_argument("carleson_maximal: modulations must be finite and nonnegative");

    const std::size_t n = f.size();
    const std::size_t tl = 2 * n - 1;
    const std::size_t p = next_pow2(n + tl - 1);
    std::vector<complexd> fa(p, complexd{0.0, 0.0});
    std::copy(f.samples.begin(), f.samples.end(), fa.begin());
    fa = dft(std::move(fa));

    SampledSignal1D g = detail::staggered_like(f);
    for (double A : A_grid) {
        std::vector<complexd> fb(p, complexd{0.0, 0.0});
        const auto taps = detail::modulated_taps(n, f.spacing, A, parity, eps);
        std::copy(taps.begin(), taps.end(), fb.begin());
        fb = dft(std::move(fb));
        for (std::size_t i = 0; i < p; ++i) fb[i] *= fa[i];
        fb = idft(std::move(fb));
        for (std::size_t i = 0; i < n; ++i)
            g.samples[i] = std::max(g.samples[i].real(), std::abs(fb[i + n - 1]));
    }
    return g;
}

namespace detail {

inline void validate_field(const SampledSignal1D& f, const ModulationField& A,
                           const char* who) {
    if (A.values.size() != f.size())
        throw std::invalid_argument(std::string(who) +
                                    ": modulation field must align with the signal grid");
    for (double v : A.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(who) +
                                        ": modulation field must be positive and finite");
}

// Annulus pieces int e^{i A branch(y)|y|^eps} psi_j(A^{1/eps} y) f(x - y) dy/y
// summed over scales j in [j_lo, j_hi] at one staggered output point.  The
// ascent stops on its own once the annulus drops below the smallest tap, so
// j_hi = INT_MAX means "all fine scales".
inline complexd scale_band_at(const SampledSignal1D& f, double A, double eps,
                              Branch parity, int j_lo, int j_hi, long i,
                              const BumpSystem& sys) {
    const double dx = f.spacing;
    const long n = static_cast<long>(f.size());
    const double a = std::pow(A, 1.0 / eps);
    complexd acc{0.0, 0.0};
    for (int j = j_lo; j <= j_hi; ++j) {
        const double r_hi = std::exp2(static_cast<double>(-j + 1)) / a;
        if (r_hi < 0.5 * dx) break;
        const double r_lo = std::exp2(static_cast<double>(-j - 1)) / a;
        const long kmin = std::max(0L, static_cast<long>(std::ceil(r_lo / dx - 0.5 - 1e-12)));
        const long kmax = static_cast<long>(std::floor(r_hi / dx - 0.5 + 1e-12));
        for (long k = kmin; k <= kmax; ++k) {
            const double kh = static_cast<double>(k) + 0.5;
            const double y = kh * dx;
            const double w = sys.psi(std::exp2(static_cast<double>(j)) * a * y);
            if (w == 0.0) continue;
            const double ph = A * fpow(y, eps);
            complexd term{0.0, 0.0};
            const long mp = i - k;
            const long mn = i + 1 + k;
            if (mp >= 0 && mp < n)
                term += std::polar(1.0, ph) * f.samples[static_cast<std::size_t>(mp)];
            if (mn >= 0 && mn < n)
                term -= std::polar(1.0, parity == Branch::odd ? -ph : ph) *
                        f.samples[static_cast<std::size_t>(mn)];
            acc += (w / kh) * term;
        }
    }
    return acc;
}

}

struct HighLowSplit {
    SampledSignal1D high;   // scales j >= 1
    SampledSignal1D low;    // scales -J <= j <= 0
};

// Scale decomposition of the modulated transform against a pointwise
// modulation field: each output point x uses A(x) in both the phase and the
// dilation of the bump.  With a constant field and the coarse cutoff J beyond
// the data window, high + low telescopes back to modulated_transform.
inline HighLowSplit high_low_split(const SampledSignal1D& f, const ModulationField& A,
                                   double eps, Branch parity, int J) {
    detail::validate_signal(f, "high_low_split");
    detail::validate_modulation(eps, "high_low_split");
    detail::validate_field(f, A, "high_low_split");
    if (J < 1) throw std::invalid_argument("high_low_split: J must be at least 1");

    const BumpSystem sys = make_bump_system(2.0);
    HighLowSplit out;
    out.high = detail::staggered_like(f);
    out.low = detail::staggered_like(f);
    const long n = static_cast<long>(f.size());
    for (long i = 0; i < n; ++i) {
        const double Ai = A.values[static_cast<std::size_t>(i)];
        out.high.samples[static_cast<std::size_t>(i)] = detail::scale_band_at(
            f, Ai, eps, parity, 1, std::numeric_limits<int>::max(), i, sys);
        out.low.samples[static_cast<std::size_t>(i)] =
            detail::scale_band_at(f, Ai, eps, parity, -J, 0, i, sys);
    }
    return out;
}

// One scale piece at constant modulation, on the full output range
// [-K, n-1+K] so nothing of the annulus is lost; used by the norm sweeps.
inline SampledSignal1D scale_transform(const SampledSignal1D& f, double A, Branch parity,
                                       double eps, int j) {
    detail::validate_signal(f, "scale_transform");
    detail::validate_modulation(eps, "scale_transform");
    if (!(A > 0.0) || !std::isfinite(A))
        throw std::invalid_argument("scale_transform: A must be positive and finite");

    const double dx = f.spacing;
    const double a = std::pow(A, 1.0 / eps);
    const double r_hi = std::exp2(static_cast<double>(-j + 1)) / a;
    const long K = std::max(1L, static_cast<long>(std::ceil(r_hi / dx + 0.5)));
    if (K > (1L << 24))
        throw std::runtime_error("scale_transform: tap range too large for this grid");

    const BumpSystem sys = make_bump_system(2.0);
    std::vector<complexd> taps(static_cast<std::size_t>(2 * K + 1), complexd{0.0, 0.0});
    for (long k = -K; k <= K; ++k) {
        const double kh = static_cast<double>(k) + 0.5;
        const double y = kh * dx;
        const double w = sys.psi(std::exp2(static_cast<double>(j)) * a * std::fabs(y));
        if (w == 0.0) continue;
        double phase = A * detail::fpow(std::fabs(y), eps);
        if (parity == Branch::odd && y < 0.0) phase = -phase;
        taps[static_cast<std::size_t>(k + K)] = w * std::polar(1.0, phase) / kh;
    }

    SampledSignal1D g;
    g.spacing = dx;
    g.origin = f.origin + (0.5 - static_cast<double>(K)) * dx;
    g.samples = detail::convolve_taps(f.samples, taps);
    return g;
}

struct DominationReport {
    double constant = 0.0;   // smallest admissible C: the largest observed ratio
    double at_x = 0.0;       // where it is attained
    bool violated = false;   // high piece alive where both majorants vanish
};

// Pointwise check |high(x)| <= C (M f(x) + H* f(x)) for the fine-scale piece
// against the averaging and maximal-truncation operators on the same
// staggered grid.
inline DominationReport domination_check(const SampledSignal1D& f, const ModulationField& A,
                                         double eps, Branch parity) {
    detail::validate_signal(f, "domination_check");
    detail::validate_modulation(eps, "domination_check");
    detail::validate_field(f, A, "domination_check");

    const BumpSystem sys = make_bump_system(2.0);
    const long n = static_cast<long>(f.size());
    std::vector<double> high(static_cast<std::size_t>(n), 0.0);
    double high_max = 0.0;
    for (long i = 0; i < n; ++i) {
        const double v = std::abs(detail::scale_band_at(
            f, A.values[static_cast<std::size_t>(i)], eps, parity, 1,
            std::numeric_limits<int>::max(), i, sys));
        high[static_cast<std::size_t>(i)] = v;
        high_max = std::max(high_max, v);
    }

    const SampledSignal1D m = hl_maximal(f);
    const SampledSignal1D h = maximal_hilbert(f);
    double rhs_max = 0.0;
    for (long i = 0; i < n; ++i)
        rhs_max = std::max(rhs_max, m.samples[static_cast<std::size_t>(i)].real() +
                                        h.samples[static_cast<std::size_t>(i)].real());

    DominationReport rep;
    const double rhs_floor = 1e-12 * std::max(rhs_max, 1e-300);
    const double lhs_floor = 1e-10 * std::max(high_max, 1.0);
    for (long i = 0; i < n; ++i) {
        const double rhs = m.samples[static_cast<std::size_t>(i)].real() +
                           h.samples[static_cast<std::size_t>(i)].real();
        const double lhs = high[static_cast<std::size_t>(i)];
        if (rhs > rhs_floor) {
            const double ratio = lhs / rhs;
            if (ratio > rep.constant) {
                rep.constant = ratio;
                rep.at_x = m.x(static_cast<std::size_t>(i));
            }
        } else if (lhs > lhs_floor) {
            rep.violated = true;
        }
    }
    return rep;
}

struct RatioSweep {
    std::vector<double> ratios;
    double max_ratio = 0.0;
};

// L2 ratio ||T_j f|| / ||f|| maximized over seeded draws of test functions
// and constant modulations with A^{1/eps} log-uniform in [1/2, 2].  The grid
// is refined per draw so the kernel phase advances at most a quarter radian
// per tap.
inline RatioSweep single_scale_norm(double eps, Branch parity, int j,
                                    std::size_t trials = 20, std::uint64_t seed = 1) {
    detail::validate_modulation(eps, "single_scale_norm");
    if (trials < 20)
        throw std::invalid_argument("single_scale_norm: need at least 20 trials");
    if (j > 4 || j < -14)
        throw std::invalid_argument("single_scale_norm: scale index out of supported range");

    Rng rng(seed);
    RatioSweep out;
    out.ratios.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        const double a = rng.log_uniform(0.5, 2.0);
        const double A = std::pow(a, eps);
        const double r_lo = std::exp2(static_cast<double>(-j - 1)) / a;
        const double r_hi = std::exp2(static_cast<double>(-j + 1)) / a;
        const double phimax =
            std::fabs(eps) * A *
            std::max(detail::fpow(r_lo, eps - 1.0), detail::fpow(r_hi, eps - 1.0));
        const double dx = std::min(0.05, 0.25 / std::max(phimax, 1e-9));
        const double half_width = 20.0;
        const std::size_t nf = static_cast<std::size_t>(std::llround(2.0 * half_width / dx));
        if (static_cast<double>(nf) + 2.0 * r_hi / dx > 1.8e7)
            throw std::runtime_error("single_scale_norm: grid too large at this scale");
        SampledSignal1D grid = make_signal(-half_width, dx, nf);
        const SampledSignal1D fn = testfn::draw(grid, rng, t);
        const double denom = fn.l2();
        if (!(denom > 0.0)) {
            out.ratios.push_back(0.0);
            continue;
        }
        const SampledSignal1D g = scale_transform(fn, A, parity, eps, j);
        const double r = g.l2() / denom;
        out.ratios.push_back(r);
        out.max_ratio = std::max(out.max_ratio, r);
    }
    return out;
}

// L2 ratio ||sup_A |T_A f||| / ||f|| maximized over seeded draws; every
// fourth draw is a windowed exponential with frequency approaching the
// linear-phase blow-up point, so symbol growth shows up in the estimate.
inline RatioSweep norm_estimate(double eps, Branch parity,
                                const std::vector<double>& A_grid,
                                std::size_t trials = 50, std::uint64_t seed = 1) {
    detail::validate_modulation(eps, "norm_estimate");
    if (trials < 50)
        throw std::invalid_argument("norm_estimate: need at least 50 trials");
    if (A_grid.empty())
        throw std::invalid_argument("norm_estimate: modulation grid is empty");
    for (double A : A_grid)
        if (!(A >= 0.0) || !std::isfinite(A))
            throw std::invalid_argument("norm_estimate: modulations must be finite and nonnegative");

    const double half_width = 160.0;
    const double dx = 0.04;
    const std::size_t n = static_cast<std::size_t>(std::llround(2.0 * half_width / dx));
    SampledSignal1D grid = make_signal(-half_width, dx, n);

    Rng rng(seed);
    RatioSweep out;
    out.ratios.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        SampledSignal1D f;
        if (t % 4 == 3) {
            const int k = 2 + static_cast<int>((t / 4) % 3);
            f = testfn::windowed_exponential(grid, 1.0 - std::ldexp(1.0, -k));
        } else {
            f = testfn::draw(grid, rng, t);
        }
        const double denom = f.l2();
        if (!(denom > 0.0)) {
            out.ratios.push_back(0.0);
            continue;
        }
        const double r = carleson_maximal(f, A_grid, parity, eps).l2() / denom;
        out.ratios.push_back(r);
        out.max_ratio = std::max(out.max_ratio, r);
    }
    return out;
}

// Log-spaced positive modulation grid covering [2^-20, 2^20], the default
// sweep range for the maximal estimates.
inline std::vector<double> default_modulation_grid(int per_decade = 48) {
    if (per_decade < 1)
        throw std::invalid_argument("default_modulation_grid: need at least 1 point per decade");
    const double lo = std::exp2(-20.0), hi = std::exp2(20.0);
    const double decades = std::log10(hi / lo);
    const int count = static_cast<int>(std::ceil(per_decade * decades)) + 1;
    std::vector<double> grid(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        grid[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    return grid;
}

}
