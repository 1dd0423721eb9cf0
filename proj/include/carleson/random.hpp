#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "carleson/fft.hpp"
#include "carleson/signal.hpp"

namespace carleson {

// Deterministic generator: raw mt19937_64 words mapped by ldexp, so streams
// are identical across platforms and standard-library versions.
struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform() { return std::ldexp(static_cast<double>(eng()), -64); }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }
    double normal() {
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double pi = 3.14159265358979323846;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    }
    complexd cnormal() { return {normal(), normal()}; }
};

// Seeded test-function families on a fixed grid.  Every family tapers to zero
// at the window edges so that the implicit zero-extension of the discrete
// operators stays faithful.
namespace testfn {

inline double cosine_taper(double x, double lo, double hi, double margin) {
    const double pi = 3.14159265358979323846;
    if (x <= lo || x >= hi) return 0.0;
    const double dl = x - lo, dr = hi - x;
    double w = 1.0;
    if (dl < margin) w *= 0.5 * (1.0 - std::cos(pi * dl / margin));
    if (dr < margin) w *= 0.5 * (1.0 - std::cos(pi * dr / margin));
    return w;
}

// Gaussian bump with random center, width and modulation.
inline SampledSignal1D gaussian(const SampledSignal1D& grid, Rng& rng) {
    SampledSignal1D f = grid;
    const double lo = f.x(0), hi = f.x(f.size() - 1);
    const double span = hi - lo;
    const double c = rng.uniform(lo + 0.3 * span, hi - 0.3 * span);
    const double s = rng.log_uniform(0.02 * span, 0.1 * span);
    const double w = rng.uniform(-4.0, 4.0) / s;
    const double margin = 0.1 * span;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.x(i);
        const double g = std::exp(-0.5 * (x - c) * (x - c) / (s * s));
        f.samples[i] = g * cosine_taper(x, lo, hi, margin) * std::polar(1.0, w * x);
    }
    return f;
}

// Compactly supported cosine-squared bump with modulation.
inline SampledSignal1D modulated_bump(const SampledSignal1D& grid, Rng& rng) {
    SampledSignal1D f = grid;
    const double lo = f.x(0), hi = f.x(f.size() - 1);
    const double span = hi - lo;
    const double c = rng.uniform(lo + 0.35 * span, hi - 0.35 * span);
    const double r = rng.log_uniform(0.05 * span, 0.25 * span);
    const double w = rng.uniform(-8.0, 8.0) / r;
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.x(i);
        if (std::fabs(x - c) >= r) {
            f.samples[i] = 0.0;
            continue;
        }
        const double b = std::cos(0.5 * pi * (x - c) / r);
        f.samples[i] = b * b * std::polar(1.0, w * x);
    }
    return f;
}

// Band-limited noise: random coefficients on the lowest frequency shells,
// tapered at the window edges.
inline SampledSignal1D bandlimited_noise(const SampledSignal1D& grid, Rng& rng,
                                         std::size_t modes = 24) {
    SampledSignal1D f = grid;
    const std::size_t n = f.size();
    const std::size_t p = next_pow2(n);
    std::vector<complexd> spec(p, complexd{0.0, 0.0});
    const std::size_t m = std::min(modes, p / 2 - 1);
    for (std::size_t q = 0; q <= m; ++q) {
        spec[q] = rng.cnormal();
        if (q != 0) spec[p - q] = rng.cnormal();
    }
    auto phys = idft(spec);
    const double lo = f.x(0), hi = f.x(n - 1);
    const double margin = 0.15 * (hi - lo);
    for (std::size_t i = 0; i < n; ++i)
        f.samples[i] = phys[i] * cosine_taper(f.x(i), lo, hi, margin);
    return f;
}

// Windowed complex exponential e^{i lambda x}; the probe family for
// multiplier-driven growth.
inline SampledSignal1D windowed_exponential(const SampledSignal1D& grid,
                                            double lambda, double margin_frac = 0.15) {
    SampledSignal1D f = grid;
    const double lo = f.x(0), hi = f.x(f.size() - 1);
    const double margin = margin_frac * (hi - lo);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.x(i);
        f.samples[i] = cosine_taper(x, lo, hi, margin) * std::polar(1.0, lambda * x);
    }
    return f;
}

// Dispatch one of the three random families, cycling deterministically.
inline SampledSignal1D draw(const SampledSignal1D& grid, Rng& rng, std::size_t trial) {
    switch (trial % 3) {
        case 0: return gaussian(grid, rng);
        case 1: return modulated_bump(grid, rng);
        default: return bandlimited_noise(grid, rng);
    }
}

}

}
