#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace carleson {

using complexd = std::complex<double>;

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace detail {

// Iterative radix-2 transform, sign = -1 forward / +1 inverse (unnormalized).
inline void fft_pow2(std::vector<complexd>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / static_cast<double>(len);
        const complexd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            complexd w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const complexd u = a[i + k];
                const complexd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}

// Unnormalized DFT: X[q] = sum_k x[k] e^{-2 pi i q k / n}.  Power-of-two
// lengths go through the fast transform, anything else through the direct sum.
inline std::vector<complexd> dft(std::vector<complexd> x) {
    const std::size_t n = x.size();
    if (n == 0) return x;
    if ((n & (n - 1)) == 0) {
        detail::fft_pow2(x, -1);
        return x;
    }
    std::vector<complexd> out(n);
    const double pi = 3.14159265358979323846;
    for (std::size_t q = 0; q < n; ++q) {
        complexd s{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = -2.0 * pi * static_cast<double>(q) *
                               static_cast<double>(k) / static_cast<double>(n);
            s += x[k] * complexd(std::cos(ang), std::sin(ang));
        }
        out[q] = s;
    }
    return out;
}

// Inverse of dft (includes the 1/n normalization).
inline std::vector<complexd> idft(std::vector<complexd> x) {
    const std::size_t n = x.size();
    if (n == 0) return x;
    if ((n & (n - 1)) == 0) {
        detail::fft_pow2(x, +1);
        for (auto& v : x) v /= static_cast<double>(n);
        return x;
    }
    std::vector<complexd> out(n);
    const double pi = 3.14159265358979323846;
    for (std::size_t q = 0; q < n; ++q) {
        complexd s{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            const double ang = 2.0 * pi * static_cast<double>(q) *
                               static_cast<double>(k) / static_cast<double>(n);
            s += x[k] * complexd(std::cos(ang), std::sin(ang));
        }
        out[q] = s / static_cast<double>(n);
    }
    return out;
}

// Circular convolution of equal-length sequences via the transform.
inline std::vector<complexd> circular_convolve(const std::vector<complexd>& a,
                                               const std::vector<complexd>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("circular_convolve: size mismatch");
    auto fa = dft(a);
    auto fb = dft(b);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    return idft(fa);
}

// Signed frequency of DFT bin q on an n-point grid with spacing dx:
// bins above n/2 alias to negative frequencies.
inline double bin_frequency(std::size_t q, std::size_t n, double dx) {
    const double pi = 3.14159265358979323846;
    const double qs = (q <= n / 2) ? static_cast<double>(q)
                                   : static_cast<double>(q) - static_cast<double>(n);
    return 2.0 * pi * qs / (static_cast<double>(n) * dx);
}

}
