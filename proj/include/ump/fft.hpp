#pragma once

#include <complex>
#include <vector>

#include "ump/grid.hpp"

namespace ump {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. inverse=true applies the 1/N factor.
inline void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        const cdouble wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cdouble u = a[i + k];
                cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

// O(N^2) fallback for non power-of-two sizes (rare: user-overridden grids).
inline void dft_naive(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    std::vector<cdouble> out(n, cdouble(0.0, 0.0));
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            double ang = sgn * kTwoPi * static_cast<double>(k * j % n) / static_cast<double>(n);
            out[k] += a[j] * cdouble(std::cos(ang), std::sin(ang));
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : out) x *= inv;
    }
    a = std::move(out);
}

} // namespace detail

// Discrete Fourier transform, convention F_k = sum_j f_j exp(-2*pi*i*j*k/N).
inline void fft(std::vector<cdouble>& a) {
    if (detail::is_pow2(a.size())) detail::fft_pow2(a, false);
    else detail::dft_naive(a, false);
}

inline void ifft(std::vector<cdouble>& a) {
    if (detail::is_pow2(a.size())) detail::fft_pow2(a, true);
    else detail::dft_naive(a, true);
}

// Fourier-series coefficients a_m of samples f(lambda_j) on a PeriodicGrid,
// indexed m = -M/2 .. M/2-1 via the returned vector c with c[wrap(m)] = a_m:
// f(lambda) = sum_m a_m exp(i*m*lambda). The (-1)^m factor accounts for the
// grid starting at -pi rather than 0.
inline std::vector<cdouble> fourier_coefficients(const PeriodicGrid& g,
                                                 const std::vector<cdouble>& samples) {
    std::vector<cdouble> c(samples);
    fft(c);
    const int m = g.size();
    const double inv = 1.0 / m;
    for (int k = 0; k < m; ++k) {
        // sign = (-1)^m for mode m congruent to k; parity of k equals parity of m
        // whether or not k is folded by M (M even).
        double s = (k % 2 == 0) ? 1.0 : -1.0;
        c[k] *= s * inv;
    }
    return c;
}

// Signed mode number for bin k of an M-point transform: m in [-M/2, M/2).
inline int signed_mode(int k, int m) { return (k < m / 2) ? k : k - m; }

} // namespace ump
