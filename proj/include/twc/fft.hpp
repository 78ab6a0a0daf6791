#pragma once

#include <vector>

#include "twc/grid.hpp"

namespace twc {

// In-place iterative radix-2 FFT. sign = -1: forward (e^{-2pi i}), +1: inverse
// without the 1/n factor.
inline void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = double(sign) * 2.0 * pi / double(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

inline void ifft_pow2_normalized(std::vector<cplx>& a) {
    fft_pow2(a, +1);
    const double s = 1.0 / double(a.size());
    for (auto& v : a) v *= s;
}

// Chirp-z evaluation (Bluestein): given u[0..n-1] and unit-phase steps
// w(m) = exp(i*theta(m)) with theta(m) = theta_quad * m^2 supplied through a
// callable (so the caller can reduce the angle exactly), returns
//   out[c - c_lo] = sum_i u[i] * exp(i * 2 * theta_quad * i * c)
// for c in [c_lo, c_hi]. Uses the identity 2ic = i^2 + c^2 - (c - i)^2.
template <class ChirpFn>
std::vector<cplx> chirp_eval(const std::vector<cplx>& u, long c_lo, long c_hi,
                             ChirpFn chirp /* m -> exp(i*theta_quad*m^2) */) {
    const long n = long(u.size());
    const long m_lo = c_lo - (n - 1), m_hi = c_hi; // range of c - i
    const long conv_len = (n) + (m_hi - m_lo + 1) - 1;
    std::size_t N = 1;
    while (long(N) < conv_len) N <<= 1;

    std::vector<cplx> A(N, cplx(0.0, 0.0)), B(N, cplx(0.0, 0.0));
    for (long i = 0; i < n; ++i) A[std::size_t(i)] = u[std::size_t(i)] * chirp(i);
    for (long m = m_lo; m <= m_hi; ++m) B[std::size_t(m - m_lo)] = std::conj(chirp(m));

    fft_pow2(A, -1);
    fft_pow2(B, -1);
    for (std::size_t k = 0; k < N; ++k) A[k] *= B[k];
    ifft_pow2_normalized(A);

    std::vector<cplx> out(std::size_t(c_hi - c_lo + 1));
    for (long c = c_lo; c <= c_hi; ++c) {
        // A holds the linear convolution a * b at shift (c - m_lo)
        out[std::size_t(c - c_lo)] = chirp(c) * A[std::size_t(c - m_lo)];
    }
    return out;
}

} // namespace twc
