#pragma once

// Test-side oracles, independent of the library's quadrature and kernel
// paths: adaptive Simpson integration, the closed-form Haar kernel factor,
// and the closed-form Haar Calderon term.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = 3.14159265358979323846264338327950288;

namespace detail {
template <class F>
cplx simpson_rec(const F& f, double a, double b, cplx fa, cplx fm, cplx fb, cplx whole,
                 double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const cplx flm = f(lm), frm = f(rm);
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const cplx delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}
} // namespace detail

// adaptive Simpson on [a, b]
template <class F>
cplx integrate(const F& f, double a, double b, double tol = 1e-12, int depth = 28) {
    if (!(b > a)) return cplx(0, 0);
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

// integrate with explicit split points (discontinuities)
template <class F>
cplx integrate_split(const F& f, std::vector<double> cuts, double tol = 1e-12) {
    std::sort(cuts.begin(), cuts.end());
    cplx acc(0, 0);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += integrate(f, cuts[i], cuts[i + 1], tol);
    return acc;
}

// Haar step on [0,1]: +1 on [0,1/2], -1 on (1/2,1], 0 elsewhere
inline double haar_chi(double t) {
    if (t < 0.0 || t >= 1.0) return 0.0;
    return t < 0.5 ? 1.0 : -1.0;
}

// m(beta) = integral_0^1 haar_chi(x) exp(2 pi i beta x) dx
//         = -(exp(i pi beta) - 1)^2 / (2 pi i beta)
inline cplx haar_m(double beta) {
    if (beta == 0.0) return cplx(0, 0);
    if (std::abs(beta) < 1e-6) {
        // -(e^u - 1)^2 / (2u) with u = i pi beta, expanded
        const cplx u(0.0, pi * beta);
        return -(u / 2.0) * (1.0 + u + 7.0 * u * u / 12.0);
    }
    const cplx e(std::cos(pi * beta), std::sin(pi * beta));
    return -(e - 1.0) * (e - 1.0) / cplx(0.0, 2.0 * pi * beta);
}

inline double haar_m_sq(double beta) {
    if (beta == 0.0) return 0.0;
    const double s = std::sin(0.5 * pi * beta);
    return 4.0 * s * s * s * s / (pi * pi * beta * beta);
}

// Closed-form Calderon term for the Haar family:
//   2^j * |m(2^{-j} eta)|^2  (xi-length of the band is exactly 1)
inline double haar_calderon_term(int j, double eta) {
    return std::ldexp(1.0, j) * haar_m_sq(std::ldexp(eta, -j));
}

// Closed-form spectral function of Haar psi_0 at lambda = 1 (sigma(eta) =
// |m(eta)|^2, band length 1 when the xi window contains it).
inline double haar_sigma(double eta) { return haar_m_sq(eta); }

} // namespace oracle
