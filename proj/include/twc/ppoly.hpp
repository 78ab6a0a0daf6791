#pragma once

#include <algorithm>
#include <vector>

#include "twc/grid.hpp"
#include "twc/quadrature.hpp"

namespace twc {

// Piecewise polynomial on [knots.front(), knots.back()], zero outside.
// Piece i holds monomial coefficients in the local variable s = t - knots[i],
// which keeps the poly*exp closed forms numerically stable far from the
// origin.
struct PiecewisePoly {
    std::vector<double> knots;                 // size P+1, increasing
    std::vector<std::vector<double>> pieces;   // size P, coeffs low->high

    bool empty() const { return pieces.empty(); }
    double lo() const { return knots.front(); }
    double hi() const { return knots.back(); }

    double eval(double t) const {
        if (empty() || t < lo() || t > hi()) return 0.0;
        std::size_t i = std::size_t(std::upper_bound(knots.begin(), knots.end(), t) - knots.begin());
        if (i > 0) --i;
        if (i >= pieces.size()) i = pieces.size() - 1;
        const double s = t - knots[i];
        double acc = 0.0;
        for (std::size_t m = pieces[i].size(); m-- > 0;) acc = acc * s + pieces[i][m];
        return acc;
    }

    // integral of p(t)^2 dt (exact per-piece coefficient arithmetic)
    double mass2() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const auto& c = pieces[i];
            const double len = knots[i + 1] - knots[i];
            std::vector<double> sq(2 * c.size() - 1, 0.0);
            for (std::size_t a = 0; a < c.size(); ++a)
                for (std::size_t b = 0; b < c.size(); ++b) sq[a + b] += c[a] * c[b];
            double p = len;
            for (std::size_t m = 0; m < sq.size(); ++m) { acc += sq[m] * p / double(m + 1); p *= len; }
        }
        return acc;
    }

    PiecewisePoly scaled(double factor) const {
        PiecewisePoly out = *this;
        for (auto& pc : out.pieces)
            for (auto& c : pc) c *= factor;
        return out;
    }

    // integral over [a,b] of p(t) * exp(c t) dt, closed form
    cplx exp_integral(cplx c, double a, double b) const {
        if (empty()) return cplx(0, 0);
        a = std::max(a, lo());
        b = std::min(b, hi());
        if (!(b > a)) return cplx(0, 0);
        cplx acc(0, 0);
        cplx ints[16];
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            const double plo = std::max(a, knots[i]), phi = std::min(b, knots[i + 1]);
            if (!(phi > plo)) continue;
            const auto& coef = pieces[i];
            // local var s = t - knots[i]; exp(c t) = exp(c knots[i]) exp(c s)
            poly_exp_integrals(c, plo - knots[i], phi - knots[i], int(coef.size()) - 1, ints);
            cplx piece(0, 0);
            for (std::size_t m = 0; m < coef.size(); ++m) piece += coef[m] * ints[m];
            acc += piece * std::exp(c * knots[i]);
        }
        return acc;
    }

    // Fourier transform over [a,b]: integral p(t) exp(-2 pi i f t) dt
    cplx ft_window(double f, double a, double b) const {
        return exp_integral(cplx(0.0, -2.0 * pi * f), a, b);
    }
    cplx ft(double f) const { return empty() ? cplx(0, 0) : ft_window(f, lo(), hi()); }
};

namespace detail {

// coefficients of q(s) = p(s + d) given coefficients of p
inline std::vector<double> poly_recenter(const std::vector<double>& p, double d) {
    std::vector<double> out(p.size(), 0.0);
    // Horner-style Taylor shift
    for (std::size_t m = p.size(); m-- > 0;) {
        for (std::size_t k = out.size(); k-- > 1;) out[k] = out[k - 1] + d * out[k];
        out[0] = p[m] + d * out[0];
        // maintain: after processing m, out holds coeffs of sum_{j>=m} p_j (s+d)^{j-m}
    }
    return out;
}

} // namespace detail

// Pointwise product p(t) * q(t + shift), as a piecewise polynomial in t.
inline PiecewisePoly ppoly_product_shifted(const PiecewisePoly& p, const PiecewisePoly& q,
                                           double shift) {
    PiecewisePoly out;
    if (p.empty() || q.empty()) return out;
    const double lo = std::max(p.lo(), q.lo() - shift);
    const double hi = std::min(p.hi(), q.hi() - shift);
    if (!(hi > lo)) return out;
    std::vector<double> cuts;
    for (double k : p.knots)
        if (k > lo - 1e-14 && k < hi + 1e-14) cuts.push_back(std::clamp(k, lo, hi));
    for (double k : q.knots) {
        const double t = k - shift;
        if (t > lo - 1e-14 && t < hi + 1e-14) cuts.push_back(std::clamp(t, lo, hi));
    }
    cuts.push_back(lo);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-13; }),
               cuts.end());
    out.knots = cuts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double t0 = cuts[i], mid = 0.5 * (cuts[i] + cuts[i + 1]);
        // locate source pieces at the midpoint
        std::size_t ip = std::size_t(std::upper_bound(p.knots.begin(), p.knots.end(), mid) -
                                     p.knots.begin()) - 1;
        std::size_t iq = std::size_t(std::upper_bound(q.knots.begin(), q.knots.end(), mid + shift) -
                                     q.knots.begin()) - 1;
        ip = std::min(ip, p.pieces.size() - 1);
        iq = std::min(iq, q.pieces.size() - 1);
        // recenter both to local var s = t - t0
        const auto a = detail::poly_recenter(p.pieces[ip], t0 - p.knots[ip]);
        const auto b = detail::poly_recenter(q.pieces[iq], t0 + shift - q.knots[iq]);
        std::vector<double> prod(a.size() + b.size() - 1, 0.0);
        for (std::size_t m = 0; m < a.size(); ++m)
            for (std::size_t k = 0; k < b.size(); ++k) prod[m + k] += a[m] * b[k];
        out.pieces.push_back(std::move(prod));
    }
    return out;
}

// p(t + s): knots move by -s, local coefficients are untouched
inline PiecewisePoly ppoly_shift_arg(const PiecewisePoly& p, double s) {
    PiecewisePoly out = p;
    for (double& k : out.knots) k -= s;
    return out;
}

// p(c t) for c > 0: knots divide by c, local coefficient m picks up c^m
inline PiecewisePoly ppoly_scale_arg(const PiecewisePoly& p, double c) {
    PiecewisePoly out = p;
    for (double& k : out.knots) k /= c;
    for (auto& piece : out.pieces) {
        double f = 1.0;
        for (double& coef : piece) { coef *= f; f *= c; }
    }
    return out;
}

// Cardinal B-spline of the given order (degree order-1, C^{order-2}) mapped
// onto [lo, hi] and scaled to unit L^2 norm when normalize is set.
inline PiecewisePoly bspline_profile(int order, double lo, double hi, bool normalize = true) {
    // B_order on [0, order] via truncated powers, pieces on unit knots
    const int p = order;
    auto binom = [](int n, int k) {
        double v = 1.0;
        for (int i = 1; i <= k; ++i) v = v * double(n - k + i) / double(i);
        return v;
    };
    double fact = 1.0;
    for (int i = 2; i <= p - 1; ++i) fact *= double(i);
    PiecewisePoly base;
    base.knots.resize(std::size_t(p) + 1);
    for (int k = 0; k <= p; ++k) base.knots[std::size_t(k)] = double(k);
    for (int k = 0; k < p; ++k) {
        // piece on [k, k+1], local s = t - k: sum_{i<=k} (-1)^i C(p,i) (s + k - i)^{p-1} / (p-1)!
        std::vector<double> coef(std::size_t(p), 0.0);
        for (int i = 0; i <= k; ++i) {
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            const double c = sign * binom(p, i) / fact;
            const double d = double(k - i);
            // expand (s + d)^{p-1}
            double dp = 1.0;
            for (int m = p - 1; m >= 0; --m) {
                coef[std::size_t(m)] += c * binom(p - 1, m) * dp;
                dp *= d;
            }
        }
        base.pieces.push_back(std::move(coef));
    }
    // map [0,p] -> [lo,hi]: t = lo + (hi-lo) u / p; local vars rescale
    const double scale = (hi - lo) / double(p);
    PiecewisePoly out;
    out.knots.resize(base.knots.size());
    for (std::size_t i = 0; i < base.knots.size(); ++i) out.knots[i] = lo + base.knots[i] * scale;
    for (auto& pc : base.pieces) {
        std::vector<double> coef(pc.size());
        double s = 1.0;
        for (std::size_t m = 0; m < pc.size(); ++m) { coef[m] = pc[m] / s; s *= scale; }
        out.pieces.push_back(std::move(coef));
    }
    if (normalize) {
        const double nrm = std::sqrt(out.mass2());
        out = out.scaled(1.0 / nrm);
    }
    return out;
}

} // namespace twc
