#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "twc/grid.hpp"

namespace twc {

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by Newton
// iteration on the Legendre recurrence.
struct GaussRule {
    std::vector<double> x, w;

    explicit GaussRule(int order) {
        x.resize(std::size_t(order));
        w.resize(std::size_t(order));
        const int n = order;
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double t = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
            double p0 = 0, p1 = 0;
            for (int it = 0; it < 100; ++it) {
                p0 = 1.0; p1 = 0.0;
                for (int k = 0; k < n; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k + 1.0) * t * p1 - double(k) * p2) / double(k + 1);
                }
                const double dp = double(n) * (t * p0 - p1) / (t * t - 1.0);
                const double dt = p0 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-15) break;
            }
            p0 = 1.0; p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - double(k) * p2) / double(k + 1);
            }
            const double dp = double(n) * (t * p0 - p1) / (t * t - 1.0);
            x[std::size_t(i)] = -t;
            x[std::size_t(n - 1 - i)] = t;
            w[std::size_t(i)] = w[std::size_t(n - 1 - i)] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }

    static const GaussRule& order16() { static const GaussRule r(16); return r; }
    static const GaussRule& order12() { static const GaussRule r(12); return r; }
};

// A fixed panelization of [a, b]: GL-16 per panel, panels no longer than
// max_panel and split at the supplied breakpoints. Panel length is chosen so
// that omega_max * len stays below ~8 rad, which keeps GL-16 at roundoff
// accuracy on integrands exp(i*omega*x) * smooth.
struct PanelGrid {
    std::vector<double> nodes, weights;

    PanelGrid(double a, double b, double omega_max,
              const std::vector<double>& breakpoints = {}, int order = 16) {
        if (!(b > a)) return;
        std::vector<double> cuts{a, b};
        for (double c : breakpoints)
            if (c > a && c < b) cuts.push_back(c);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        const double cap = omega_max > 1e-12 ? 8.0 / omega_max : (b - a);
        const GaussRule rule(order);
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double lo = cuts[s], hi = cuts[s + 1];
            const int m = std::max(1, int(std::ceil((hi - lo) / cap)));
            const double step = (hi - lo) / double(m);
            for (int p = 0; p < m; ++p) {
                const double pa = lo + p * step, pb = pa + step;
                const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
                for (std::size_t q = 0; q < rule.x.size(); ++q) {
                    nodes.push_back(mid + half * rule.x[q]);
                    weights.push_back(half * rule.w[q]);
                }
            }
        }
    }

    template <class F>
    cplx integrate(F&& f) const {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Closed form of I_m(c; a, b) = integral_a^b t^m exp(c t) dt for complex c,
// m <= max_m. Uses the by-parts recursion when |c|(b-a) is large enough and a
// Taylor series otherwise (the recursion cancels badly for small |c|).
inline void poly_exp_integrals(cplx c, double a, double b, int max_m, cplx* out) {
    const double scale = std::abs(c) * std::max(std::abs(a), std::abs(b));
    if (scale < 0.5) {
        // I_m = sum_k c^k (b^{m+k+1} - a^{m+k+1}) / (k! (m+k+1))
        for (int m = 0; m <= max_m; ++m) {
            cplx term(1.0, 0.0), acc(0.0, 0.0);
            double pb = std::pow(b, m + 1), pa = std::pow(a, m + 1);
            for (int k = 0; k < 40; ++k) {
                acc += term * (pb - pa) / double(m + k + 1);
                pb *= b; pa *= a;
                term *= c / double(k + 1);
                if (std::abs(term) * (std::abs(pb) + std::abs(pa)) < 1e-18) break;
            }
            out[m] = acc;
        }
        return;
    }
    const cplx ea = std::exp(c * a), eb = std::exp(c * b);
    out[0] = (eb - ea) / c;
    double pa = 1.0, pb = 1.0;
    for (int m = 1; m <= max_m; ++m) {
        pa *= a; pb *= b;
        out[m] = (pb * eb - pa * ea) / c - double(m) * out[m - 1] / c;
    }
}

} // namespace twc
