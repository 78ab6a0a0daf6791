#pragma once

#include <memory>

#include "twc/dyadic.hpp"
#include "twc/field.hpp"
#include "twc/phase.hpp"
#include "twc/ppoly.hpp"

namespace twc {

// A field designed through its Weyl kernel: K^lambda(xi, eta) = v(xi) w(eta),
// where w is a smooth piecewise polynomial plus sharp indicator bands. The
// field itself is the closed-form inverse Weyl transform
//   g(x,y) = |lambda| exp(-i pi lambda x y) R(lambda x; y),
//   R(f; y) = integral v(t) w(t + y) exp(-2 pi i f t) dt,
// truncated to |x| < extent.
struct SeparableKernel {
    struct Band {
        double lo, hi, height;
    };

    Dyadic lambda;
    PiecewisePoly v;
    PiecewisePoly w_smooth; // may be empty
    std::vector<Band> bands;
    double extent = 0.0;
    // accumulated twisted-translate action: kernel values carry amp * e^{i mod_rate xi}
    cplx amp = cplx(1.0, 0.0);
    double mod_rate = 0.0;
    // x-truncation window of the underlying (untranslated) design; twisted
    // translation moves the field's box but maps back onto this window in the
    // kernel substitution, so it stays put under translation and only scales
    // under dilation
    double x_lo = 0.0, x_hi = 0.0;

    double w_lo() const {
        double lo = w_smooth.empty() ? 1e300 : w_smooth.lo();
        for (const auto& b : bands) lo = std::min(lo, b.lo);
        return lo;
    }
    double w_hi() const {
        double hi = w_smooth.empty() ? -1e300 : w_smooth.hi();
        for (const auto& b : bands) hi = std::max(hi, b.hi);
        return hi;
    }

    // R(f; y), closed form
    cplx row_transform(double f, double y) const {
        cplx acc(0, 0);
        const cplx c(0.0, -2.0 * pi * f);
        if (!w_smooth.empty()) {
            const PiecewisePoly prod = ppoly_product_shifted(v, w_smooth, y);
            if (!prod.empty()) acc += prod.exp_integral(c, prod.lo(), prod.hi());
        }
        for (const auto& b : bands) {
            const double lo = std::max(v.lo(), b.lo - y);
            const double hi = std::min(v.hi(), b.hi - y);
            if (hi > lo) acc += b.height * v.exp_integral(c, lo, hi);
        }
        return acc;
    }

    // exact designed kernel value
    cplx kernel_exact(double xi, double eta) const {
        double w = w_smooth.empty() ? 0.0 : w_smooth.eval(eta);
        for (const auto& b : bands)
            if (eta >= b.lo && eta < b.hi) w += b.height;
        return amp * unit_phase(mod_rate * xi) * (v.eval(xi) * w);
    }

    std::vector<double> row_breaks() const {
        std::vector<double> out;
        auto push_combo = [&](double wk) {
            out.push_back(wk - v.lo());
            out.push_back(wk - v.hi());
        };
        if (!w_smooth.empty())
            for (double k : w_smooth.knots) push_combo(k);
        for (const auto& b : bands) { push_combo(b.lo); push_combo(b.hi); }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Exact value of the x-truncated kernel integral
    //   K(xi, eta) = |lambda| integral_{x_lo}^{x_hi} g(x, eta - xi) e^{i pi lambda x (eta + xi)} dx
    //              = amp e^{i mod_rate xi} |lambda| integral rho_y(t) D(xi - t) dt,
    // where rho_y(t) = v(t) w(t + y), y = eta - xi and D is the window factor
    //   D(tau) = L e^{i pi lambda S tau} sinc(pi lambda L tau),
    //   L = x_hi - x_lo, S = x_hi + x_lo.
    // The row density is piecewise polynomial and D is entire, so GL-16
    // panels with rate * len <= 5 integrate this to roundoff.
    cplx kernel_truncated(double xi, double eta) const {
        const double y0 = eta - xi;
        const double lam = lambda.value();
        const double L = x_hi - x_lo, S = x_hi + x_lo;
        if (!(L > 0.0)) return cplx(0, 0);
        const double cL = pi * std::abs(lam) * L;
        const double cS = pi * lam * S;
        const double rate = cL + std::abs(cS);
        const GaussRule& rule = GaussRule::order16();
        cplx acc(0, 0);

        auto window = [&](double t) -> cplx {
            const double tau = xi - t;
            const double z = cL * tau;
            const double sinc = z == 0.0 ? 1.0 : std::sin(z) / z;
            return L * sinc * unit_phase(cS * tau);
        };
        auto add_piece = [&](const std::vector<double>& local, double t0, double plo, double phi) {
            const int m = std::max(1, int(std::ceil((phi - plo) * rate / 5.0)));
            const double step = (phi - plo) / double(m);
            cplx piece(0, 0);
            for (int p = 0; p < m; ++p) {
                const double a = plo + p * step;
                const double mid = a + 0.5 * step, half = 0.5 * step;
                for (std::size_t q = 0; q < rule.x.size(); ++q) {
                    const double t = mid + half * rule.x[q];
                    const double s = t - t0;
                    double pv = 0.0;
                    for (std::size_t k = local.size(); k-- > 0;) pv = pv * s + local[k];
                    piece += (half * rule.w[q] * pv) * window(t);
                }
            }
            acc += piece;
        };

        if (!w_smooth.empty() && y0 > w_smooth.lo() - v.hi() && y0 < w_smooth.hi() - v.lo()) {
            const PiecewisePoly prod = ppoly_product_shifted(v, w_smooth, y0);
            for (std::size_t i = 0; i < prod.pieces.size(); ++i)
                add_piece(prod.pieces[i], prod.knots[i], prod.knots[i], prod.knots[i + 1]);
        }
        for (const auto& b : bands) {
            const double lo = std::max(v.lo(), b.lo - y0);
            const double hi = std::min(v.hi(), b.hi - y0);
            if (!(hi > lo)) continue;
            for (std::size_t i = 0; i < v.pieces.size(); ++i) {
                const double plo = std::max(lo, v.knots[i]);
                const double phi = std::min(hi, v.knots[i + 1]);
                if (!(phi > plo)) continue;
                std::vector<double> scaled = v.pieces[i];
                for (double& cc : scaled) cc *= b.height;
                add_piece(scaled, v.knots[i], plo, phi);
            }
        }
        return amp * unit_phase(mod_rate * xi) * (std::abs(lam) * acc);
    }
};

// Twisted translation acts on a separable kernel exactly:
//   K_{(T^t_{(k,l)})^lambda g}(a, eta) = e^{i pi lambda k (l + 2a)} K_g(a + l, eta).
inline SeparableKernel separable_translate(const SeparableKernel& s, std::int64_t k,
                                           std::int64_t l) {
    SeparableKernel out = s;
    out.v = ppoly_shift_arg(s.v, double(l)); // out.v(t) = v(t + l)
    const double lam = s.lambda.value();
    out.amp = s.amp * unit_phase_pi_dyadic(s.lambda, k * l) *
              unit_phase(s.mod_rate * double(l));
    out.mod_rate = s.mod_rate + 2.0 * pi * lam * double(k);
    return out;
}

// Dilation rescales the design (kernel relation for D_{2^m}):
//   K^{lambda 4^m}_{D_{2^m} g}(xi, eta) = K^lambda_g(2^m xi, 2^m eta).
inline SeparableKernel separable_dilate(const SeparableKernel& s, int m) {
    SeparableKernel out = s;
    const double a = std::ldexp(1.0, m);
    out.lambda = s.lambda.scale2(2 * m);
    out.v = ppoly_scale_arg(s.v, a);
    if (!s.w_smooth.empty()) out.w_smooth = ppoly_scale_arg(s.w_smooth, a);
    for (auto& b : out.bands) { b.lo /= a; b.hi /= a; }
    out.extent = s.extent / a;
    out.x_lo = s.x_lo / a;
    out.x_hi = s.x_hi / a;
    out.mod_rate = s.mod_rate * a;
    return out;
}

// Builds the analytic Field2D carrying the separable structure.
inline Field2D make_separable_field(SeparableKernel k) {
    if (k.x_lo == 0.0 && k.x_hi == 0.0) {
        k.x_lo = -k.extent;
        k.x_hi = k.extent;
    }
    auto sk = std::make_shared<const SeparableKernel>(std::move(k));
    const double lam = sk->lambda.value();
    const double alam = std::abs(lam);
    auto ev = [sk, lam, alam](double x, double y) -> cplx {
        return alam * unit_phase(-pi * lam * x * y) * sk->row_transform(lam * x, y);
    };
    SupportBox box{-sk->extent, sk->extent, sk->w_lo() - sk->v.hi(), sk->w_hi() - sk->v.lo()};
    OscHints h;
    h.chirp_rate = -lam;
    h.omega_const = 2.0 * pi * alam * std::max(std::abs(sk->v.lo()), std::abs(sk->v.hi()));
    // R(lambda x; y) varies in x on the scale set by the width of supp v
    h.panel_cap = 1.0 / std::max(1e-9, alam * (sk->v.hi() - sk->v.lo()));
    Field2D out = Field2D::analytic(ev, sk->extent, box, {}, sk->row_breaks());
    return out.with_hints(h).with_separable(sk);
}

// Unit-norm smooth generator with K(xi,eta) = v(xi) w(eta) at lambda = 1:
// v, w are unit-norm B-spline bumps, so ||psi|| = ||K|| = 1 up to the x
// truncation tail. Its integer twisted translates have compactly supported
// Zak atoms, which makes it the natural test object for Zak/bracket
// identities at finite series truncation.
inline Field2D designed_generator(double extent = 64.0) {
    SeparableKernel k;
    k.lambda = Dyadic::from_int(1);
    k.v = bspline_profile(6, 0.125, 0.875);
    k.w_smooth = bspline_profile(6, -1.0, 1.0);
    k.extent = extent;
    return make_separable_field(std::move(k));
}

// Variant with the eta profile supported on [eta_lo, eta_hi] (used to build
// generators with disjoint spectral supports).
inline Field2D designed_generator_band(double eta_lo, double eta_hi, double extent = 64.0) {
    SeparableKernel k;
    k.lambda = Dyadic::from_int(1);
    k.v = bspline_profile(6, 0.125, 0.875);
    k.w_smooth = bspline_profile(6, eta_lo, eta_hi);
    k.extent = extent;
    return make_separable_field(std::move(k));
}

} // namespace twc
