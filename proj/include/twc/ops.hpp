#pragma once

#include <optional>

#include "twc/designed.hpp"
#include "twc/dyadic.hpp"
#include "twc/field.hpp"
#include "twc/phase.hpp"

namespace twc {

// Index of a lambda-twisted translation (T^t_{(k,l)})^lambda.
struct TwistIndex {
    std::int64_t k = 0;
    std::int64_t l = 0;
    Dyadic lambda = Dyadic::from_int(1);

    TwistIndex() = default;
    TwistIndex(std::int64_t k_, std::int64_t l_, Dyadic lam) : k(k_), l(l_), lambda(lam) {
        if (lambda.zero()) throw std::invalid_argument("twist index: lambda must be nonzero");
    }
};

// Scalar with T1 T2 = composition_phase(t1,t2) * T_{(k1+k2, l1+l2)};
// equals exp(-i pi lambda (k1 l2 - l1 k2)).
inline cplx composition_phase(const TwistIndex& t1, const TwistIndex& t2) {
    if (!(t1.lambda == t2.lambda))
        throw std::invalid_argument("composition_phase: mismatched lambda");
    return unit_phase_pi_dyadic(t1.lambda, -(t1.k * t2.l - t1.l * t2.k));
}

// (T^t_{(k,l)})^lambda f (x,y) = exp(i pi lambda (x l - y k)) f(x-k, y-l).
inline Field2D twisted_translate(const Field2D& f, const TwistIndex& t) {
    const double lam = t.lambda.value();
    const double k = double(t.k), l = double(t.l);

    if (f.is_sampled()) {
        const GridSpec& g = f.grid();
        const std::int64_t q = g.inv_h();
        const std::int64_t dk = t.k * q, dl = t.l * q; // exact index shifts
        std::vector<cplx> data(g.n * g.n, cplx(0, 0));
        const double h = g.h();
        for (std::size_t iy = 0; iy < g.n; ++iy) {
            const std::int64_t sy = std::int64_t(iy) - dl;
            if (sy < 0 || sy >= std::int64_t(g.n)) continue;
            const double y = g.node(iy);
            for (std::size_t ix = 0; ix < g.n; ++ix) {
                const std::int64_t sx = std::int64_t(ix) - dk;
                if (sx < 0 || sx >= std::int64_t(g.n)) continue;
                const double x = -g.extent + double(ix) * h;
                data[iy * g.n + ix] =
                    unit_phase(pi * lam * (x * l - y * k)) * f.at(std::size_t(sx), std::size_t(sy));
            }
        }
        return Field2D::sampled(g, std::move(data), f.interp());
    }

    Field2D base = f; // value capture keeps the source alive inside the closure
    auto ev = [base, lam, k, l](double x, double y) -> cplx {
        return unit_phase(pi * lam * (x * l - y * k)) * base.eval(x - k, y - l);
    };
    std::optional<SupportBox> box;
    if (f.support())
        box = SupportBox{f.support()->x_lo + k, f.support()->x_hi + k,
                         f.support()->y_lo + l, f.support()->y_hi + l};
    std::vector<double> xb = f.x_breaks(), yb = f.y_breaks();
    for (double& v : xb) v += k;
    for (double& v : yb) v += l;
    OscHints h = f.hints();
    h.omega_const += pi * (std::abs(lam * l) + std::abs(h.chirp_rate * l));
    // the box travels with the field; the composition law then holds exactly
    // on analytic sources instead of picking up translation-order-dependent
    // truncation
    const double ext = f.extent() + double(std::max(std::abs(t.k), std::abs(t.l)));
    Field2D out = box ? Field2D::analytic(ev, ext, *box, std::move(xb), std::move(yb))
                      : Field2D::analytic(ev, ext);
    out = out.with_hints(h);
    if (f.separable() && f.separable()->lambda == t.lambda)
        out = out.with_separable(std::make_shared<const SeparableKernel>(
            separable_translate(*f.separable(), t.k, t.l)));
    return out;
}

// D_{2^m} f (x,y) = 2^m f(2^m x, 2^m y).
inline Field2D dilate(const Field2D& f, int m) {
    if (m == 0) return f;
    const double a = std::ldexp(1.0, m); // 2^m

    if (f.is_sampled()) {
        const GridSpec& g = f.grid();
        std::vector<cplx> data(g.n * g.n);
        const double h = g.h();
        for (std::size_t iy = 0; iy < g.n; ++iy) {
            const double y = g.node(iy);
            for (std::size_t ix = 0; ix < g.n; ++ix) {
                const double x = -g.extent + double(ix) * h;
                data[iy * g.n + ix] = a * f.eval(a * x, a * y); // nearest-node for m < 0
            }
        }
        return Field2D::sampled(g, std::move(data), f.interp());
    }

    Field2D base = f;
    auto ev = [base, a](double x, double y) -> cplx { return a * base.eval(a * x, a * y); };
    std::optional<SupportBox> box;
    if (f.support())
        box = SupportBox{f.support()->x_lo / a, f.support()->x_hi / a,
                         f.support()->y_lo / a, f.support()->y_hi / a};
    std::vector<double> xb = f.x_breaks(), yb = f.y_breaks();
    for (double& v : xb) v /= a;
    for (double& v : yb) v /= a;
    OscHints h = f.hints();
    h.chirp_rate *= a * a;
    h.omega_const *= a;
    h.panel_cap /= a;
    Field2D out = box ? Field2D::analytic(ev, f.extent() / a, *box, std::move(xb), std::move(yb))
                      : Field2D::analytic(ev, f.extent() / a);
    out = out.with_hints(h);
    if (f.separable())
        out = out.with_separable(
            std::make_shared<const SeparableKernel>(separable_dilate(*f.separable(), m)));
    return out;
}

// D_{2^{m+j}} (T^t_{(k,l)})^{2^{-2j}} f, the (modified) twisted wavelet
// element built from generator f at scale j.
inline Field2D wavelet_op(const Field2D& f, int j, std::int64_t k, std::int64_t l, int m = 0) {
    return dilate(twisted_translate(f, TwistIndex(k, l, dyadic_lambda_for_level(j))), m + j);
}

} // namespace twc
