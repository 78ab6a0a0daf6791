#pragma once

#include <string>
#include <vector>

#include "twc/designed.hpp"
#include "twc/field.hpp"
#include "twc/ops.hpp"
#include "twc/parallel.hpp"
#include "twc/report.hpp"

namespace twc {

// Haar step: +1 on the first half of [0,1], -1 on the second, 0 elsewhere.
// Breakpoint values follow the half-open cell convention (right limits), so
// left-endpoint rectangle sums on dyadically aligned grids integrate products
// of these steps exactly; as an L^2 object this is the usual Haar function.
inline double haar_chi(double t) {
    if (t < 0.0 || t >= 1.0) return 0.0;
    return t < 0.5 ? 1.0 : -1.0;
}

// psi_j(x,y) = exp(i pi x y 2^{-2j}) chi(x) chi(y), the twisted Haar
// generator at scale j. Unit L^2 norm for every j.
inline Field2D haar_generator(int j, double extent = 1024.0) {
    const double lam = std::ldexp(1.0, -2 * j);
    auto ev = [lam](double x, double y) -> cplx {
        const double cx = haar_chi(x);
        if (cx == 0.0) return cplx(0, 0);
        const double cy = haar_chi(y);
        if (cy == 0.0) return cplx(0, 0);
        return unit_phase(pi * lam * x * y) * (cx * cy);
    };
    OscHints h;
    h.chirp_rate = lam;
    h.panel_cap = 0.25;
    return Field2D::analytic(ev, extent, SupportBox{0.0, 1.0, 0.0, 1.0}, {0.0, 0.5, 1.0},
                             {0.0, 0.5, 1.0})
        .with_hints(h);
}

struct GeneratorFamily {
    std::vector<std::pair<int, Field2D>> gens; // (j, psi_j), one per j

    const Field2D* find(int j) const {
        for (const auto& g : gens)
            if (g.first == j) return &g.second;
        return nullptr;
    }
    int j_min() const {
        int v = gens.empty() ? 0 : gens.front().first;
        for (const auto& g : gens) v = std::min(v, g.first);
        return v;
    }
    int j_max() const {
        int v = gens.empty() ? 0 : gens.front().first;
        for (const auto& g : gens) v = std::max(v, g.first);
        return v;
    }
};

inline GeneratorFamily haar_family(int j_lo, int j_hi) {
    GeneratorFamily fam;
    for (int j = j_lo; j <= j_hi; ++j) fam.gens.emplace_back(j, haar_generator(j));
    return fam;
}

struct SystemIndex {
    int j = 0;
    std::int64_t k = 0, l = 0;
    int m = 0;
};

// Elements D_{2^{m+j}} (T^t_{(k,l)})^{2^{-2j}} psi_j; m is forced to zero for
// the standard (non-modified) system.
inline std::vector<Field2D> build_system(const GeneratorFamily& fam,
                                         const std::vector<SystemIndex>& indices, bool modified) {
    std::vector<Field2D> out;
    out.reserve(indices.size());
    for (const auto& idx : indices) {
        const Field2D* gen = fam.find(idx.j);
        if (!gen) throw std::invalid_argument("build_system: missing generator for j=" +
                                              std::to_string(idx.j));
        out.push_back(wavelet_op(*gen, idx.j, idx.k, idx.l, modified ? idx.m : 0));
    }
    return out;
}

struct GramResult {
    std::size_t dim = 0;
    std::vector<cplx> matrix; // row major
    double defect = 0.0;      // max |G - I|
    double hermitian_defect = 0.0;

    cplx at(std::size_t i, std::size_t j) const { return matrix[i * dim + j]; }
};

// Pairwise inner products on the quadrature grid (analytic fields integrate
// over support-box intersections; disjoint supports contribute exact zeros).
inline GramResult gram_check(const std::vector<Field2D>& system, const GridSpec& grid) {
    GramResult res;
    res.dim = system.size();
    res.matrix.assign(res.dim * res.dim, cplx(0, 0));
    const bool analytic = !system.empty() && system.front().is_analytic();

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < res.dim; ++i)
        for (std::size_t j = i; j < res.dim; ++j) pairs.emplace_back(i, j);

    std::vector<cplx> vals(pairs.size());
    parallel_for(0, pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        vals[p] = analytic ? boxed_inner(system[i], system[j], grid)
                           : inner(system[i], system[j]);
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        res.matrix[i * res.dim + j] = vals[p];
        res.matrix[j * res.dim + i] = std::conj(vals[p]);
    }
    for (std::size_t i = 0; i < res.dim; ++i)
        for (std::size_t j = 0; j < res.dim; ++j) {
            const cplx want = i == j ? cplx(1, 0) : cplx(0, 0);
            res.defect = std::max(res.defect, std::abs(res.at(i, j) - want));
        }
    return res;
}

// k = p 2^j + r, l = q 2^j + s with r, s in {0, ..., 2^j - 1} (floor division
// keeps the ranges for negative k, l) and the phase relating the two
// factorizations of the twisted translate.
struct CosetDecomposition {
    std::int64_t p, q, r, s;
    cplx phase;
};

inline CosetDecomposition coset_decompose(std::int64_t k, std::int64_t l, int j) {
    if (j < 0) throw std::invalid_argument("coset_decompose: j must be >= 0");
    const std::int64_t tj = std::int64_t(1) << j;
    auto fdiv = [tj](std::int64_t v) {
        std::int64_t q = v / tj;
        if (v % tj != 0 && v < 0) --q;
        return q;
    };
    CosetDecomposition d{};
    d.p = fdiv(k);
    d.r = k - d.p * tj;
    d.q = fdiv(l);
    d.s = l - d.q * tj;
    d.phase = unit_phase_pi_dyadic(Dyadic::pow2(-j), -(d.p * d.s - d.q * d.r));
    return d;
}

// Truncated Parseval sum of eq-style coefficients for f in W_{0,j}:
//   sum_{|k'|,|l'| <= R} sum_{k,l=0}^{2^j-1} |<f, T^t_{(k',l')} D_{2^j} (T^t)^{2^{-2j}}_{(k,l)} psi_j>|^2
inline VerificationReport w0j_parseval_check(const Field2D& f, const Field2D& psi_j, int j,
                                             std::int64_t radius, const GridSpec& grid,
                                             double tolerance = 1e-3) {
    const std::int64_t tj = std::int64_t(1) << j;
    const double norm_sq = boxed_inner(f, f, grid).real();

    std::vector<SystemIndex> outer;
    for (std::int64_t kp = -radius; kp <= radius; ++kp)
        for (std::int64_t lp = -radius; lp <= radius; ++lp)
            outer.push_back(SystemIndex{0, kp, lp, 0});

    std::vector<double> partial(outer.size(), 0.0);
    parallel_for(0, outer.size(), [&](std::size_t oi) {
        const std::int64_t kp = outer[oi].k, lp = outer[oi].l;
        double acc = 0.0;
        for (std::int64_t k = 0; k < tj; ++k)
            for (std::int64_t l = 0; l < tj; ++l) {
                const Field2D elem = twisted_translate(wavelet_op(psi_j, j, k, l),
                                                       TwistIndex(kp, lp, Dyadic::from_int(1)));
                acc += std::norm(boxed_inner(f, elem, grid));
            }
        partial[oi] = acc;
    });
    double sum = 0.0;
    for (double v : partial) sum += v;

    VerificationReport r;
    r.check_name = "wavelet.w0j_parseval";
    r.parameters["j"] = std::to_string(j);
    r.parameters["radius"] = std::to_string(radius);
    r.metrics["coefficient_sum"] = sum;
    r.metrics["norm_sq"] = norm_sq;
    r.metrics["max_deviation"] = std::abs(sum - norm_sq);
    r.tolerance = tolerance;
    r.pass = r.metrics["max_deviation"] <= tolerance;
    return r;
}

// Family with K^{2^{-2j}}_{psi_j}(xi, eta) = 2^{-j/2} u(xi) 1{|eta| in
// [2^{2j}, 2^{2j+1})}, so the j-th Calderon term is the indicator of the
// dyadic band 2^j <= |eta| < 2^{j+1}. Fields are the closed-form inverse
// Weyl transforms of those kernels, truncated where the u-profile tail falls
// below roundoff relevance (|x| ~ tail_factor / (a lambda)).
inline GeneratorFamily design_tiling_family(int j_lo, int j_hi,
                                            double u_width = 1.0 / 1024.0,
                                            double tail_factor = 240.0) {
    GeneratorFamily fam;
    const PiecewisePoly u = bspline_profile(6, 0.0, u_width);
    for (int j = j_lo; j <= j_hi; ++j) {
        SeparableKernel k;
        k.lambda = dyadic_lambda_for_level(j);
        k.v = u;
        const double B = std::ldexp(1.0, 2 * j);
        const double height = std::pow(2.0, -0.5 * j);
        k.bands.push_back({B, 2.0 * B, height});
        k.bands.push_back({-2.0 * B, -B, height});
        k.extent = tail_factor / (u_width * std::abs(k.lambda.value()));
        fam.gens.emplace_back(j, make_separable_field(std::move(k)));
    }
    return fam;
}

// c * f, preserving the analytic structure (kernels are linear in the field,
// so a separable design just scales its amplitude).
inline Field2D scaled_field(const Field2D& f, cplx c) {
    if (f.is_sampled()) {
        std::vector<cplx> d = f.data();
        for (auto& v : d) v *= c;
        return Field2D::sampled(f.grid(), std::move(d), f.interp());
    }
    Field2D base = f;
    auto ev = [base, c](double x, double y) -> cplx { return c * base.eval(x, y); };
    Field2D out = f.support()
                      ? Field2D::analytic(ev, f.extent(), *f.support(), f.x_breaks(), f.y_breaks())
                      : Field2D::analytic(ev, f.extent());
    out = out.with_hints(f.hints());
    if (f.separable()) {
        SeparableKernel s = *f.separable();
        s.amp *= c;
        out = out.with_separable(std::make_shared<const SeparableKernel>(std::move(s)));
    }
    return out;
}

// Linear combination of fields sharing an analytic representation.
inline Field2D linear_combination(const std::vector<cplx>& coeffs,
                                  const std::vector<Field2D>& fields) {
    if (coeffs.size() != fields.size() || fields.empty())
        throw std::invalid_argument("linear_combination: size mismatch");
    if (fields.size() == 1) return scaled_field(fields.front(), coeffs.front());
    double extent = 0.0;
    bool have_box = true;
    SupportBox box{1e300, -1e300, 1e300, -1e300};
    std::vector<double> xb, yb;
    double chirp = fields.front().hints().chirp_rate;
    double omega = 0.0;
    for (const auto& f : fields) {
        extent = std::max(extent, f.extent());
        if (f.support()) {
            box.x_lo = std::min(box.x_lo, f.support()->x_lo);
            box.x_hi = std::max(box.x_hi, f.support()->x_hi);
            box.y_lo = std::min(box.y_lo, f.support()->y_lo);
            box.y_hi = std::max(box.y_hi, f.support()->y_hi);
        } else {
            have_box = false;
        }
        xb.insert(xb.end(), f.x_breaks().begin(), f.x_breaks().end());
        yb.insert(yb.end(), f.y_breaks().begin(), f.y_breaks().end());
        if (f.hints().chirp_rate != chirp) chirp = 0.0;
        omega = std::max(omega, f.hints().omega_const);
    }
    std::vector<Field2D> fs = fields;
    std::vector<cplx> cs = coeffs;
    auto ev = [fs, cs](double x, double y) -> cplx {
        cplx acc(0, 0);
        for (std::size_t i = 0; i < fs.size(); ++i) acc += cs[i] * fs[i].eval(x, y);
        return acc;
    };
    OscHints h;
    if (chirp != 0.0) {
        h.chirp_rate = chirp;
        h.omega_const = omega;
    } else {
        // conservative: fold every chirp into the constant bound
        double rate = 0.0;
        double ymax = have_box ? std::max(std::abs(box.y_lo), std::abs(box.y_hi)) : extent;
        for (const auto& f : fields)
            rate = std::max(rate, pi * std::abs(f.hints().chirp_rate) * ymax + f.hints().omega_const);
        h.omega_const = rate;
    }
    h.panel_cap = 0.25;
    Field2D out = have_box ? Field2D::analytic(ev, extent, box, std::move(xb), std::move(yb))
                           : Field2D::analytic(ev, extent);
    return out.with_hints(h);
}

} // namespace twc
