#pragma once

#include <ostream>
#include <vector>

#include "twc/field.hpp"
#include "twc/linalg.hpp"
#include "twc/ops.hpp"
#include "twc/report.hpp"
#include "twc/zak.hpp"

namespace twc {

// [phi,phi](xi, xi') on the T^2 midpoint grid, with the numerical support set
// Omega_phi = { data > eps_support }, eps_support = eps_rel * max(data).
struct BracketMap {
    std::size_t n_t = 0;
    std::vector<double> data;        // (xi outer, xi' inner)
    double eps_support = 0.0;
    std::vector<std::uint8_t> omega_mask;

    double xi(std::size_t i) const { return (double(i) + 0.5) / double(n_t); }
    double xip(std::size_t ip) const { return (double(ip) + 0.5) / double(n_t); }
    double at(std::size_t i, std::size_t ip) const { return data[i * n_t + ip]; }
    bool in_omega(std::size_t i, std::size_t ip) const { return omega_mask[i * n_t + ip] != 0; }

    // (1/n_t^2) sum data, the T^2 rectangle rule for ||[phi,phi]||_{L^1}
    double l1_norm() const {
        double acc = 0.0;
        for (double v : data) acc += v;
        return acc / double(n_t * n_t);
    }
};

inline BracketMap bracket_from_zak(const ZakField& Z, double eps_rel = 1e-8) {
    BracketMap b;
    b.n_t = Z.nt();
    b.data.assign(b.n_t * b.n_t, 0.0);
    const double de = Z.d_eta();
    for (std::size_t q = 0; q < Z.neta(); ++q)
        for (std::size_t i = 0; i < b.n_t; ++i)
            for (std::size_t ip = 0; ip < b.n_t; ++ip)
                b.data[i * b.n_t + ip] += std::norm(Z.at(i, ip, q)) * de;
    double mx = 0.0;
    for (double v : b.data) mx = std::max(mx, v);
    b.eps_support = eps_rel * mx;
    b.omega_mask.resize(b.data.size());
    for (std::size_t k = 0; k < b.data.size(); ++k)
        b.omega_mask[k] = b.data[k] > b.eps_support ? 1 : 0;
    return b;
}

// eta-quadrature of |Z_W phi|^2 over [-H, H) per (xi, xi') node
inline BracketMap bracket(const Field2D& phi, const ZakParams& params, double eps_rel = 1e-8) {
    return bracket_from_zak(weyl_zak(phi, params), eps_rel);
}

// grid essential bounds of the bracket over its support set; degenerate
// (phi ~ 0) when Omega is empty
struct FrameBounds {
    double A = 0.0, B = 0.0;
    bool degenerate = false;
};

inline FrameBounds frame_bounds(const BracketMap& b) {
    FrameBounds out;
    out.A = 1e300;
    out.B = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < b.data.size(); ++k) {
        if (!b.omega_mask[k]) continue;
        any = true;
        out.A = std::min(out.A, b.data[k]);
        out.B = std::max(out.B, b.data[k]);
    }
    if (!any) {
        out.A = out.B = 0.0;
        out.degenerate = true;
    }
    return out;
}

// membership test against V^t(phi): r(xi,xi') = <Z_W f, Z_W phi>_eta / [phi,phi]
// on Omega_phi (guarded by eps_support), residual = ||Z_W f - r Z_W phi|| / ||f||
struct MembershipResult {
    std::size_t n_t = 0;
    std::vector<cplx> r;
    double residual = 0.0;
};

inline MembershipResult membership_residual(const Field2D& f, const Field2D& phi,
                                            const ZakParams& params, double eps_rel = 1e-8) {
    const ZakField Zf = weyl_zak(f, params);
    const ZakField Zp = weyl_zak(phi, params);
    const BracketMap b = bracket_from_zak(Zp, eps_rel);
    MembershipResult out;
    out.n_t = Zf.nt();
    out.r.assign(out.n_t * out.n_t, cplx(0, 0));
    const double de = Zf.d_eta();
    for (std::size_t i = 0; i < out.n_t; ++i)
        for (std::size_t ip = 0; ip < out.n_t; ++ip) {
            if (!b.in_omega(i, ip)) continue;
            cplx num(0, 0);
            for (std::size_t q = 0; q < Zf.neta(); ++q)
                num += Zf.at(i, ip, q) * std::conj(Zp.at(i, ip, q));
            out.r[i * out.n_t + ip] = num * de / b.at(i, ip);
        }
    double err = 0.0;
    for (std::size_t q = 0; q < Zf.neta(); ++q)
        for (std::size_t i = 0; i < out.n_t; ++i)
            for (std::size_t ip = 0; ip < out.n_t; ++ip)
                err += std::norm(Zf.at(i, ip, q) - out.r[i * out.n_t + ip] * Zp.at(i, ip, q));
    err *= de / double(out.n_t * out.n_t);
    const double fn = Zf.norm_sq();
    out.residual = fn > 0 ? std::sqrt(err / fn) : 0.0;
    return out;
}

// Truncated-lattice Gram matrix of { T^t_{(k,l)} phi : |k|,|l| <= radius } at
// lambda = 1, via gamma(dk,dl) = <T^t_{(dk,dl)} phi, phi> on the quadrature
// grid and the exact composition phases:
//   <T_a phi, T_b phi> = composition_phase(-b, a) * gamma(a - b).
inline std::vector<cplx> gram_lattice(const Field2D& phi, std::int64_t radius,
                                      const GridSpec& grid) {
    const std::int64_t span = 2 * radius;
    const std::size_t gdim = std::size_t(2 * span + 1);
    std::vector<cplx> gamma(gdim * gdim, cplx(0, 0));
    std::vector<std::pair<std::int64_t, std::int64_t>> deltas;
    for (std::int64_t dk = -span; dk <= span; ++dk)
        for (std::int64_t dl = -span; dl <= span; ++dl) deltas.emplace_back(dk, dl);
    parallel_for(0, deltas.size(), [&](std::size_t t) {
        const auto [dk, dl] = deltas[t];
        const Field2D tr = twisted_translate(phi, TwistIndex(dk, dl, Dyadic::from_int(1)));
        gamma[std::size_t(dk + span) * gdim + std::size_t(dl + span)] =
            boxed_inner(tr, phi, grid);
    });

    const std::size_t side = std::size_t(2 * radius + 1);
    const std::size_t dim = side * side;
    std::vector<cplx> G(dim * dim);
    for (std::int64_t ka = -radius; ka <= radius; ++ka)
        for (std::int64_t la = -radius; la <= radius; ++la)
            for (std::int64_t kb = -radius; kb <= radius; ++kb)
                for (std::int64_t lb = -radius; lb <= radius; ++lb) {
                    const cplx ph = composition_phase(
                        TwistIndex(-kb, -lb, Dyadic::from_int(1)),
                        TwistIndex(ka, la, Dyadic::from_int(1)));
                    const cplx g =
                        gamma[std::size_t(ka - kb + span) * gdim + std::size_t(la - lb + span)];
                    const std::size_t ia = std::size_t(ka + radius) * side + std::size_t(la + radius);
                    const std::size_t ib = std::size_t(kb + radius) * side + std::size_t(lb + radius);
                    G[ia * dim + ib] = ph * g;
                }
    return G;
}

inline void bracket_to_csv(std::ostream& os, const BracketMap& b) {
    os << "xi,xip,value\n";
    char buf[96];
    for (std::size_t i = 0; i < b.n_t; ++i)
        for (std::size_t ip = 0; ip < b.n_t; ++ip) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", b.xi(i), b.xip(ip), b.at(i, ip));
            os << buf;
        }
}

} // namespace twc
