#pragma once

#include <vector>

#include "twc/field.hpp"
#include "twc/io.hpp"
#include "twc/ops.hpp"
#include "twc/parallel.hpp"
#include "twc/report.hpp"
#include "twc/weyl.hpp"

namespace twc {

// Sampling of the Weyl-Zak transform. xi and xi' live on midpoint grids of
// [0,1) (n_t points); eta on left endpoints of [-H, H). The m-window of the
// truncated series is [m_lo, m_hi]; matched-truncation identity checks shift
// it instead of comparing across unequal windows.
struct ZakParams {
    int M = 32;
    double H = 64.0;
    std::size_t n_eta = 1024;
    std::size_t n_t = 0; // 0: defaults to 2M + 2 so the xi'-series is exactly sampled
    int m_shift = 0;

    std::size_t nt() const { return n_t ? n_t : std::size_t(2 * M + 2); }
    int m_lo() const { return -M + m_shift; }
    int m_hi() const { return M + m_shift; }

    void validate() const {
        if (M < 1) throw std::invalid_argument("zak: M must be >= 1");
        if (!(H > 0.0)) throw std::invalid_argument("zak: H must be positive");
        if (nt() < std::size_t(2 * M + 1))
            throw std::invalid_argument("zak: n_t must be at least 2M+1");
        if (n_eta < 2) throw std::invalid_argument("zak: n_eta too small");
    }
};

struct ZakField {
    ZakParams params;
    std::vector<cplx> data; // (eta outer, xi, xi' inner)

    std::size_t nt() const { return params.nt(); }
    std::size_t neta() const { return params.n_eta; }
    double xi(std::size_t i) const { return (double(i) + 0.5) / double(nt()); }
    double xip(std::size_t ip) const { return (double(ip) + 0.5) / double(nt()); }
    double eta(std::size_t q) const {
        return -params.H + double(q) * (2.0 * params.H / double(params.n_eta));
    }
    double d_eta() const { return 2.0 * params.H / double(params.n_eta); }

    cplx at(std::size_t i, std::size_t ip, std::size_t q) const {
        return data[(q * nt() + i) * nt() + ip];
    }
    cplx& at(std::size_t i, std::size_t ip, std::size_t q) {
        return data[(q * nt() + i) * nt() + ip];
    }

    // grid norm ||Z||^2 over T^2 x [-H, H)
    double norm_sq() const {
        double acc = 0.0;
        for (const cplx& v : data) acc += std::norm(v);
        return acc * d_eta() / double(nt() * nt());
    }
};

// Z_W phi (xi, xi', eta) = sum_m K_phi(m + xi, eta) exp(-2 pi i m xi'), lambda = 1.
inline ZakField weyl_zak(const Field2D& phi, const ZakParams& params) {
    params.validate();
    if (phi.extent() < double(params.M + std::abs(params.m_shift) + 1))
        throw GridError("weyl_zak: field extent too small for the series truncation M");
    ZakField Z;
    Z.params = params;
    const std::size_t nt = Z.nt(), neta = Z.neta();
    Z.data.assign(neta * nt * nt, cplx(0, 0));
    const int mlo = params.m_lo(), mhi = params.m_hi();
    const std::size_t nm = std::size_t(mhi - mlo + 1);

    // precomputed xi'-phases: exp(-2 pi i m xi'_ip)
    std::vector<cplx> ph(nm * nt);
    for (std::size_t im = 0; im < nm; ++im)
        for (std::size_t ip = 0; ip < nt; ++ip)
            ph[im * nt + ip] =
                unit_phase(-2.0 * pi * double(mlo + int(im)) * Z.xip(ip));

    parallel_for(0, neta, [&](std::size_t q) {
        KernelColumnEvaluator ev(phi, Dyadic::from_int(1));
        const double eta = Z.eta(q);
        std::vector<cplx> col(nm);
        for (std::size_t i = 0; i < nt; ++i) {
            const double xi = Z.xi(i);
            bool any = false;
            for (std::size_t im = 0; im < nm; ++im) {
                col[im] = ev.at(double(mlo + int(im)) + xi, eta);
                any = any || col[im] != cplx(0, 0);
            }
            if (!any) continue;
            for (std::size_t ip = 0; ip < nt; ++ip) {
                cplx acc(0, 0);
                for (std::size_t im = 0; im < nm; ++im) acc += col[im] * ph[im * nt + ip];
                Z.at(i, ip, q) = acc;
            }
        }
    });
    return Z;
}

// eq-style translation action: Z_W T^t_{(k,l)} phi = e^{2 pi i (k xi + l xi')}
// e^{i pi k l} Z_W phi, compared at matched truncation (the reference side
// uses the m-window shifted by l).
inline VerificationReport check_zak_translation(const Field2D& phi, std::int64_t k,
                                                std::int64_t l, const ZakParams& params,
                                                double tolerance = 1e-10) {
    const Field2D tphi = twisted_translate(phi, TwistIndex(k, l, Dyadic::from_int(1)));
    const ZakField lhs = weyl_zak(tphi, params);
    ZakParams shifted = params;
    shifted.m_shift += int(l);
    const ZakField ref = weyl_zak(phi, shifted);

    const cplx ckl = unit_phase_pi_ratio(k * l, 1, 1); // e^{i pi k l}
    double dev = 0.0, scale = 0.0;
    for (std::size_t q = 0; q < lhs.neta(); ++q)
        for (std::size_t i = 0; i < lhs.nt(); ++i)
            for (std::size_t ip = 0; ip < lhs.nt(); ++ip) {
                const cplx mod =
                    unit_phase(2.0 * pi * (double(k) * lhs.xi(i) + double(l) * lhs.xip(ip))) * ckl;
                dev = std::max(dev, std::abs(lhs.at(i, ip, q) - mod * ref.at(i, ip, q)));
                scale = std::max(scale, std::abs(lhs.at(i, ip, q)));
            }
    VerificationReport r;
    r.check_name = "zak.translation_action";
    r.parameters["k"] = std::to_string(k);
    r.parameters["l"] = std::to_string(l);
    r.parameters["M"] = std::to_string(params.M);
    r.metrics["max_deviation"] = dev;
    r.metrics["scale"] = scale;
    r.tolerance = tolerance;
    r.pass = dev <= tolerance;
    return r;
}

// Finite-M Parseval identity in xi': for each (xi, eta),
//   (1/n_t) sum_{xi'} |Z|^2 = sum_m |K(m + xi, eta)|^2, exactly (n_t >= 2M+2).
inline VerificationReport check_zak_parseval_xip(const Field2D& phi, const ZakParams& params,
                                                 double tolerance = 1e-10) {
    const ZakField Z = weyl_zak(phi, params);
    const int mlo = params.m_lo(), mhi = params.m_hi();
    double dev = 0.0;
    std::vector<double> devs(Z.neta(), 0.0);
    parallel_for(0, Z.neta(), [&](std::size_t q) {
        KernelColumnEvaluator ev(phi, Dyadic::from_int(1));
        const double eta = Z.eta(q);
        double d = 0.0;
        for (std::size_t i = 0; i < Z.nt(); ++i) {
            double lhs = 0.0;
            for (std::size_t ip = 0; ip < Z.nt(); ++ip) lhs += std::norm(Z.at(i, ip, q));
            lhs /= double(Z.nt());
            double rhs = 0.0;
            for (int m = mlo; m <= mhi; ++m) rhs += std::norm(ev.at(double(m) + Z.xi(i), eta));
            d = std::max(d, std::abs(lhs - rhs));
        }
        devs[q] = d;
    });
    for (double d : devs) dev = std::max(dev, d);
    VerificationReport r;
    r.check_name = "zak.parseval_xip";
    r.parameters["M"] = std::to_string(params.M);
    r.metrics["max_deviation"] = dev;
    r.tolerance = tolerance;
    r.pass = dev <= tolerance;
    return r;
}

// eq-style marginal identity at matched truncation: per eta,
//   integral_{T^2} |Z|^2 = integral_{|a| <= M+1} |K(a, eta)|^2 da,
// with the kernel integral sampled on the same a-offsets as the series.
// Also reports the window-edge kernel mass as the truncation diagnostic.
inline VerificationReport check_zak_marginal(const Field2D& phi, const ZakParams& params,
                                             double tolerance = 1e-6) {
    const ZakField Z = weyl_zak(phi, params);
    const int mlo = params.m_lo(), mhi = params.m_hi();
    std::vector<double> devs(Z.neta(), 0.0), tails(Z.neta(), 0.0);
    parallel_for(0, Z.neta(), [&](std::size_t q) {
        KernelColumnEvaluator ev(phi, Dyadic::from_int(1));
        const double eta = Z.eta(q);
        double lhs = 0.0;
        for (std::size_t i = 0; i < Z.nt(); ++i)
            for (std::size_t ip = 0; ip < Z.nt(); ++ip) lhs += std::norm(Z.at(i, ip, q));
        lhs /= double(Z.nt() * Z.nt());
        double rhs = 0.0, tail = 0.0;
        for (std::size_t i = 0; i < Z.nt(); ++i) {
            const double xi = Z.xi(i);
            for (int m = mlo; m <= mhi; ++m) rhs += std::norm(ev.at(double(m) + xi, eta));
            tail += std::norm(ev.at(double(mlo) + xi, eta)) +
                    std::norm(ev.at(double(mhi) + xi, eta));
        }
        rhs /= double(Z.nt());
        devs[q] = std::abs(lhs - rhs);
        tails[q] = tail / double(Z.nt());
    });
    double dev = 0.0, tail = 0.0;
    for (std::size_t q = 0; q < devs.size(); ++q) {
        dev = std::max(dev, devs[q]);
        tail = std::max(tail, tails[q]);
    }
    VerificationReport r;
    r.check_name = "zak.marginal";
    r.parameters["M"] = std::to_string(params.M);
    r.metrics["max_deviation"] = dev;
    r.metrics["edge_kernel_mass"] = tail;
    r.tolerance = tolerance;
    r.pass = dev <= tolerance;
    return r;
}

// isometry diagnostic: || Z_W phi ||^2 on T^2 x [-H,H) against ||phi||^2
inline VerificationReport check_zak_isometry(const Field2D& phi, double phi_norm_sq,
                                             const ZakParams& params, double tolerance = 1e-3) {
    const ZakField Z = weyl_zak(phi, params);
    const double zn = Z.norm_sq();
    VerificationReport r;
    r.check_name = "zak.isometry";
    r.parameters["M"] = std::to_string(params.M);
    r.parameters["H"] = std::to_string(params.H);
    r.metrics["zak_norm_sq"] = zn;
    r.metrics["field_norm_sq"] = phi_norm_sq;
    r.metrics["max_deviation"] = std::abs(zn - phi_norm_sq);
    r.tolerance = tolerance;
    r.pass = r.metrics["max_deviation"] <= tolerance;
    return r;
}

// --- serialization: magic "TWZK" {version, M i32, m_lo i32, m_hi i32,
// H f64, n_t u32, n_eta u32} + data (eta outer, xi, xi' inner) ---

inline void write_zak(std::ostream& os, const ZakField& Z) {
    detail::write_magic(os, "TWZK");
    detail::write_pod<std::uint32_t>(os, 1u);
    detail::write_pod<std::int32_t>(os, Z.params.M);
    detail::write_pod<std::int32_t>(os, Z.params.m_lo());
    detail::write_pod<std::int32_t>(os, Z.params.m_hi());
    detail::write_pod<double>(os, Z.params.H);
    detail::write_pod<std::uint32_t>(os, std::uint32_t(Z.nt()));
    detail::write_pod<std::uint32_t>(os, std::uint32_t(Z.neta()));
    detail::write_cplx_array(os, Z.data);
}

inline ZakField read_zak(std::istream& is) {
    detail::expect_magic(is, "TWZK", "ZakField");
    const auto version = detail::read_pod<std::uint32_t>(is);
    if (version != 1u) throw IoError("unsupported TWZK version");
    ZakField Z;
    Z.params.M = detail::read_pod<std::int32_t>(is);
    const auto mlo = detail::read_pod<std::int32_t>(is);
    (void)detail::read_pod<std::int32_t>(is);
    Z.params.m_shift = mlo + Z.params.M;
    Z.params.H = detail::read_pod<double>(is);
    Z.params.n_t = detail::read_pod<std::uint32_t>(is);
    Z.params.n_eta = detail::read_pod<std::uint32_t>(is);
    Z.data.resize(Z.neta() * Z.nt() * Z.nt());
    detail::read_cplx_array(is, Z.data);
    return Z;
}

} // namespace twc
