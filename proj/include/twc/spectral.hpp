#pragma once

#include <ostream>
#include <vector>

#include "twc/bracket.hpp"
#include "twc/field.hpp"
#include "twc/ops.hpp"
#include "twc/parallel.hpp"
#include "twc/report.hpp"
#include "twc/wavelet.hpp"
#include "twc/weyl.hpp"
#include "twc/zak.hpp"

namespace twc {

// Nonnegative spectral curve sampled on a uniform eta grid.
struct SpectralFunction {
    std::vector<double> eta;
    std::vector<double> values;

    // eta-quadrature over the sampled window (rectangle rule)
    double integral() const {
        if (eta.size() < 2) return 0.0;
        const double d = eta[1] - eta[0];
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc * d;
    }
};

inline std::vector<double> uniform_eta_grid(double H, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t q = 0; q < n; ++q) out[q] = -H + double(q) * (2.0 * H / double(n));
    return out;
}

namespace detail {

// integral over q of |K^lambda_psi(q, eta0)|^2: GL panels on the q-window
// where the row eta0 - q meets the field's y-support, split at the
// kernel-argument images of the field's y-breakpoints. Kernel columns are
// recomputed by the 1D x-integral at the exact (q, eta0) points requested.
inline double kernel_column_mass(const Field2D& psi, KernelColumnEvaluator& ev, double eta0) {
    auto [ylo, yhi] = psi.y_range();
    double qlo = eta0 - yhi, qhi = eta0 - ylo;
    std::vector<double> cuts;
    for (double b : psi.y_breaks()) cuts.push_back(eta0 - b);
    if (const auto& sep = psi.separable()) {
        // designed kernels live on supp v; clip the window
        qlo = std::max(qlo, sep->v.lo() - 0.25);
        qhi = std::min(qhi, sep->v.hi() + 0.25);
        for (double k : sep->v.knots) cuts.push_back(k);
    }
    if (!(qhi > qlo)) return 0.0;
    // |K(q, eta0)|^2 oscillates in q no faster than ~pi |1 - lambda| for the
    // chirped generators; 2x margin plus a unit-scale floor
    const double omega_q = 2.0 * pi * (1.0 + std::abs(1.0 - ev.lambda_value()));
    PanelGrid panels(qlo, qhi, omega_q, cuts);
    double acc = 0.0;
    for (std::size_t i = 0; i < panels.nodes.size(); ++i)
        acc += panels.weights[i] * std::norm(ev.at(panels.nodes[i], eta0));
    return acc;
}

} // namespace detail

// sigma_{V^t(psi)}(eta) = integral |K_psi(q, eta)|^2 dq at lambda = 1
// (Parseval-generator form).
inline SpectralFunction sigma_principal(const Field2D& psi, const std::vector<double>& eta_grid) {
    SpectralFunction s;
    s.eta = eta_grid;
    s.values.assign(eta_grid.size(), 0.0);
    parallel_for(0, eta_grid.size(), [&](std::size_t q) {
        KernelColumnEvaluator ev(psi, Dyadic::from_int(1));
        s.values[q] = detail::kernel_column_mass(psi, ev, eta_grid[q]);
    });
    return s;
}

// General form: ratio of the kernel-column mass to the bracket on Omega_psi,
// zero off the support set.
inline double sigma_general(const Field2D& psi, const BracketMap& b, double xi, double xip,
                            double eta) {
    auto nearest = [&](double x) {
        const double t = x * double(b.n_t) - 0.5;
        const long i = std::lround(t);
        return std::size_t(std::clamp<long>(i, 0, long(b.n_t) - 1));
    };
    const std::size_t i = nearest(xi);
    const std::size_t ip = nearest(xip);
    if (!b.in_omega(i, ip)) return 0.0;
    KernelColumnEvaluator ev(psi, Dyadic::from_int(1));
    return detail::kernel_column_mass(psi, ev, eta) / b.at(i, ip);
}

// sigma of a finite orthogonal decomposition: node-wise sum of the principal
// spectral functions.
inline SpectralFunction sigma_sum(const std::vector<Field2D>& gens,
                                  const std::vector<double>& eta_grid) {
    SpectralFunction s;
    s.eta = eta_grid;
    s.values.assign(eta_grid.size(), 0.0);
    for (const Field2D& g : gens) {
        const SpectralFunction si = sigma_principal(g, eta_grid);
        for (std::size_t q = 0; q < s.values.size(); ++q) s.values[q] += si.values[q];
    }
    return s;
}

// sigma_{W_{0,j}}(eta) = 2^j integral |K^{2^{-2j}}_{psi_j}(q, 2^j eta)|^2 dq.
// 2^j eta generally falls off any fixed kernel grid, so every column is
// recomputed at the exact argument.
inline SpectralFunction sigma_w0j(const Field2D& psi_j, int j,
                                  const std::vector<double>& eta_grid) {
    SpectralFunction s;
    s.eta = eta_grid;
    s.values.assign(eta_grid.size(), 0.0);
    const Dyadic lam = dyadic_lambda_for_level(j);
    const double pj = std::ldexp(1.0, j);
    parallel_for(0, eta_grid.size(), [&](std::size_t q) {
        KernelColumnEvaluator ev(psi_j, lam);
        s.values[q] = pj * detail::kernel_column_mass(psi_j, ev, pj * eta_grid[q]);
    });
    return s;
}

// Discrete Calderon sum over the family's j-range, with per-j contribution
// curves retained for diagnosis.
struct CalderonCurve {
    SpectralFunction total;
    std::vector<std::pair<int, SpectralFunction>> terms;
};

inline CalderonCurve calderon_sum(const GeneratorFamily& fam,
                                  const std::vector<double>& eta_grid) {
    CalderonCurve out;
    out.total.eta = eta_grid;
    out.total.values.assign(eta_grid.size(), 0.0);
    out.terms.resize(fam.gens.size());
    parallel_for(0, fam.gens.size(), [&](std::size_t t) {
        const auto& [j, psi] = fam.gens[t];
        out.terms[t] = {j, sigma_w0j(psi, j, eta_grid)};
    });
    // deterministic ordered reduction
    for (const auto& [j, term] : out.terms)
        for (std::size_t q = 0; q < eta_grid.size(); ++q)
            out.total.values[q] += term.values[q];
    return out;
}

// L^1 diagnostic of the spectral curve over its window.
inline double sigma_l1(const SpectralFunction& s) { return s.integral(); }

// Key-inequality check for a lattice element g of the twisted span (the
// inequality's subject is f = D_{2^j} g, whose dilated image lies in the
// span). The kernel relation collapses the left side onto g itself:
//   LHS = 2^{j/2} integral_{T^2} integral_1^2 | sum_m K^{2^{2j}}_f(2^{-j}(xi+m), eta) e^{-2 pi i m xi'} | d eta d xi d xi'
//       = 2^{j/2} integral | Z_W g (xi, xi', 2^j eta) |,
//   RHS = sqrt( integral_{2^j}^{2^{j+1}} sigma_V ),
// with the series truncated at M and sigma_V summed over the generators.
inline VerificationReport mainineq_check(const Field2D& g, const std::vector<Field2D>& gens,
                                         int j, int M = 24, std::size_t n_t = 0,
                                         int eta_points = 32, double tolerance = 1e-6) {
    if (j < 0) throw std::invalid_argument("mainineq_check: j must be >= 0");
    const std::size_t nt = n_t ? n_t : std::size_t(2 * M + 2);
    const double pj = std::ldexp(1.0, j);

    // eta in [1, 2] by GL panels
    PanelGrid fine(1.0, 2.0, double(eta_points) / 2.0, {}, 16);

    std::vector<double> slice(fine.nodes.size(), 0.0);
    parallel_for(0, fine.nodes.size(), [&](std::size_t qi) {
        KernelColumnEvaluator ev(g, Dyadic::from_int(1));
        const double eta = fine.nodes[qi];
        double acc = 0.0;
        std::vector<cplx> col(std::size_t(2 * M + 1));
        for (std::size_t i = 0; i < nt; ++i) {
            const double xi = (double(i) + 0.5) / double(nt);
            bool any = false;
            for (int m = -M; m <= M; ++m) {
                col[std::size_t(m + M)] = ev.at(double(m) + xi, pj * eta);
                any = any || col[std::size_t(m + M)] != cplx(0, 0);
            }
            if (!any) continue;
            for (std::size_t ip = 0; ip < nt; ++ip) {
                const double xip = (double(ip) + 0.5) / double(nt);
                cplx z(0, 0);
                for (int m = -M; m <= M; ++m)
                    z += col[std::size_t(m + M)] * unit_phase(-2.0 * pi * double(m) * xip);
                acc += std::abs(z);
            }
        }
        slice[qi] = acc / double(nt * nt);
    });
    double lhs = 0.0;
    for (std::size_t qi = 0; qi < fine.nodes.size(); ++qi) lhs += fine.weights[qi] * slice[qi];
    lhs *= std::sqrt(pj);

    // RHS: sigma_V integrated over [2^j, 2^{j+1})
    PanelGrid band(pj, 2.0 * pj, 0.0, {}, 16);
    double rhs_sq = 0.0;
    for (const Field2D& gen : gens) {
        KernelColumnEvaluator ev(gen, Dyadic::from_int(1));
        for (std::size_t qi = 0; qi < band.nodes.size(); ++qi)
            rhs_sq += band.weights[qi] * detail::kernel_column_mass(gen, ev, band.nodes[qi]);
    }
    const double rhs = std::sqrt(std::max(0.0, rhs_sq));

    VerificationReport r;
    r.check_name = "spectral.main_inequality";
    r.parameters["j"] = std::to_string(j);
    r.parameters["M"] = std::to_string(M);
    r.metrics["lhs"] = lhs;
    r.metrics["rhs"] = rhs;
    r.metrics["slack"] = rhs - lhs;
    r.tolerance = tolerance;
    r.pass = lhs <= rhs + tolerance;
    return r;
}

inline void spectral_to_csv(std::ostream& os, const CalderonCurve& c) {
    os << "eta,total";
    for (const auto& [j, term] : c.terms) os << ",j_" << j;
    os << "\n";
    char buf[64];
    for (std::size_t q = 0; q < c.total.eta.size(); ++q) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", c.total.eta[q], c.total.values[q]);
        os << buf;
        for (const auto& [j, term] : c.terms) {
            std::snprintf(buf, sizeof buf, ",%.17g", term.values[q]);
            os << buf;
        }
        os << "\n";
    }
}

inline void sigma_to_csv(std::ostream& os, const SpectralFunction& s) {
    os << "eta,value\n";
    char buf[80];
    for (std::size_t q = 0; q < s.eta.size(); ++q) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.eta[q], s.values[q]);
        os << buf;
    }
}

} // namespace twc
