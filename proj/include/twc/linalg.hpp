#pragma once

#include <algorithm>
#include <vector>

#include "twc/grid.hpp"

namespace twc {

// Eigenvalues of a hermitian matrix (row-major, n x n) by cyclic complex
// Jacobi sweeps: each pivot strips the off-diagonal phase, then applies the
// classic real rotation. Sizes here stay in the few-hundreds, so O(n^3)
// sweeps are fine and keep the dependency surface empty.
inline std::vector<double> hermitian_eigenvalues(std::vector<cplx> A, std::size_t n) {
    auto at = [&](std::size_t r, std::size_t c) -> cplx& { return A[r * n + c]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(at(p, q));
        if (off < 1e-28 * double(n * n)) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = at(p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                const cplx w = std::conj(apq) / mag; // e^{-i phi}
                const double app = at(p, p).real(), aqq = at(q, q).real();
                const double tau = (app - aqq) / (2.0 * mag);
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sg = t * c;
                // A <- J^H A J, J = [[c, -sg],[sg w, c w]] on the (p,q) plane
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx arp = at(r, p), arq = at(r, q);
                    at(r, p) = c * arp + sg * w * arq;
                    at(r, q) = -sg * arp + c * w * arq;
                }
                for (std::size_t cx = 0; cx < n; ++cx) {
                    const cplx apc = at(p, cx), aqc = at(q, cx);
                    at(p, cx) = c * apc + sg * std::conj(w) * aqc;
                    at(q, cx) = -sg * apc + c * std::conj(w) * aqc;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

} // namespace twc
