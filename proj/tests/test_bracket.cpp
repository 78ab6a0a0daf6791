#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "twc/bracket.hpp"
#include "twc/wavelet.hpp"

#include "oracles.hpp"

using namespace twc;

namespace {

ZakParams zp(int M, double H, std::size_t n_eta, std::size_t n_t = 0) {
    ZakParams p;
    p.M = M;
    p.H = H;
    p.n_eta = n_eta;
    p.n_t = n_t;
    return p;
}

Field2D haar_pair_generator() {
    // phi = psi_0 + 0.5 T^t_{(1,0)} psi_0 : bracket |1 + 0.5 e^{2 pi i xi}|^2
    const Field2D psi = haar_generator(0);
    return linear_combination({cplx(1, 0), cplx(0.5, 0)},
                              {psi, twisted_translate(psi, TwistIndex(1, 0, Dyadic::from_int(1)))});
}

} // namespace

TEST_CASE("jacobi eigenvalues on a known hermitian matrix") {
    // A = [[2, i, 0], [-i, 2, 0], [0, 0, 1]]: eigenvalues {1, 1, 3}
    std::vector<cplx> A = {cplx(2, 0), cplx(0, 1),  cplx(0, 0),
                           cplx(0, -1), cplx(2, 0), cplx(0, 0),
                           cplx(0, 0),  cplx(0, 0), cplx(1, 0)};
    const auto eig = hermitian_eigenvalues(A, 3);
    CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("jacobi eigenvalues against a constructed spectrum") {
    // unitary conjugation of a known diagonal by Givens-like factors
    const std::size_t n = 6;
    std::vector<double> want = {-2.0, -0.5, 0.0, 1.25, 3.0, 7.5};
    std::vector<cplx> A(n * n, cplx(0, 0));
    for (std::size_t i = 0; i < n; ++i) A[i * n + i] = want[i];
    auto rotate = [&](std::size_t p, std::size_t q, double th, double ph) {
        const double c = std::cos(th);
        const cplx s = std::sin(th) * unit_phase(ph);
        std::vector<cplx> B = A;
        for (std::size_t r = 0; r < n; ++r) {
            B[r * n + p] = c * A[r * n + p] + s * A[r * n + q];
            B[r * n + q] = -std::conj(s) * A[r * n + p] + c * A[r * n + q];
        }
        A = B;
        B = A;
        for (std::size_t cx = 0; cx < n; ++cx) {
            B[p * n + cx] = c * A[p * n + cx] + std::conj(s) * A[q * n + cx];
            B[q * n + cx] = -s * A[p * n + cx] + c * A[q * n + cx];
        }
        A = B;
    };
    rotate(0, 3, 0.7, 1.3);
    rotate(1, 4, -1.1, 0.4);
    rotate(2, 5, 0.3, -2.2);
    rotate(0, 5, 2.0, 0.9);
    const auto eig = hermitian_eigenvalues(A, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(eig[i] == doctest::Approx(want[i]).epsilon(1e-10));
}

TEST_CASE("bracket of the zero field is degenerate") {
    const Field2D z = Field2D::analytic([](double, double) { return cplx(0, 0); }, 64.0);
    const BracketMap b = bracket(z, zp(2, 2.0, 32));
    for (double v : b.data) CHECK(v == 0.0);
    const FrameBounds fb = frame_bounds(b);
    CHECK(fb.degenerate);
}

TEST_CASE("bracket values are nonnegative and L1-bounded by the norm") {
    const BracketMap b = bracket(haar_generator(0), zp(16, 20.0, 384));
    for (double v : b.data) CHECK(v >= 0.0);
    CHECK(b.l1_norm() <= 1.0 + 1e-9);
    CHECK(b.l1_norm() > 0.9);
}

TEST_CASE("orthonormal haar translates: bracket is 1 up to the series tail") {
    const BracketMap b = bracket(haar_generator(0), zp(16, 20.0, 384));
    // tail of sigma beyond |a| ~ M is about 0.3/M ~ 0.019
    for (double v : b.data) CHECK(std::abs(v - 1.0) < 0.05);
    const FrameBounds fb = frame_bounds(b);
    CHECK(std::abs(fb.A - 1.0) < 0.05);
    CHECK(std::abs(fb.B - 1.0) < 0.05);
}

TEST_CASE("bracket is invariant under twisted translation of the generator") {
    const Field2D phi = designed_generator();
    const ZakParams p = zp(6, 3.0, 128, 16);
    const BracketMap base = bracket(phi, p);
    for (auto [k, l] : {std::pair<int, int>{1, 0}, {0, 1}, {2, -1}, {-2, 2}}) {
        const BracketMap tr =
            bracket(twisted_translate(phi, TwistIndex(k, l, Dyadic::from_int(1))), p);
        double dev = 0.0;
        for (std::size_t i = 0; i < base.data.size(); ++i)
            dev = std::max(dev, std::abs(base.data[i] - tr.data[i]));
        CHECK(dev < 1e-10);
    }
}

TEST_CASE("membership residuals") {
    const Field2D phi = designed_generator();
    const ZakParams p = zp(6, 3.0, 192, 16);
    SUBCASE("f = phi: r = 1 on Omega, residual ~ 0") {
        const auto res = membership_residual(phi, phi, p);
        // residual floor: Zak mass below the Omega threshold stays unmatched
        CHECK(res.residual < 1e-4);
        const BracketMap b = bracket(phi, p);
        for (std::size_t i = 0; i < res.r.size(); ++i)
            if (b.omega_mask[i]) CHECK(std::abs(res.r[i] - cplx(1, 0)) < 1e-9);
    }
    SUBCASE("f = T^t_{(k,l)} phi: r is the modulation phase") {
        const auto res = membership_residual(
            twisted_translate(phi, TwistIndex(1, 1, Dyadic::from_int(1))), phi, p);
        CHECK(res.residual < 1e-4);
        const BracketMap b = bracket(phi, p);
        const std::size_t nt = res.n_t;
        for (std::size_t i = 0; i < nt; ++i)
            for (std::size_t ip = 0; ip < nt; ++ip) {
                if (!b.in_omega(i, ip)) continue;
                const cplx want = unit_phase(2.0 * pi * (b.xi(i) + b.xip(ip))) * unit_phase(pi);
                CHECK(std::abs(res.r[i * nt + ip] - want) < 1e-8);
            }
    }
    SUBCASE("f with disjoint Zak support is fully orthogonal: residual ~ 1") {
        const Field2D f = designed_generator_band(2.0, 4.0); // eta support disjoint from [-1,1]
        const auto res = membership_residual(f, phi, zp(6, 6.0, 384, 16));
        CHECK(std::abs(res.residual - 1.0) < 1e-6);
    }
}

TEST_CASE("haar lattice gram is the identity at dyadic quadrature") {
    const GridSpec g(8.0, 512);
    const auto G = gram_lattice(haar_generator(0), 2, g);
    const std::size_t dim = 25;
    double dev = 0.0;
    for (std::size_t a = 0; a < dim; ++a)
        for (std::size_t b = 0; b < dim; ++b) {
            const cplx want = a == b ? cplx(1, 0) : cplx(0, 0);
            dev = std::max(dev, std::abs(G[a * dim + b] - want));
        }
    CHECK(dev < 1e-12);
}

TEST_CASE("frame bounds bracket the truncated gram spectrum") {
    const Field2D phi = haar_pair_generator();
    const BracketMap b = bracket(phi, zp(16, 20.0, 384));
    const FrameBounds fb = frame_bounds(b);
    // exact essential range of |1 + 0.5 e^{2 pi i xi}|^2 is [0.25, 2.25]
    CHECK(fb.A > 0.2);
    CHECK(fb.B < 2.3);

    const GridSpec g(16.0, 1024);
    const std::int64_t radius = 4;
    const auto G = gram_lattice(phi, radius, g);
    const std::size_t dim = std::size_t(2 * radius + 1) * std::size_t(2 * radius + 1);
    const auto eig = hermitian_eigenvalues(G, dim);
    const double lmin = eig.front(), lmax = eig.back();
    CHECK(lmin >= 0.25 - 1e-9);
    CHECK(lmax <= 2.25 + 1e-9);
    CHECK(fb.A <= lmin + 0.05);
    CHECK(fb.B >= lmax - 0.05);
}

TEST_CASE("bracket csv export") {
    const BracketMap b = bracket(designed_generator(), zp(2, 2.0, 32, 8));
    std::stringstream ss;
    bracket_to_csv(ss, b);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "xi,xip,value");
    std::size_t rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == b.n_t * b.n_t);
}
