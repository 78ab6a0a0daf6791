#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twc/ops.hpp"
#include "twc/wavelet.hpp"

#include "oracles.hpp"

using namespace twc;

namespace {

Field2D unit_gaussian(double extent = 8.0) {
    auto ev = [](double x, double y) -> cplx {
        return cplx(std::sqrt(2.0) * std::exp(-pi * (x * x + y * y)), 0.0);
    };
    return Field2D::analytic(ev, extent);
}

double max_node_dev(const Field2D& a, const Field2D& b, const GridSpec& g) {
    const Field2D sa = sample(a, g), sb = sample(b, g);
    double dev = 0.0;
    for (std::size_t i = 0; i < sa.data().size(); ++i)
        dev = std::max(dev, std::abs(sa.data()[i] - sb.data()[i]));
    return dev;
}

} // namespace

TEST_CASE("twisted translation basics") {
    const Field2D psi0 = haar_generator(0);

    SUBCASE("identity index leaves the field unchanged") {
        const Field2D t = twisted_translate(psi0, TwistIndex(0, 0, Dyadic::from_int(1)));
        for (double x : {0.1, 0.3, 0.75})
            for (double y : {0.2, 0.6})
                CHECK(std::abs(t.eval(x, y) - psi0.eval(x, y)) < 1e-15);
    }
    SUBCASE("pointwise value against the defining formula") {
        // T^t_{(1,0)} psi_0 at (1.25, 0.25) = exp(-i pi 0.25) psi_0(0.25, 0.25)
        const Field2D t = twisted_translate(psi0, TwistIndex(1, 0, Dyadic::from_int(1)));
        const cplx want = unit_phase(-pi * 0.25) * psi0.eval(0.25, 0.25);
        CHECK(std::abs(t.eval(1.25, 0.25) - want) < 1e-15);
    }
    SUBCASE("norm preserved when the shifted support stays in the box") {
        const GridSpec g(8.0, 512);
        const Field2D t = twisted_translate(psi0, TwistIndex(3, -2, Dyadic::from_int(1)));
        CHECK(std::abs(l2_norm(sample(t, g)) - 1.0) < 1e-12);
    }
    SUBCASE("sampled path: exact index roll with phases") {
        const GridSpec g(4.0, 64);
        const Field2D s = sample(psi0, g);
        const TwistIndex t(1, 2, Dyadic(1, 2)); // lambda = 1/4
        const Field2D rolled = twisted_translate(s, t);
        const Field2D ana = sample(twisted_translate(psi0, t), g);
        for (std::size_t i = 0; i < rolled.data().size(); ++i)
            CHECK(std::abs(rolled.data()[i] - ana.data()[i]) < 1e-14);
    }
}

TEST_CASE("composition law phases") {
    // eq-style: (1,0),(0,1) at lambda=1 -> exp(-i pi) = -1
    const cplx p1 = composition_phase(TwistIndex(1, 0, Dyadic::from_int(1)),
                                      TwistIndex(0, 1, Dyadic::from_int(1)));
    CHECK(std::abs(p1 - cplx(-1.0, 0.0)) < 1e-15);
    // equal indices commute: phase 1
    const cplx p2 = composition_phase(TwistIndex(3, -2, Dyadic(1, 4)),
                                      TwistIndex(3, -2, Dyadic(1, 4)));
    CHECK(std::abs(p2 - cplx(1.0, 0.0)) < 1e-15);
    // (2,0),(0,1) at lambda = 1/2 -> exp(-i pi) = -1
    const cplx p3 = composition_phase(TwistIndex(2, 0, Dyadic(1, 1)),
                                      TwistIndex(0, 1, Dyadic(1, 1)));
    CHECK(std::abs(p3 - cplx(-1.0, 0.0)) < 1e-15);
    CHECK_THROWS_AS(composition_phase(TwistIndex(1, 0, Dyadic(1, 1)),
                                      TwistIndex(0, 1, Dyadic(1, 2))),
                    std::invalid_argument);
}

TEST_CASE("composition law holds node-for-node on analytic fields") {
    const GridSpec g(4.0, 64);
    const Field2D f = unit_gaussian(4.0);
    for (int twoj : {0, 2, 4}) {
        const Dyadic lam = Dyadic::pow2(-twoj);
        for (auto [k1, l1, k2, l2] :
             {std::array<int, 4>{1, 0, 0, 1}, {2, -1, 1, 1}, {-2, 2, 2, -1}}) {
            const TwistIndex t1(k1, l1, lam), t2(k2, l2, lam);
            const Field2D lhs = twisted_translate(twisted_translate(f, t2), t1);
            const cplx c = composition_phase(t1, t2);
            Field2D combined = twisted_translate(f, TwistIndex(k1 + k2, l1 + l2, lam));
            const Field2D sl = sample(lhs, g), sr = sample(combined, g);
            double dev = 0.0;
            for (std::size_t i = 0; i < sl.data().size(); ++i)
                dev = std::max(dev, std::abs(sl.data()[i] - c * sr.data()[i]));
            CHECK(dev < 1e-12);
        }
    }
}

TEST_CASE("interchange law: outer twisted translate through the dilation") {
    // T^t_{(k',l')} D_{2^j} (T^t_{(k,l)})^{2^{-2j}} f
    //   = exp(-i pi 2^{-2j} (2^j k' l - 2^j l' k)) D_{2^j} (T^t_{(2^j k'+k, 2^j l'+l)})^{2^{-2j}} f
    const GridSpec g(4.0, 64);
    const Field2D f = unit_gaussian(4.0);
    for (int j : {0, 1, 2}) {
        const Dyadic lam = dyadic_lambda_for_level(j);
        const std::int64_t tj = std::int64_t(1) << j;
        for (auto [kp, lp, k, l] : {std::array<int, 4>{1, 0, 0, 1}, {1, -1, 2, 1}, {0, 2, -1, 0}}) {
            const Field2D lhs = twisted_translate(wavelet_op(f, j, k, l),
                                                  TwistIndex(kp, lp, Dyadic::from_int(1)));
            const cplx phase =
                unit_phase_pi_dyadic(lam, -(tj * kp * l - tj * lp * k));
            const Field2D rhs = wavelet_op(f, j, tj * kp + k, tj * lp + l);
            double dev = 0.0;
            const Field2D sl = sample(lhs, g), sr = sample(rhs, g);
            for (std::size_t i = 0; i < sl.data().size(); ++i)
                dev = std::max(dev, std::abs(sl.data()[i] - phase * sr.data()[i]));
            CHECK(dev < 5e-12);
        }
    }
}

TEST_CASE("dilation") {
    SUBCASE("m = 0 is the identity") {
        const Field2D f = unit_gaussian();
        const Field2D d = dilate(f, 0);
        CHECK(std::abs(d.eval(0.3, -0.4) - f.eval(0.3, -0.4)) < 1e-16);
    }
    SUBCASE("norm preserved for gaussians across m in {-2..2}") {
        const GridSpec g(8.0, 1024);
        for (int m = -2; m <= 2; ++m) {
            const Field2D d = sample(dilate(unit_gaussian(32.0), m), g);
            CHECK(std::abs(l2_norm(d) - 1.0) < 1e-8);
        }
    }
    SUBCASE("group law on analytic fields") {
        const Field2D f = unit_gaussian();
        const Field2D rt = dilate(dilate(f, 1), -1);
        for (double x : {0.0, 0.7, -1.3})
            CHECK(std::abs(rt.eval(x, 0.25) - f.eval(x, 0.25)) < 1e-15);
    }
}

TEST_CASE("wavelet_op matches the closed form for Haar") {
    // D_{2^j} (T^t)^{2^{-2j}}_{(k,l)} psi_j (x,y)
    //   = 2^j exp(i pi (2^{2j} x y - 2^{j+1} y k + k l) 2^{-2j}) chi(2^j x - k) chi(2^j y - l)
    for (auto [j, k, l] : {std::array<int, 3>{0, 0, 0}, {1, 1, 1}, {1, -2, 3}, {-1, 1, -1}, {2, 3, 1}}) {
        const Field2D e = wavelet_op(haar_generator(j), j, k, l);
        const double pj = std::ldexp(1.0, j);
        const double lam = std::ldexp(1.0, -2 * j);
        for (double x : {0.1, 0.31, 0.77, 1.21})
            for (double y : {0.13, 0.52, 0.96}) {
                const cplx want = pj *
                                  unit_phase(pi * lam * (pj * pj * x * y - 2.0 * pj * y * k +
                                                         double(k) * double(l))) *
                                  haar_chi(pj * x - k) * haar_chi(pj * y - l);
                CHECK(std::abs(e.eval(x, y) - want) < 1e-13);
            }
    }
    SUBCASE("(j,k,l,m) = (0,0,0,0) is the generator itself") {
        const Field2D e = wavelet_op(haar_generator(0), 0, 0, 0, 0);
        CHECK(std::abs(e.eval(0.25, 0.25) - haar_generator(0).eval(0.25, 0.25)) < 1e-16);
    }
    SUBCASE("build_system example (1,1,1): 2 exp(i pi (4xy - 4y + 1)/4) chi(2x-1) chi(2y-1)") {
        const GeneratorFamily fam = haar_family(1, 1);
        const auto sys = build_system(fam, {SystemIndex{1, 1, 1, 0}}, false);
        for (double x : {0.6, 0.9})
            for (double y : {0.55, 0.8}) {
                const cplx want = 2.0 * unit_phase(pi * (4 * x * y - 4 * y + 1) / 4.0) *
                                  haar_chi(2 * x - 1) * haar_chi(2 * y - 1);
                CHECK(std::abs(sys[0].eval(x, y) - want) < 1e-13);
            }
    }
    SUBCASE("unit norms with support inside the box") {
        const GridSpec g(8.0, 1024);
        for (auto [j, k, l] : {std::array<int, 3>{0, 2, -1}, {1, 1, 1}, {-1, -2, 0}}) {
            CHECK(std::abs(l2_norm(sample(wavelet_op(haar_generator(j), j, k, l), g)) - 1.0) <
                  1e-12);
        }
    }
}

TEST_CASE("coset factorization identity (interchange orientation)") {
    // T^t_{(p,q)} wavelet_op(psi, j, r, s) = phase * wavelet_op(psi, j, k, l)
    const GridSpec g(8.0, 256);
    const Field2D psi1 = haar_generator(1), psi2 = haar_generator(2);
    for (auto [k, l, j] : {std::array<int, 3>{5, 3, 2}, {3, 1, 1}, {-1, 0, 1}, {-5, 7, 2}}) {
        const Field2D& psi = (j == 1) ? psi1 : psi2;
        const auto d = coset_decompose(k, l, j);
        CHECK(d.p * (std::int64_t(1) << j) + d.r == k);
        CHECK(d.q * (std::int64_t(1) << j) + d.s == l);
        CHECK(d.r >= 0);
        CHECK(d.r < (std::int64_t(1) << j));
        CHECK(d.s >= 0);
        CHECK(d.s < (std::int64_t(1) << j));
        const Field2D lhs = twisted_translate(wavelet_op(psi, j, d.r, d.s),
                                              TwistIndex(d.p, d.q, Dyadic::from_int(1)));
        const Field2D rhs = wavelet_op(psi, j, k, l);
        double dev = 0.0;
        const Field2D sl = sample(lhs, g), sr = sample(rhs, g);
        for (std::size_t i = 0; i < sl.data().size(); ++i)
            dev = std::max(dev, std::abs(sl.data()[i] - d.phase * sr.data()[i]));
        CHECK(dev < 1e-13);
    }
}

TEST_CASE("coset decomposition pinned examples") {
    SUBCASE("j = 0 is trivial") {
        const auto d = coset_decompose(4, -7, 0);
        CHECK(d.p == 4);
        CHECK(d.q == -7);
        CHECK(d.r == 0);
        CHECK(d.s == 0);
        CHECK(std::abs(d.phase - cplx(1, 0)) < 1e-15);
    }
    SUBCASE("(5,3,2) -> (1,0,1,3), phase exp(-3 pi i / 4)") {
        const auto d = coset_decompose(5, 3, 2);
        CHECK(d.p == 1);
        CHECK(d.q == 0);
        CHECK(d.r == 1);
        CHECK(d.s == 3);
        CHECK(std::abs(d.phase - unit_phase(-3.0 * pi / 4.0)) < 1e-15);
    }
    SUBCASE("negative k: (-1,0,1) -> (-1,0,1,0), phase 1") {
        const auto d = coset_decompose(-1, 0, 1);
        CHECK(d.p == -1);
        CHECK(d.q == 0);
        CHECK(d.r == 1);
        CHECK(d.s == 0);
        CHECK(std::abs(d.phase - cplx(1, 0)) < 1e-15);
    }
}
