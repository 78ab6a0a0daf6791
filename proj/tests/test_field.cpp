#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "twc/field.hpp"
#include "twc/wavelet.hpp"

#include "oracles.hpp"

using namespace twc;

namespace {

Field2D unit_gaussian(double extent = 8.0) {
    // ||g||_{L^2} = 1: g(x,y) = sqrt(2) exp(-pi (x^2 + y^2))
    auto ev = [](double x, double y) -> cplx {
        return cplx(std::sqrt(2.0) * std::exp(-pi * (x * x + y * y)), 0.0);
    };
    return Field2D::analytic(ev, extent);
}

} // namespace

TEST_CASE("grid invariants") {
    CHECK_NOTHROW(GridSpec(2.0, 4));
    CHECK_NOTHROW(GridSpec(8.0, 2048));
    CHECK_THROWS_AS(GridSpec(2.0, 5), GridError);      // not a power of two
    CHECK_THROWS_AS(GridSpec(3.0, 4), GridError);      // 1/h = 2/3
    CHECK_THROWS_AS(GridSpec(-1.0, 4), GridError);
    const GridSpec g(2.0, 8);
    CHECK(g.h() == 0.5);
    CHECK(g.inv_h() == 2);
    CHECK(g.node(0) == -2.0);
    CHECK(g.node(7) == 1.5);
}

TEST_CASE("sample: zero and constant fields") {
    const GridSpec g(2.0, 4);
    const Field2D zero = Field2D::analytic([](double, double) { return cplx(0, 0); }, 2.0);
    const Field2D zs = sample(zero, g);
    for (const cplx& v : zs.data()) CHECK(v == cplx(0, 0));

    const cplx c(0.7, -0.3);
    const Field2D cf = Field2D::analytic([c](double, double) { return c; }, 2.0);
    const Field2D cs = sample(cf, g);
    CHECK(cs.data().size() == 16);
    for (const cplx& v : cs.data()) CHECK(std::abs(v - c) < 1e-15);
}

TEST_CASE("haar generator point value") {
    const Field2D psi0 = haar_generator(0);
    // psi_0(0.25, 0.25) = exp(i pi / 16)
    const cplx got = psi0.eval(0.25, 0.25);
    CHECK(std::abs(got - unit_phase(pi / 16.0)) < 1e-15);
    CHECK(psi0.eval(-0.25, 0.5) == cplx(0, 0));
    CHECK(psi0.eval(1.25, 0.5) == cplx(0, 0));
    // support rule: zero for x outside [0,1]
    const Field2D psi2 = haar_generator(2);
    CHECK(psi2.eval(1.0001, 0.3) == cplx(0, 0));
}

TEST_CASE("inner product and norms") {
    const GridSpec g(8.0, 512);
    const Field2D gs = sample(unit_gaussian(), g);

    SUBCASE("unit gaussian has unit norm (analytic integral oracle)") {
        CHECK(std::abs(inner(gs, gs).real() - 1.0) < 1e-9);
        CHECK(std::abs(l2_norm(gs) - 1.0) < 1e-9);
    }
    SUBCASE("inner with zero field vanishes") {
        const Field2D z = Field2D::zero(g);
        CHECK(inner(gs, z) == cplx(0, 0));
        CHECK(l2_norm(z) == 0.0);
    }
    SUBCASE("conjugate symmetry exactly as computed") {
        std::vector<cplx> d1(g.n * g.n), d2(g.n * g.n);
        for (std::size_t i = 0; i < d1.size(); ++i) {
            d1[i] = cplx(std::sin(0.01 * double(i)), std::cos(0.02 * double(i)));
            d2[i] = cplx(std::cos(0.03 * double(i)), 0.5 * std::sin(0.05 * double(i)));
        }
        const Field2D f1 = Field2D::sampled(g, d1), f2 = Field2D::sampled(g, d2);
        CHECK(inner(f1, f2) == std::conj(inner(f2, f1)));
    }
    SUBCASE("homogeneity: scaling doubles the norm") {
        std::vector<cplx> d = gs.data();
        for (auto& v : d) v *= 2.0;
        const Field2D g2 = Field2D::sampled(g, d);
        CHECK(std::abs(l2_norm(g2) - 2.0 * l2_norm(gs)) < 1e-12);
    }
    SUBCASE("grid mismatch rejected") {
        const Field2D other = sample(unit_gaussian(), GridSpec(8.0, 256));
        CHECK_THROWS_AS((void)inner(gs, other), GridError);
    }
}

TEST_CASE("haar wavelets with disjoint supports have zero inner product") {
    const GridSpec g(8.0, 1024);
    const Field2D a = sample(wavelet_op(haar_generator(0), 0, 0, 0), g);
    const Field2D b = sample(wavelet_op(haar_generator(0), 0, 3, 0), g);
    CHECK(std::abs(inner(a, b)) == 0.0);
}

TEST_CASE("haar norms are exactly one on dyadic grids") {
    const GridSpec g(8.0, 1024);
    for (int j : {-1, 0, 1, 2}) {
        const Field2D s = sample(haar_generator(j), g);
        CHECK(std::abs(l2_norm(s) - 1.0) < 1e-12);
    }
}

TEST_CASE("resampling: refine then coarsen reproduces node values") {
    const GridSpec fine(4.0, 256), coarse(4.0, 64);
    const Field2D base = sample(unit_gaussian(4.0), coarse);
    const Field2D up = sample(base, fine);
    const Field2D back = sample(up, coarse);
    for (std::size_t i = 0; i < base.data().size(); ++i)
        CHECK(back.data()[i] == base.data()[i]);
    CHECK(back.interp() == Interp::Nearest);

    SUBCASE("incommensurate grids rejected") {
        CHECK_THROWS_AS(sample(base, GridSpec(8.0, 64)), GridError);
    }
}

TEST_CASE("linear interpolation is recorded and midpoint-exact for linear data") {
    const GridSpec g(2.0, 8);
    std::vector<cplx> d(g.n * g.n);
    for (std::size_t iy = 0; iy < g.n; ++iy)
        for (std::size_t ix = 0; ix < g.n; ++ix)
            d[iy * g.n + ix] = cplx(g.node(ix) + 2.0 * g.node(iy), 0.0);
    const Field2D f = Field2D::sampled(g, d, Interp::Linear);
    CHECK(f.interp() == Interp::Linear);
    // midpoints of interior cells reproduce the linear function exactly
    CHECK(std::abs(f.eval(0.25, -0.75) - cplx(0.25 - 1.5, 0.0)) < 1e-14);
    const Field2D up = sample(f, GridSpec(2.0, 16), Interp::Linear);
    CHECK(up.interp() == Interp::Linear);
}

TEST_CASE("field serialization round trip") {
    const GridSpec g(2.0, 8);
    std::vector<cplx> d(g.n * g.n);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = cplx(double(i), -0.5 * double(i));
    const Field2D f = Field2D::sampled(g, d);
    std::stringstream ss;
    write_field(ss, f);
    const Field2D back = read_field(ss);
    CHECK(back.grid() == g);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back.data()[i] == d[i]);

    SUBCASE("bad magic rejected") {
        std::stringstream bad("XXXXjunkjunkjunk");
        CHECK_THROWS_AS(read_field(bad), IoError);
    }
}

TEST_CASE("boxed_inner prunes disjoint supports without evaluation") {
    const GridSpec g(8.0, 256);
    bool touched = false;
    auto ev = [&touched](double, double) -> cplx {
        touched = true;
        return cplx(1, 0);
    };
    const Field2D a = Field2D::analytic(ev, 8.0, SupportBox{0, 1, 0, 1});
    const Field2D b = Field2D::analytic([](double, double) { return cplx(1, 0); }, 8.0,
                                        SupportBox{3, 4, 0, 1});
    CHECK(boxed_inner(a, b, g) == cplx(0, 0));
    CHECK_FALSE(touched);
}
