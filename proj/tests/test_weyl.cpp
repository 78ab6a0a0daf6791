#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "twc/weyl.hpp"
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

double rel_scale(const WeylKernel& K) {
    double m = 0.0;
    for (const cplx& v : K.data) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

TEST_CASE("kernel_at matches the closed-form Haar kernel") {
    // K^{2^{-2j}}_{psi_j}(xi, eta) = chi(eta - xi) * m(2^{-2j} eta)
    for (int j : {-1, 0, 1, 2}) {
        const Field2D psi = haar_generator(j);
        const Dyadic lam = dyadic_lambda_for_level(j);
        KernelColumnEvaluator ev(psi, lam);
        for (double xi : {-0.3, 0.1, 0.45})
            for (double eta : {-0.2, 0.3, 0.75, 5.0, 40.0}) {
                const cplx want =
                    oracle::haar_chi(eta - xi) * oracle::haar_m(lam.value() * eta);
                CHECK(std::abs(ev.at(xi, eta) - want) < 1e-11);
            }
    }
}

TEST_CASE("kernel_at for general lambda on the Haar generator") {
    // K^lambda_{psi_0}(xi, eta) = chi(eta - xi) * m(((1+lambda) eta - (1-lambda) xi)/2)
    const Field2D psi = haar_generator(0);
    for (const Dyadic& lam : {Dyadic::from_int(4), Dyadic(1, 2), Dyadic(-1, 0)}) {
        KernelColumnEvaluator ev(psi, lam);
        const double lv = lam.value();
        for (double xi : {-0.4, 0.2})
            for (double eta : {0.1, 0.55, 3.25}) {
                const double beta = 0.5 * ((1.0 + lv) * eta - (1.0 - lv) * xi);
                const cplx want = oracle::haar_chi(eta - xi) * oracle::haar_m(beta);
                CHECK(std::abs(ev.at(xi, eta) - want) < 1e-11);
            }
    }
}

TEST_CASE("kernel_at: sampled fields use the rectangle rule on their grid") {
    const GridSpec g(8.0, 256);
    const Field2D ana = unit_gaussian();
    const Field2D smp = sample(ana, g);
    KernelColumnEvaluator ea(ana, Dyadic::from_int(1));
    KernelColumnEvaluator es(smp, Dyadic::from_int(1));
    for (double xi : {0.0, 0.625})
        for (double eta : {0.25, 1.5}) {
            CHECK(std::abs(ea.at(xi, eta) - es.at(xi, eta)) < 1e-9);
        }
}

TEST_CASE("zero field gives the zero kernel") {
    const GridSpec g(4.0, 64);
    const WeylKernel K = weyl_kernel(Field2D::zero(g), Dyadic::from_int(1), g);
    for (const cplx& v : K.data) CHECK(v == cplx(0, 0));
}

TEST_CASE("fft path equals the direct O(n^3) sum") {
    const GridSpec g(4.0, 128);
    const Field2D f = sample(unit_gaussian(4.0), g);
    for (const Dyadic& lam : {Dyadic::from_int(1), Dyadic(1, 2), Dyadic::from_int(-4)}) {
        const WeylKernel Kd = weyl_kernel(f, lam, g, KernelPath::Direct);
        const WeylKernel Kf = weyl_kernel(f, lam, g, KernelPath::Fft);
        const double scale = rel_scale(Kd);
        double dev = 0.0;
        for (std::size_t i = 0; i < Kd.data.size(); ++i)
            dev = std::max(dev, std::abs(Kd.data[i] - Kf.data[i]));
        CHECK(dev / scale < 1e-12);
    }
}

TEST_CASE("HS norm relation for the gaussian") {
    // ||K^lambda_g|| = |lambda|^{-1/2} ||g||
    const GridSpec g(8.0, 1024);
    const Field2D f = unit_gaussian();
    for (const Dyadic& lam :
         {Dyadic::from_int(4), Dyadic::from_int(-4), Dyadic::from_int(1), Dyadic::from_int(-1),
          Dyadic(1, 2), Dyadic(-1, 2)}) {
        const WeylKernel K = weyl_kernel(f, lam, g);
        const double want = 1.0 / std::sqrt(std::abs(lam.value()));
        CHECK(std::abs(hs_norm(K) - want) < 1e-6);
    }
}

TEST_CASE("HS norm examples: lambda = 1 and 1/4") {
    const GridSpec g(8.0, 1024);
    const Field2D f = unit_gaussian();
    CHECK(std::abs(hs_norm(weyl_kernel(f, Dyadic::from_int(1), g)) - 1.0) < 1e-6);
    CHECK(std::abs(hs_norm(weyl_kernel(f, Dyadic(1, 2), g)) - 2.0) < 1e-6);
    const WeylKernel z = weyl_kernel(Field2D::zero(GridSpec(4.0, 64)), Dyadic(1, 2), GridSpec(4.0, 64));
    CHECK(hs_norm(z) == 0.0);
}

TEST_CASE("kernel is linear in the field") {
    const GridSpec g(4.0, 64);
    const Field2D f1 = sample(unit_gaussian(4.0), g);
    const Field2D f2 = sample(haar_generator(0), g);
    const cplx a(0.3, -1.1), b(-0.7, 0.2);
    std::vector<cplx> mix(g.n * g.n);
    for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = a * f1.data()[i] + b * f2.data()[i];
    const WeylKernel Km = weyl_kernel(Field2D::sampled(g, mix), Dyadic(1, 2), g);
    const WeylKernel K1 = weyl_kernel(f1, Dyadic(1, 2), g);
    const WeylKernel K2 = weyl_kernel(f2, Dyadic(1, 2), g);
    double dev = 0.0;
    for (std::size_t i = 0; i < Km.data.size(); ++i)
        dev = std::max(dev, std::abs(Km.data[i] - (a * K1.data[i] + b * K2.data[i])));
    CHECK(dev < 1e-12);
}

TEST_CASE("inverse kernel round trip on the gaussian") {
    const GridSpec g(8.0, 256);
    const Field2D f = sample(unit_gaussian(), g);
    const WeylKernel K = weyl_kernel(f, Dyadic::from_int(1), g);
    const Field2D back = inverse_weyl_kernel(K, g);
    // interior nodes: skip a margin near the box edge
    const std::size_t margin = g.n / 8;
    double dev = 0.0;
    for (std::size_t iy = margin; iy < g.n - margin; ++iy)
        for (std::size_t ix = margin; ix < g.n - margin; ++ix)
            dev = std::max(dev, std::abs(back.at(ix, iy) - f.at(ix, iy)));
    CHECK(dev < 1e-8);

    SUBCASE("zero kernel inverts to the zero field") {
        WeylKernel Z;
        Z.lambda = Dyadic::from_int(1);
        Z.grid = g;
        Z.data.assign(g.n * g.n, cplx(0, 0));
        const Field2D zf = inverse_weyl_kernel(Z, g);
        for (const cplx& v : zf.data()) CHECK(v == cplx(0, 0));
    }
}

TEST_CASE("inverse of the closed-form Haar kernel recovers the generator coarsely") {
    // the Haar kernel decays like 1/eta, so the box-truncated inversion
    // carries an O(1/(lambda X)) tail plus Gibbs mass at the jump rows;
    // checked in L2 over the box
    const GridSpec g(8.0, 512);
    const Dyadic lam = Dyadic::from_int(1); // j = 0
    WeylKernel K;
    K.lambda = lam;
    K.grid = g;
    K.data.assign(g.n * g.n, cplx(0, 0));
    for (std::size_t ib = 0; ib < g.n; ++ib)
        for (std::size_t ia = 0; ia < g.n; ++ia) {
            const double xi = g.node(ia), eta = g.node(ib);
            K.at(ia, ib) = oracle::haar_chi(eta - xi) * oracle::haar_m(lam.value() * eta);
        }
    const Field2D rec = inverse_weyl_kernel(K, g);
    const Field2D ref = sample(haar_generator(0), g);
    double err2 = 0.0;
    for (std::size_t i = 0; i < rec.data().size(); ++i)
        err2 += std::norm(rec.data()[i] - ref.data()[i]);
    err2 *= g.h() * g.h();
    CHECK(std::sqrt(err2) < 0.25);
    // interior of a constant piece, away from the jumps
    const std::int64_t ix = g.nearest_index(0.25), iy = g.nearest_index(0.25);
    CHECK(std::abs(rec.at(std::size_t(ix), std::size_t(iy)) -
                   ref.at(std::size_t(ix), std::size_t(iy))) < 0.1);
}

TEST_CASE("dilation kernel relations (lemma-style)") {
    SUBCASE("j = 0 with no translation is an exact identity") {
        const auto r = check_dilation_kernel(unit_gaussian(), Dyadic::from_int(1), 0, 0, 0);
        CHECK(r.metric("max_deviation") < 1e-12);
    }
    SUBCASE("haar generator, lambda = 1, j = 1") {
        const auto r = check_dilation_kernel(haar_generator(0), Dyadic::from_int(1), 1, 0, 0);
        CHECK(r.metric("max_deviation") < 1e-8);
    }
    SUBCASE("gaussian, lambda = 1, j = 1, (2k,l) = (2,1)") {
        const auto r = check_dilation_kernel(unit_gaussian(), Dyadic::from_int(1), 1, 2, 1);
        CHECK(r.metric("max_deviation") < 1e-8);
    }
    SUBCASE("odd first index is rejected") {
        CHECK_THROWS_AS(check_dilation_kernel(unit_gaussian(), Dyadic::from_int(1), 1, 3, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("lambda = 0 is rejected") {
    CHECK_THROWS_AS(weyl_kernel(unit_gaussian(), Dyadic(), GridSpec(4.0, 64)),
                    std::invalid_argument);
}

TEST_CASE("designed separable field reproduces its kernel") {
    const Field2D psi = designed_generator();
    const auto& sep = psi.separable();
    REQUIRE(sep != nullptr);
    KernelColumnEvaluator ev(psi, Dyadic::from_int(1));
    double dev = 0.0;
    for (double xi : {0.2, 0.5, 0.7})
        for (double eta : {-0.8, -0.1, 0.4, 0.9})
            dev = std::max(dev, std::abs(ev.at(xi, eta) - sep->kernel_exact(xi, eta)));
    CHECK(dev < 2e-4);
    // rows outside the eta support are exactly zero
    CHECK(ev.at(0.3, 5.0) == cplx(0, 0));
}

TEST_CASE("kernel serialization round trip") {
    const GridSpec g(2.0, 8);
    WeylKernel K;
    K.lambda = Dyadic(-3, 4);
    K.grid = g;
    K.data.resize(g.n * g.n);
    for (std::size_t i = 0; i < K.data.size(); ++i) K.data[i] = cplx(0.25 * double(i), 1.0);
    std::stringstream ss;
    write_kernel(ss, K);
    const WeylKernel back = read_kernel(ss);
    CHECK(back.lambda == K.lambda);
    CHECK(back.grid == g);
    for (std::size_t i = 0; i < K.data.size(); ++i) CHECK(back.data[i] == K.data[i]);
}
