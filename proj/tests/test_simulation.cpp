#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mse/simulation.hpp"
#include "oracles.hpp"

using namespace mse;

TEST_CASE("m function") {
    CHECK(m_function(0.0, Design::Nonlinear) == 0.0);
    CHECK(m_function(1.0, Design::Linear) == 1.0);
    CHECK(m_function(1.0, Design::Nonlinear) ==
          doctest::Approx(M_PI / 4.0).epsilon(1e-12));
    CHECK(m_function(-2.5, Design::Linear) == -2.5);
    CHECK_THROWS_AS(m_function(std::nan(""), Design::Linear), std::invalid_argument);
}

TEST_CASE("true G at the default constants") {
    const DgpConfig cfg;
    CHECK(true_G(0.0, cfg) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(true_G(1.0, cfg) == doctest::Approx(-0.2).epsilon(1e-14));
    DgpConfig nl = cfg;
    nl.design = Design::Nonlinear;
    CHECK(true_G(1.0, nl) == doctest::Approx(0.1 - 0.3 * M_PI / 4.0).epsilon(1e-12));
}

TEST_CASE("identical seeds give bit-identical datasets") {
    const DgpConfig cfg;
    const Dataset a = draw_sample(cfg, 500, 123);
    const Dataset b = draw_sample(cfg, 500, 123);
    CHECK(oracles::exact_equal(a.d, b.d));
    CHECK(oracles::exact_equal(a.y, b.y));
    CHECK(oracles::exact_equal(a.z, b.z));
    CHECK(oracles::exact_equal(a.x, b.x));
    const Dataset c = draw_sample(cfg, 500, 124);
    CHECK_FALSE(oracles::exact_equal(a.y, c.y));
}

TEST_CASE("noiseless outcomes are the exact design formula") {
    DgpConfig cfg;
    cfg.sigma_u = 0.0;
    const Dataset data = draw_sample(cfg, 2000, 9);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const double x = data.x(i, 0);
        const double want = data.d(i) == 1 ? 0.2 + 0.1 * x : 0.1 + 0.4 * x;
        CHECK(data.y(i, 0) == want);
    }
}

TEST_CASE("choice regenerates from the stored latent draws") {
    const DgpConfig cfg;
    LatentDraws latent;
    const Dataset data = draw_sample(cfg, 5000, 31, &latent);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        const int d = (data.z(i, 0) * cfg.beta1 + true_G(data.x(i, 0), cfg) * cfg.beta2 >
                       latent.eps(i))
                          ? 1
                          : 0;
        CHECK(d == data.d(i));
    }
}

TEST_CASE("error term has conditional median zero") {
    const DgpConfig cfg;
    LatentDraws latent;
    const Eigen::Index n = 1000000;
    const Dataset data = draw_sample(cfg, n, 77, &latent);
    const double frac =
        static_cast<double>((latent.eps.array() > 0.0).count()) / static_cast<double>(n);
    CHECK(frac == doctest::Approx(0.5).epsilon(0.004));

    // sign of eps stays balanced within coarse (z, x) bins
    const double z_edges[3] = {-1.2, 0.0, 1.2};
    const double x_edges[3] = {-0.6, 0.0, 0.6};
    double pos[4][4] = {};
    double tot[4][4] = {};
    for (Eigen::Index i = 0; i < n; ++i) {
        int bz = 0, bx = 0;
        while (bz < 3 && data.z(i, 0) > z_edges[bz]) ++bz;
        while (bx < 3 && data.x(i, 0) > x_edges[bx]) ++bx;
        tot[bz][bx] += 1.0;
        if (latent.eps(i) > 0.0) pos[bz][bx] += 1.0;
    }
    for (int bz = 0; bz < 4; ++bz)
        for (int bx = 0; bx < 4; ++bx) {
            REQUIRE(tot[bz][bx] > 1000.0);
            CHECK(pos[bz][bx] / tot[bz][bx] == doctest::Approx(0.5).epsilon(0.02));
        }
}

TEST_CASE("outcome noise has the configured correlation") {
    const DgpConfig cfg;
    LatentDraws latent;
    const Eigen::Index n = 1000000;
    draw_sample(cfg, n, 55, &latent);
    const double m1 = latent.u1.mean();
    const double m0 = latent.u0.mean();
    CHECK(std::abs(m1) < 0.002);
    CHECK(std::abs(m0) < 0.002);
    const Eigen::ArrayXd c1 = latent.u1.array() - m1;
    const Eigen::ArrayXd c0 = latent.u0.array() - m0;
    const double corr = (c1 * c0).sum() /
                        std::sqrt(c1.square().sum() * c0.square().sum());
    CHECK(corr == doctest::Approx(cfg.rho).epsilon(0.0125));
    CHECK(std::sqrt(c1.square().sum() / static_cast<double>(n)) ==
          doctest::Approx(cfg.sigma_u).epsilon(0.01));
}

TEST_CASE("both choices occur with interior probability") {
    const DgpConfig cfg;
    const Dataset data = draw_sample(cfg, 100000, 4);
    const double share =
        static_cast<double>(data.count_d(1)) / static_cast<double>(data.n());
    CHECK(share > 0.3);
    CHECK(share < 0.7);
}

TEST_CASE("configuration is validated") {
    DgpConfig cfg;
    cfg.rho = 1.0;
    CHECK_THROWS_AS(draw_sample(cfg, 10, 1), std::invalid_argument);
    cfg.rho = -0.8;
    cfg.sigma_u = -0.1;
    CHECK_THROWS_AS(draw_sample(cfg, 10, 1), std::invalid_argument);
    cfg.sigma_u = 0.33;
    CHECK_THROWS_AS(draw_sample(cfg, 0, 1), std::invalid_argument);
}
