#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "awl/rng.hpp"
#include "awl/ssm.hpp"

using namespace awl;

namespace {

SsmParams base_params() {
    SsmParams p;
    p.nu = 0.01;
    p.gamma = 1.0;
    p.beta_prime = 0.0;
    p.sigma = 0.3;
    p.amps = {1.0, 0.0, 0.5, 0.0, 2.0};
    p.K_ssm = 5;
    return p;
}

}  // namespace

TEST_CASE("mode decay rates") {
    CHECK(mu(1) == 0.0);
    CHECK(mu(3) == 8.0);
    CHECK(mu(5) == 24.0);
}

TEST_CASE("parameter validation") {
    SsmParams p = base_params();
    CHECK_NOTHROW(p.validate());
    p.K_ssm = 4;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.gamma = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    p.amps[1] = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = base_params();
    CHECK(p.amp(1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(p.amp(3) == doctest::Approx(0.15).epsilon(1e-15));
    CHECK(p.amp(6) == 0.0);
}

TEST_CASE("ou bank reaches the stationary law of each convolution") {
    const SsmParams p = base_params();
    const double h = 0.05;
    OuBank bank(p, h);
    RngStream rng(31, 0, "bank");
    const int burn = 2000, n = 200000;
    double s1 = 0.0, s2 = 0.0, s8 = 0.0;
    for (int i = 0; i < burn + n; ++i) {
        bank.step(rng);
        if (i >= burn) {
            s1 += bank.z1(3) * bank.z1(3);
            s2 += bank.z2_same(3) * bank.z2_same(3);
            s8 += bank.z8w1() * bank.z8w1();
        }
    }
    // Var Z_mu w = 1/(2 mu), Var Z_mu Z_mu w = 1/(4 mu^3), mu_3 = 8
    CHECK(s1 / n == doctest::Approx(1.0 / 16.0).epsilon(0.03));
    CHECK(s2 / n == doctest::Approx(1.0 / (4.0 * 512.0)).epsilon(0.05));
    CHECK(s8 / n == doctest::Approx(1.0 / 16.0).epsilon(0.03));
}

TEST_CASE("ou bank increments have variance h") {
    const SsmParams p = base_params();
    const double h = 0.02;
    OuBank bank(p, h);
    RngStream rng(5, 0, "dw");
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        bank.step(rng);
        s += bank.dw(3) * bank.dw(3);
    }
    CHECK(s / n == doctest::Approx(h).epsilon(0.02));
}

TEST_CASE("slow increment: noise-free cubic drift") {
    SsmParams p = base_params();
    p.sigma = 0.0;
    const double h = 0.01;
    OuBank bank(p, h);
    RngStream rng(1, 0, "d");
    bank.step(rng);
    // a = 0.1, beta' = 0: da/h = -(3/4) a^3 = -7.5e-4
    CHECK(ssm_drift_diffusion(0.1, p, bank) / h ==
          doctest::Approx(-7.5e-4).epsilon(1e-14));
    p.beta_prime = 0.4;
    CHECK(ssm_drift_diffusion(0.1, p, bank) / h ==
          doctest::Approx(0.4 * 0.1 - 7.5e-4).epsilon(1e-14));
}

TEST_CASE("slow increment: diffusion coefficients at pinned amplitudes") {
    SsmParams p = base_params();
    const double h = 0.01;
    OuBank bank(p, h);
    RngStream rng(77, 0, "d2");
    bank.step(rng);
    const double b1dw1 = p.amp(1) * bank.dw(1);
    const double b3dw3 = p.amp(3) * bank.dw(3);
    const double b5dw5 = p.amp(5) * bank.dw(5);

    // a = 0: only the sin x channel feeds the amplitude
    CHECK(ssm_drift_diffusion(0.0, p, bank) ==
          doctest::Approx((1.0 - 2.0 * p.nu * p.beta_prime) * b1dw1)
              .epsilon(1e-14));

    // a = 0.2, beta' = 0: sin 3x channel weight is
    // (3/32) a^2 - (21/1024) a^4 = 3.7171875e-3
    const double a = 0.2;
    const double got = ssm_drift_diffusion(a, p, bank);
    const double drift = -0.75 * a * a * a * h;
    const double w1 = 1.0 + 4.5 * p.nu * a * a - (9.0 / 1024.0) * a * a * a * a;
    const double w5 = (5.0 / 1024.0) * a * a * a * a;
    CHECK(got - drift - w1 * b1dw1 - w5 * b5dw5 ==
          doctest::Approx(3.7171875e-3 * b3dw3).epsilon(1e-12));
}

TEST_CASE("slow increment does not depend on gamma") {
    SsmParams p1 = base_params(), p2 = base_params();
    p1.gamma = 0.0;
    p2.gamma = 1.0;
    OuBank bank(p1, 0.01);
    RngStream rng(9, 0, "g");
    for (int i = 0; i < 200; ++i) {
        bank.step(rng);
        const double a = 0.4 * std::sin(0.1 * i);
        CHECK(ssm_drift_diffusion(a, p1, bank) ==
              ssm_drift_diffusion(a, p2, bank));
    }
}

TEST_CASE("averaged increment is the nu-free evaluation, bitwise") {
    SsmParams pa = base_params(), pb = base_params();
    pa.nu = 0.03;
    pb.nu = 0.2;
    pa.beta_prime = pb.beta_prime = 0.7;
    OuBank bank(pa, 0.01);
    RngStream rng(13, 0, "avg");
    RngStream pick(14, 0, "pick");
    for (int i = 0; i < 10000; ++i) {
        bank.step(rng);
        const double a = 0.5 * (2.0 * pick.uniform() - 1.0);
        // nu never enters the averaged formula
        CHECK(averaged_ssm_drift_diffusion(a, pa, bank) ==
              averaged_ssm_drift_diffusion(a, pb, bank));
    }
    // and at a = 0, beta' = 0 full and averaged coincide exactly
    SsmParams p0 = base_params();
    CHECK(ssm_drift_diffusion(0.0, p0, bank) ==
          averaged_ssm_drift_diffusion(0.0, p0, bank));
}

TEST_CASE("slow amplitude outside the validity radius is refused") {
    const SsmParams p = base_params();
    OuBank bank(p, 0.01);
    CHECK_THROWS_AS(ssm_drift_diffusion(0.6, p, bank), std::invalid_argument);
    CHECK_THROWS_AS(ssm_field(-0.7, p, bank), std::invalid_argument);
}

TEST_CASE("manifold field without noise is the cubic manifold") {
    SsmParams p = base_params();
    p.sigma = 0.0;
    OuBank bank(p, 0.01);
    const SpectralField u = ssm_field(0.2, p, bank);
    CHECK(u.basis.norm == Normalization::PlainSin);
    CHECK(u.c[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(u.c[1] == 0.0);
    CHECK(u.c[2] == doctest::Approx(0.2 * 0.2 * 0.2 / 32.0).epsilon(1e-15));
    CHECK(u.c[3] == 0.0);
    CHECK(u.c[4] == 0.0);
}

TEST_CASE("manifold field with a single driven mode") {
    SsmParams p = base_params();
    p.gamma = 0.0;
    p.sigma = 1.0;
    p.amps = {0.0, 0.7, 0.0, 0.0, 0.0};
    OuBank bank(p, 0.02);
    RngStream rng(3, 0, "f");
    for (int i = 0; i < 500; ++i) bank.step(rng);
    const SpectralField u = ssm_field(0.0, p, bank);
    // mode 2 content from its own convolutions, mode 4 from the shifted
    // cascade, everything else silent
    const double nu = p.nu;
    const double expect2 =
        0.7 * ((1.0 + 3.0 * nu) * bank.z1(2) - 1.5 * bank.z2_same(2) -
               bank.zfast(2));
    CHECK(u.c[0] == 0.0);
    CHECK(u.c[1] == doctest::Approx(expect2).epsilon(1e-13));
    CHECK(u.c[2] == 0.0);
    CHECK(u.c[3] ==
          doctest::Approx(0.75 * 0.7 * bank.z2_shift(2)).epsilon(1e-13));
    CHECK(u.c[4] == 0.0);
}

TEST_CASE("gamma enters the field only through modes k >= 2") {
    SsmParams p1 = base_params(), p2 = base_params();
    p1.amps = p2.amps = {1.0, 0.0, 0.0, 0.0, 0.0};
    p1.gamma = 0.0;
    p2.gamma = 1.0;
    OuBank bank(p1, 0.02);
    RngStream rng(21, 0, "f2");
    for (int i = 0; i < 100; ++i) bank.step(rng);
    const SpectralField a = ssm_field(0.1, p1, bank);
    const SpectralField b = ssm_field(0.1, p2, bank);
    for (int i = 0; i < 5; ++i) CHECK(a.c[i] == b.c[i]);
}

TEST_CASE("homotopy drift at gamma = 1 eliminates to the wave equation") {
    // substituting v = u_t + mu u at gamma = 1 must give
    // nu u_tt + u_t + mu u - beta' u + (u^3)_k = 0 identically
    SsmParams p = base_params();
    p.beta_prime = 0.37;
    p.gamma = 1.0;
    const Grid grid(3 * 5 + 1);
    RngStream rng(8, 0, "h");
    SpectralField u(SineBasis{5, Normalization::PlainSin});
    SpectralField v(u.basis);
    for (int trial = 0; trial < 20; ++trial) {
        for (double& c : u.c) c = 0.3 * rng.gaussian();
        for (double& c : v.c) c = 0.3 * rng.gaussian();
        SpectralField ut(u.basis), vt(u.basis);
        homotopy_rhs(u, v, p, grid, ut, vt);
        const SpectralField cube = cubic_f(u, 0.0, grid);  // -(u^3) projection
        for (int k = 1; k <= 5; ++k) {
            const double utt = -mu(k) * ut.c[k - 1] + vt.c[k - 1];
            const double r = p.nu * utt + ut.c[k - 1] + mu(k) * u.c[k - 1] -
                             p.beta_prime * u.c[k - 1] - cube.c[k - 1];
            CHECK(std::abs(r) < 1e-12);
        }
    }
}

TEST_CASE("homotopy drift at gamma = 0 relaxes v at the uniform rate") {
    SsmParams p = base_params();
    p.gamma = 0.0;
    p.beta_prime = 0.0;
    const Grid grid(16);
    SpectralField u(SineBasis{5, Normalization::PlainSin});
    SpectralField v(u.basis);
    v.c = {1.0, -2.0, 3.0, 0.5, -0.25};
    SpectralField ut(u.basis), vt(u.basis);
    homotopy_rhs(u, v, p, grid, ut, vt);
    for (int k = 1; k <= 5; ++k) {
        CHECK(vt.c[k - 1] == doctest::Approx(-v.c[k - 1] / p.nu).epsilon(1e-14));
        CHECK(ut.c[k - 1] == doctest::Approx(-mu(k) * u.c[k - 1] + v.c[k - 1])
                                 .epsilon(1e-14));
    }
    // the sin x amplitude is neutral: u = sin x, v = 0 gives no drift there
    u.c = {1.0, 0.0, 0.0, 0.0, 0.0};
    v.c = {0.0, 0.0, 0.0, 0.0, 0.0};
    homotopy_rhs(u, v, p, grid, ut, vt);
    CHECK(ut.c[0] == 0.0);
}

TEST_CASE("homotopy integrator tracks the slow amplitude ode") {
    SsmParams p = base_params();
    p.nu = 1e-3;
    p.gamma = 1.0;
    p.beta_prime = 0.2;
    p.sigma = 0.0;
    const double dt = 1e-4, T = 1.0;
    const int n = static_cast<int>(std::round(T / dt));
    const double a0 = 0.2;

    SpectralField u(SineBasis{5, Normalization::PlainSin});
    SpectralField v(u.basis);
    auto adot = [&](double a) { return p.beta_prime * a - 0.75 * a * a * a; };
    u.c[0] = a0;
    u.c[2] = a0 * a0 * a0 / 32.0;
    v.c[0] = adot(a0);
    v.c[2] = (3.0 / 32.0) * a0 * a0 * adot(a0) + mu(3) * u.c[2];

    const HomotopyIntegrator integ(p, dt);
    RngStream rng(1, 0, "hi");
    double a = a0;
    for (int i = 0; i < n; ++i) {
        integ.step(u, v, rng);
        const double k1 = adot(a), k2 = adot(a + 0.5 * dt * k1);
        const double k3 = adot(a + 0.5 * dt * k2), k4 = adot(a + dt * k3);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK(u.c[0] == doctest::Approx(a).epsilon(1e-2));
    CHECK(u.c[2] == doctest::Approx(a * a * a / 32.0).epsilon(0.05));
}

TEST_CASE("deterministic residual scales as the fifth power") {
    SsmParams p = base_params();
    p.sigma = 0.0;
    const ResidualReport rep = residual_deterministic(p, {0.2, 0.1, 0.05});
    CHECK(std::abs(rep.slope - 5.0) < 0.3);
    CHECK(rep.r2 > 0.999);
    CHECK(rep.norms[1] < 1e-5);
    // halving a divides the sup norm by about 2^5
    CHECK(rep.norms[1] / rep.norms[2] == doctest::Approx(32.0).epsilon(0.15));
    SsmParams bad = p;
    bad.sigma = 0.1;
    CHECK_THROWS_AS(residual_deterministic(bad, {0.2, 0.1}),
                    std::invalid_argument);
}

TEST_CASE("linear-noise residual decays faster than nu^1.5") {
    SsmParams p = base_params();
    p.gamma = 1.0;
    p.beta_prime = 0.0;
    p.sigma = 0.1;
    p.amps = {1.0, 0.8, 0.6, 0.4, 0.2};
    const ResidualReport rep =
        residual_linear_noise(p, {0.02, 0.01, 0.005}, 0.1, 20000, 3000, 424242);
    CHECK(rep.slope >= 1.5);
    CHECK(rep.norms[0] > rep.norms[1]);
    CHECK(rep.norms[1] > rep.norms[2]);
    SsmParams bad = p;
    bad.beta_prime = 0.1;
    CHECK_THROWS_AS(
        residual_linear_noise(bad, {0.02, 0.01}, 0.1, 100, 10, 1),
        std::invalid_argument);
}
