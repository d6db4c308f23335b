#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gradflow/weights.hpp"
#include "oracles.hpp"

using namespace gradflow;
using std::numbers::pi;

TEST_CASE("exp_sum matches the partial factorial series") {
    CHECK(exp_sum(0, 3.7) == 1.0);
    CHECK(exp_sum(2, 1.0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(exp_sum(3, 2.0) == doctest::Approx(1.0 + 2.0 + 2.0 + 4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("tail_integral closed form") {
    CHECK(tail_integral(0.0, 2) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(tail_integral(1.0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(tail_integral(2.0, 3) == doctest::Approx(38.0 * std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("tail_integral agrees with adaptive quadrature to 1e-12 relative") {
    for (int n = 0; n <= 8; ++n) {
        for (double rho0 : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
            const double closed = tail_integral(rho0, n);
            const double upper = rho0 + 60.0 + 10.0 * n;
            const double quad = oracles::integrate(
                [n](double r) { return std::pow(r, n) * std::exp(-r); }, rho0, upper,
                1e-15 * closed);
            CHECK(std::abs(quad - closed) <= 1e-12 * closed);
        }
    }
}

TEST_CASE("sphere_area known values") {
    CHECK(sphere_area(2) == doctest::Approx(2.0 * pi).epsilon(1e-14));
    CHECK(sphere_area(3) == doctest::Approx(4.0 * pi).epsilon(1e-14));
    CHECK(sphere_area(4) == doctest::Approx(2.0 * pi * pi).epsilon(1e-14));
    CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("psi0 translates and decays") {
    const Vec centre{1.0, -2.0};
    CHECK(psi0(centre, centre, 0.7) == doctest::Approx(1.0));
    const Vec x{1.0, -2.0 + 1.0 / 0.7};
    CHECK(psi0(x, centre, 0.7) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    const Vec y{3.0, -2.0};
    CHECK(psi0(y, centre, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    WeightParams w;
    w.kappa = 0.5;
    w.centre = centre;
    CHECK(psi0(y, w) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("chi plateau, tail and tilt") {
    WeightParams w;
    w.kappa = 0.3;
    w.c_cut = 0.5;
    w.frame_velocity = {0.0, 0.0};
    const double t = 4.0;  // plateau radius 2
    CHECK(chi(Vec{1.0, 0.5}, t, w) == doctest::Approx(1.0));
    const Vec edge{2.0 + 1.0 / w.kappa, 0.0};
    CHECK(chi(edge, t, w) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    w.frame_velocity = {0.01, 0.0};
    CHECK(chi(Vec{2.0, 0.0}, t, w) == doctest::Approx(std::exp(0.02)).epsilon(1e-13));
}

TEST_CASE("psi two-bump structure and chi <= psi outside the cutoff ball") {
    WeightParams w;
    w.kappa = 0.4;
    w.c_cut = 0.25;
    w.frame_velocity = {0.0, 0.0};
    CHECK(psi(Vec{0.0, 0.0}, 0.0, w) == doctest::Approx(2.0));
    const double t = 6.0;  // bumps at radius 1.5
    CHECK(psi(Vec{1.5, 0.0}, t, w) ==
          doctest::Approx(1.0 + std::exp(-2.0 * w.kappa * w.c_cut * t)).epsilon(1e-13));

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi), radius(1.5, 40.0);
    w.frame_velocity = {0.012, 0.0};
    for (int k = 0; k < 100; ++k) {
        const double r = radius(rng), a = angle(rng);
        const Vec xi{r * std::cos(a), r * std::sin(a)};
        CHECK(chi(xi, t, w) <= psi(xi, t, w) * (1.0 + 1e-12));
    }
}

TEST_CASE("psi has no interior singularity, unlike psi0") {
    const double kappa = 0.6, c_cut = 0.3, t = 5.0;
    auto lap_radial_at_zero = [&](auto&& f, double h) {
        return 4.0 * (f(h) - f(0.0)) / (h * h);  // d=2 stencil at the origin
    };
    auto psi_prof = [&](double r) { return psi_scalar(r, t, kappa, c_cut); };
    auto psi0_prof = [&](double r) { return std::exp(-kappa * r); };
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const double lap = std::abs(lap_radial_at_zero(psi_prof, h));
        CHECK(lap < 10.0 * (kappa * kappa) * psi_prof(0.0));
    }
    const double blowup_fine = std::abs(lap_radial_at_zero(psi0_prof, 1e-4));
    const double blowup_coarse = std::abs(lap_radial_at_zero(psi0_prof, 1e-2));
    CHECK(blowup_fine > 50.0 * blowup_coarse);
}

TEST_CASE("derivative combinations of psi stay within the stated bounds") {
    WeightParams w;
    w.kappa = 0.5;
    w.c_cut = 0.25;
    w.frame_velocity = {0.02, 0.0};
    const int d = 2;
    const double t = 8.0;
    const double edge = w.c_cut * t;
    const double fd = 1e-5;
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi), radius(0.1, 3.0 * edge);
    int tested = 0;
    for (int k = 0; k < 400 && tested < 100; ++k) {
        const double r = radius(rng), a = angle(rng);
        if (std::abs(r - edge) < 20.0 * fd || r < 20.0 * fd) continue;  // keep clear of kinks
        ++tested;
        const Vec xi{r * std::cos(a), r * std::sin(a)};
        const double val = psi(xi, t, w);

        const double psi_t = (psi(xi, t + fd, w) - psi(xi, t - fd, w)) / (2.0 * fd);
        CHECK(std::abs(psi_t) <= w.kappa * w.c_cut * val * (1.0 + 1e-6) + 1e-12);

        Vec grad(2), xp = xi, xm = xi;
        double lap = 0.0;
        for (int i = 0; i < d; ++i) {
            xp[i] += fd;
            xm[i] -= fd;
            grad[i] = (psi(xp, t, w) - psi(xm, t, w)) / (2.0 * fd);
            lap += (psi(xp, t, w) - 2.0 * val + psi(xm, t, w)) / (fd * fd);
            xp[i] = xi[i];
            xm[i] = xi[i];
        }
        double diff2 = 0.0, c_dot_grad = 0.0;
        for (int i = 0; i < d; ++i) {
            const double e = val * w.frame_velocity[i] - grad[i];
            diff2 += e * e;
            c_dot_grad += w.frame_velocity[i] * grad[i];
        }
        const double speed = w.frame_speed();
        CHECK(std::sqrt(diff2) <= w.kappa * val * (1.0 + 1e-5) + 1e-10);
        CHECK(lap - c_dot_grad <= w.kappa * (d * w.kappa + speed) * val * (1.0 + 1e-4) + 1e-8);
    }
    CHECK(tested == 100);
}

TEST_CASE("default decay rates satisfy the constraint sets") {
    for (double lambda : {0.095, 1.0, 2.0}) {
        for (double w_en : {1.0, 0.5, 0.2}) {
            for (int d : {2, 3}) {
                const double kappa = default_kappa(w_en, lambda, d);
                const double c_cut = default_c_cut(w_en, lambda, 0.0);
                std::string why;
                CHECK_MESSAGE(kappa_ccut_conditions_hold(w_en, kappa, c_cut, d, lambda, &why),
                              why);
            }
        }
    }
}
