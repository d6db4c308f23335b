#include <cmath>
#include <random>

#include "doctest.h"
#include "gradflow/comparison.hpp"
#include "oracles.hpp"

using namespace gradflow;

namespace {

MinimumPoint analyzed_min(PotentialSpec& p, const Vec& guess) {
    MinimumPoint m = find_minimum(p, guess);
    m.escape_distance = escape_distance(p, m);
    return m;
}

}  // namespace

TEST_CASE("modified potential blends to the quadratic") {
    auto bist = make_potential("bistable", {});
    MinimumPoint m = analyzed_min(bist, {1.0});
    const double r_switch = 2.5;
    ModifiedPotential vd(bist, m, r_switch);

    // plateau: the normalized potential itself
    const Vec inside{1.2};
    CHECK(vd.value(inside) == doctest::Approx(bist.eval(Vec{2.2}) - m.v_at_m).epsilon(1e-14));
    // far side: |v|^2/2 exactly
    const Vec outside{r_switch + 2.0};
    CHECK(vd.value(outside) == doctest::Approx(0.5 * outside[0] * outside[0]).epsilon(1e-14));

    // gradient consistent with value by central differences
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-4.5, 4.5);
    Vec g(1);
    for (int k = 0; k < 200; ++k) {
        const double x = unif(rng);
        const Vec v{x};
        vd.grad(v, g);
        const double h = 1e-6;
        const double fd = (vd.value(Vec{x + h}) - vd.value(Vec{x - h})) / (2.0 * h);
        CHECK(g[0] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("coercivity beyond r_coerc for the blended potential") {
    auto p = make_potential("tilted_bistable", {{"a", 0.1}});
    auto minima = analyze_minima(p);
    const MinimumPoint& m = minima[0].m[0] < 0 ? minima[0] : minima[1];
    const ComparisonSetup setup = build_comparison(p, m, 1.6, 1);
    const SupersolutionParams& sp = setup.params;
    for (double r : {sp.r_coerc, sp.r_coerc + 0.5, sp.r_coerc + 3.0}) {
        for (double sgn : {1.0, -1.0}) {
            const Vec v{sgn * r};
            CHECK(setup.vddag.radial_term(v) >=
                  sp.lambda * sp.delta_prime * sp.delta_prime / 2.0 - 1e-12);
        }
    }
}

TEST_CASE("n_bar: quadratic closed form and two-point scalar evaluation") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    MinimumPoint m0 = analyzed_min(quad, {0.0});
    ModifiedPotential vq(quad, m0, 3.0);
    for (double q : {0.0, 0.3, 2.0, 7.0})
        CHECK(n_bar(vq, 1, q) == doctest::Approx(-2.0 * q).epsilon(1e-13));

    auto bist = make_potential("bistable", {});
    MinimumPoint m = analyzed_min(bist, {1.0});
    ModifiedPotential vb(bist, m, 4.0);
    const double q = 0.5 * 0.25;  // v = +-0.5 in shifted coordinates
    auto g = [&](double v) {
        Vec gv(1);
        const Vec vv{v};
        vb.grad(vv, gv);
        return -v * gv[0];
    };
    CHECK(n_bar(vb, 1, q) == doctest::Approx(std::max(g(0.5), g(-0.5))).epsilon(1e-13));
}

TEST_CASE("n_bar refinement is monotone under doubling the direction count") {
    auto p = make_potential("vector_double_well", {{"a", 0.1}});
    auto minima = analyze_minima(p);
    ModifiedPotential vd(p, minima[0], 3.0);
    for (double q : {0.05, 0.8, 2.0, 5.0}) {
        const double coarse = n_bar(vd, 2, q, 256);
        const double fine = n_bar(vd, 2, q, 512);
        CHECK(fine >= coarse - 1e-10);
        CHECK(fine - coarse <= 1e-8 * (1.0 + std::abs(coarse)));
    }
}

TEST_CASE("c_noesc formula branches and monotonicity") {
    SupersolutionParams sp;
    sp.lambda = 2.0;
    sp.delta_prime = 0.1;
    sp.delta_second = 0.2;
    CHECK(sp.gamma_prime() == doctest::Approx(0.005));
    CHECK(sp.gamma_second() == doctest::Approx(0.02));
    CHECK(c_noesc(sp, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(c_noesc(sp, -1.0) == doctest::Approx(1.0 - sp.lambda));  // second branch

    SupersolutionParams wider = sp;
    wider.delta_second = 0.3;
    CHECK(c_noesc(wider, 0.0) <= c_noesc(sp, 0.0));
}

TEST_CASE("envelope profile: plateau, junction continuity, tail") {
    SupersolutionParams sp;
    sp.lambda = 2.0;
    sp.delta_prime = 0.1;
    sp.delta_second = 0.2;
    sp.q_max = 3.0;
    sp.r_esc_init = 5.0;
    sp.c = 1.0;
    const double gap = sp.gamma_second() - sp.gamma_prime();
    CHECK(eta0(-1.0, sp) == doctest::Approx(sp.q_max + gap));
    const double ramp_end = sp.q_max / gap;
    CHECK(eta0(ramp_end - 1e-12, sp) == doctest::Approx(gap).epsilon(1e-6));
    CHECK(eta0(ramp_end + 1e-12, sp) == doctest::Approx(gap).epsilon(1e-6));
    CHECK(eta0(1e-14, sp) == doctest::Approx(sp.q_max + gap));
    CHECK(eta0(ramp_end + 50.0, sp) == doctest::Approx(gap * std::exp(-50.0)).epsilon(1e-12));
    const double t = 2.0;
    CHECK(eta_bar(sp.r_esc_init + sp.c * t + ramp_end + 200.0, t, sp) ==
          doctest::Approx(sp.gamma_prime() * std::exp(-sp.lambda * t)).epsilon(1e-12));
    // plateau value of the full envelope
    CHECK(eta_bar(0.0, t, sp) == doctest::Approx(sp.q_max + gap +
                                                 sp.gamma_prime() * std::exp(-sp.lambda * t)));
}

TEST_CASE("supersolution residual: certified at c_noesc, violated well below it") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    MinimumPoint m0 = analyzed_min(quad, {0.0});
    ComparisonSetup setup = build_comparison(quad, m0, 1.0, 1);
    setup.params.r_esc_init = 2.0;
    CHECK(supersolution_residual(setup.vddag, 1, setup.params) <= 1e-10);
    SupersolutionParams faster = setup.params;
    faster.c = 2.0 * setup.c_noesc_value;
    CHECK(supersolution_residual(setup.vddag, 1, faster) <= 1e-10);

    // The tilted well pushes outward: far below c_noesc the ramp case fails.
    auto tilt = make_potential("tilted_bistable", {{"a", 0.1}});
    auto minima = analyze_minima(tilt);
    const MinimumPoint& m = minima[0].m[0] < 0 ? minima[0] : minima[1];
    ComparisonSetup ts = build_comparison(tilt, m, 1.6, 1);
    ts.params.r_esc_init = 2.0;
    CHECK(supersolution_residual(ts.vddag, 1, ts.params) <= 1e-10);
    SupersolutionParams slow = ts.params;
    slow.c = 0.1 * ts.c_noesc_value;
    CHECK(supersolution_residual(ts.vddag, 1, slow) > 1e-6);
}

TEST_CASE("sandwich setup and spot checks on a short collapse run") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    MinimumPoint m = analyzed_min(quad, {0.0});
    const Grid g{GridMode::Radial, 2, 12.0, 160};
    FieldState s = make_constant_state(g, Vec{0.0});
    for (std::size_t p = 0; p + 1 < s.num_points(); ++p)
        s.values[p] = std::exp(-0.5 * g.radius_of(p) * g.radius_of(p));

    ComparisonSetup setup = build_comparison(quad, m, 1.0, 1);
    setup.params.r_esc_init = choose_r_esc_init(s, m, setup.params.gamma_prime());
    CHECK(setup.params.r_esc_init < g.extent);
    CHECK(sandwich_excess(s, m, setup.params) <= 0.0);

    SolverConfig cfg{1.0 / std::ceil(1.0 / cfl_limit(g)), Scheme::RK4, 1.0, 1};
    Stepper st(quad, {0.0}, cfg);
    for (int block = 0; block < 10; ++block) {
        for (int i = 0; i < 40; ++i) st.step(s);
        CHECK(sandwich_excess(s, m, setup.params) <= 1e-9);
        CHECK(subsolution_residual(s, m, st, setup.vddag) <=
              20.0 * g.spacing() * g.spacing());
    }

    // A far-field bump breaks the initial ordering for every radius.
    FieldState bad = make_constant_state(g, Vec{1.0});
    CHECK_THROWS_WITH_AS(choose_r_esc_init(bad, m, setup.params.gamma_prime()),
                         "r_esc_init too small", std::runtime_error);
}

TEST_CASE("pointwise envelope values never exceed the computed sup") {
    auto tilt = make_potential("tilted_bistable", {{"a", 0.1}});
    auto minima = analyze_minima(tilt);
    const MinimumPoint& m = minima[0].m[0] < 0 ? minima[0] : minima[1];
    ModifiedPotential vd(tilt, m, 3.0);
    const double q_hi = 9.0;
    const double sup = sup_n_bar(vd, 1, q_hi);
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> unif(0.0, q_hi);
    for (int k = 0; k < 3000; ++k)
        CHECK(n_bar(vd, 1, unif(rng)) <= sup + 1e-12 * (1.0 + std::abs(sup)));
}
