#include <cmath>
#include <random>

#include "doctest.h"
#include "gradflow/diagnostics.hpp"
#include "oracles.hpp"

using namespace gradflow;

namespace {

FieldState bump_state(const Grid& g, const MinimumPoint& m, double height, double width_sq) {
    FieldState s = make_constant_state(g, m.m);
    for (std::size_t p = 0; p + 1 < s.num_points(); ++p) {
        const double r = g.radius_of(p);
        s.values[p] = m.m[0] + height * std::exp(-r * r / width_sq);
    }
    return s;
}

MinimumPoint quad_min() {
    auto quad = make_potential("quadratic", {{"n", 1}});
    MinimumPoint m = find_minimum(quad, {0.0});
    m.escape_distance = 1.0;
    return m;
}

}  // namespace

TEST_CASE("sigma_esc membership and outer radius") {
    const Grid g{GridMode::Radial, 2, 10.0, 512};
    const MinimumPoint m = quad_min();

    FieldState at_min = make_constant_state(g, m.m);
    auto sd = sigma_esc(at_min, m);
    CHECK(sd.empty);
    CHECK(sd.outer_radius == 0.0);

    // height 2 d_esc gaussian crosses d_esc at r = sqrt(ln 2).
    FieldState bump = bump_state(g, m, 2.0 * m.escape_distance, 1.0);
    sd = sigma_esc(bump, m);
    CHECK_FALSE(sd.empty);
    CHECK(sd.outer_radius == doctest::Approx(std::sqrt(std::log(2.0))).epsilon(2.0 * g.spacing()));

    FieldState inside = bump_state(g, m, 0.9 * m.escape_distance, 1.0);
    CHECK(sigma_esc(inside, m).empty);
}

TEST_CASE("invasion speed fit on synthetic tracks") {
    EscapeTrack track;
    for (int i = 0; i <= 400; ++i) {
        track.times.push_back(0.05 * i);
        track.r_esc_outer.push_back(0.0);
        track.r_esc_hom.push_back(0.0);
        track.r_hom.push_back(10.0);
        track.sigma_empty.push_back(1);
    }
    auto est = invasion_speed_fit(track);
    CHECK(est.degenerate);
    CHECK(est.c_inv == 0.0);
    CHECK(est.ci_hi == 0.0);

    std::mt19937 rng(8);
    std::normal_distribution<double> noise(0.0, 0.01);
    EscapeTrack grow;
    for (int i = 0; i <= 400; ++i) {
        const double t = 0.05 * i;
        grow.times.push_back(t);
        grow.r_esc_outer.push_back(0.4 * t + noise(rng));
        grow.r_esc_hom.push_back(0.4 * t);
        grow.r_hom.push_back(0.8 * t);
        grow.sigma_empty.push_back(0);
    }
    est = invasion_speed_fit(grow);
    CHECK(est.c_inv == doctest::Approx(0.4).epsilon(5e-3));
    CHECK(est.ci_lo <= 0.4);
    CHECK(est.ci_hi >= 0.4);

    EscapeTrack tiny;
    tiny.times = {0.0, 1.0};
    tiny.r_esc_outer = {0.0, 0.0};
    tiny.sigma_empty = {1, 1};
    CHECK_THROWS_WITH_AS(invasion_speed_fit(tiny), "window too short", std::runtime_error);
}

TEST_CASE("hom radius clamps at the domain edge and respects bad annuli") {
    const Grid g{GridMode::Radial, 2, 10.0, 256};
    const MinimumPoint m = quad_min();
    FieldState calm = make_constant_state(g, m.m);
    CHECK(hom_radius(calm, m, 0.4, 0.5) == doctest::Approx(g.extent));

    // A centred bump leaves the outermost annulus quiet: still clamped.
    FieldState bump = bump_state(g, m, 2.0, 4.0);
    CHECK(hom_radius(bump, m, 0.4, 0.5 * m.escape_distance) == doctest::Approx(g.extent));

    // Disturbance near the edge pushes the homogeneous radius inward.
    FieldState edge = make_constant_state(g, m.m);
    for (std::size_t p = 0; p + 1 < edge.num_points(); ++p) {
        const double r = g.radius_of(p);
        edge.values[p] = m.m[0] + 2.0 * std::exp(-(r - 9.0) * (r - 9.0));
    }
    const double rh = hom_radius(edge, m, 0.4, 0.5 * m.escape_distance);
    CHECK(rh > 0.0);
    CHECK(rh < g.extent);
    const auto prof = deviation_profile(edge, m);
    const double h = g.spacing();
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double r = k * h;
        if (std::abs(r - rh) <= 0.4) CHECK(prof[k] <= 0.5 * m.escape_distance + 1e-12);
    }
    // escape radius within the homogeneous radius never exceeds it
    CHECK(r_esc_within(edge, m, rh) <= rh);
}

TEST_CASE("verdict gates on synthetic data") {
    auto build = [](double speed, double e_slope, double ut_level) {
        EscapeTrack track;
        FunctionalSeries e, ut;
        for (int i = 0; i <= 400; ++i) {
            const double t = 0.05 * i;
            track.times.push_back(t);
            track.r_esc_outer.push_back(speed * t);
            track.r_esc_hom.push_back(speed * t);
            track.r_hom.push_back(20.0);
            track.sigma_empty.push_back(speed == 0.0 ? 1 : 0);
            e.push(t, e_slope * t);
            ut.push(t, ut_level);
        }
        return std::tuple{track, e, ut};
    };
    {
        auto [track, e, ut] = build(0.0, 0.0, 1e-6);
        const auto rep = dichotomy_verdict(track, e, ut, 0.05);
        CHECK(rep.verdict == Verdict::NoInvasion);
    }
    {
        auto [track, e, ut] = build(0.5, -2.0, 0.1);
        const auto rep = dichotomy_verdict(track, e, ut, 0.05);
        CHECK(rep.verdict == Verdict::Invasion);
    }
    {   // speed positive but energy flat: neither branch
        auto [track, e, ut] = build(0.5, 0.0, 0.1);
        const auto rep = dichotomy_verdict(track, e, ut, 0.05);
        CHECK(rep.verdict == Verdict::Inconclusive);
    }
    {   // truncated run
        EscapeTrack track;
        FunctionalSeries e, ut;
        for (int i = 0; i < 5; ++i) {
            track.times.push_back(0.1 * i);
            track.r_esc_outer.push_back(0.0);
            track.r_esc_hom.push_back(0.0);
            track.r_hom.push_back(1.0);
            track.sigma_empty.push_back(1);
            e.push(0.1 * i, 0.0);
            ut.push(0.1 * i, 0.0);
        }
        CHECK(dichotomy_verdict(track, e, ut, 0.05).verdict == Verdict::Inconclusive);
    }
}

TEST_CASE("hom flags distinguish clamped, growing and invaded tracks") {
    auto make_track = [](auto&& rhom, auto&& resc) {
        EscapeTrack t;
        for (int i = 0; i <= 300; ++i) {
            const double time = 0.1 * i;
            t.times.push_back(time);
            t.r_hom.push_back(rhom(time));
            t.r_esc_hom.push_back(resc(time));
            t.r_esc_outer.push_back(resc(time));
            t.sigma_empty.push_back(resc(time) == 0.0 ? 1 : 0);
        }
        return t;
    };
    const double domain = 30.0;
    auto clamped = make_track([&](double) { return domain; }, [](double) { return 0.0; });
    auto f1 = hom_flags(clamped, domain, 0.01);
    CHECK(f1.h_hom);
    CHECK(f1.h_noinv);

    auto growing = make_track([](double t) { return 0.7 * t; }, [](double) { return 0.4; });
    auto f2 = hom_flags(growing, domain, 0.05);
    CHECK(f2.h_hom);
    CHECK(f2.h_noinv);  // bounded escape radius: r_esc/t -> 0

    auto invaded = make_track([](double t) { return 0.9 * t; }, [](double t) { return 0.5 * t; });
    auto f3 = hom_flags(invaded, domain, 0.05);
    CHECK_FALSE(f3.h_noinv);
}

TEST_CASE("decay fit and tail quarter integrals") {
    FunctionalSeries s;
    for (int i = 0; i <= 500; ++i) {
        const double t = 0.02 * i;
        s.push(t, 2.0 * std::exp(-0.35 * t));
    }
    CHECK(decay_rate_fit(s).rate == doctest::Approx(0.35).epsilon(1e-10));
    const auto q = tail_quarter_integrals(s);
    CHECK(q.size() == 4);
    for (int i = 1; i < 4; ++i) CHECK(q[i] <= q[i - 1]);
}

TEST_CASE("sup|u_t| decays at the linear relaxation rate for the quadratic well") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    const MinimumPoint m = find_minimum(quad, {0.0});
    const Grid g{GridMode::Radial, 2, 12.0, 128};
    const double dt = 1.0 / std::ceil(1.0 / cfl_limit(g));
    SolverConfig cfg{dt, Scheme::RK4, 4.0, 1};
    Stepper st(quad, {0.0}, cfg);
    FieldState s = make_constant_state(g, Vec{0.0});
    for (std::size_t p = 0; p + 1 < s.num_points(); ++p) {
        const double r = g.radius_of(p);
        s.values[p] = std::exp(-0.5 * r * r);
    }
    FunctionalSeries sup_ut;
    const int stride = std::max(1, static_cast<int>(0.02 / dt));
    const auto steps = static_cast<long long>(std::llround(4.0 / dt));
    std::vector<double> ut;
    for (long long i = 0; i <= steps; ++i) {
        s.time = i * dt;
        if (i % stride == 0) {
            st.rhs(s, ut);
            double worst = 0.0;
            for (double v : ut) worst = std::max(worst, std::abs(v));
            sup_ut.push(s.time, worst);
        }
        if (i < steps) st.step(s);
    }
    // e^{-t} forcing dominates; grid slack stays below ten percent.
    CHECK(decay_rate_fit(sup_ut).rate >= 0.9);
}
