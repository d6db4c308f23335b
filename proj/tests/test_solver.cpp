#include <cmath>

#include "doctest.h"
#include "gradflow/energy.hpp"
#include "gradflow/solver.hpp"
#include "oracles.hpp"

using namespace gradflow;

namespace {

FieldState gaussian_state(const Grid& g, double amplitude, double sigma) {
    FieldState s = make_constant_state(g, Vec{0.0});
    for (std::size_t p = 0; p + 1 < s.num_points(); ++p) {
        const double r = g.radius_of(p);
        s.values[p] = amplitude * std::exp(-r * r / (2.0 * sigma * sigma));
    }
    return s;
}

double auto_dt(const Grid& g) { return 1.0 / std::ceil(1.0 / cfl_limit(g)); }

}  // namespace

TEST_CASE("critical points are fixed points of the stepper") {
    auto bist = make_potential("bistable", {});
    const Grid g{GridMode::Radial, 2, 8.0, 64};
    for (auto scheme : {Scheme::ExplicitEuler, Scheme::RK4}) {
        SolverConfig cfg{auto_dt(g), scheme, 1.0, 10};
        Stepper st(bist, {1.0}, cfg);
        FieldState s = make_constant_state(g, Vec{1.0});
        for (int i = 0; i < 20; ++i) st.step(s);
        for (double v : s.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("quadratic potential with gaussian data follows the damped heat solution") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    const Grid g{GridMode::Radial, 2, 12.0, 256};
    const double dt = auto_dt(g);
    SolverConfig cfg{dt, Scheme::RK4, 0.5, 1000};
    Stepper st(quad, {0.0}, cfg);
    FieldState s = gaussian_state(g, 1.0, 1.0);
    const auto steps = static_cast<long long>(std::llround(0.5 / dt));
    for (long long i = 0; i < steps; ++i) st.step(s);
    CHECK(s.values[0] == doctest::Approx(std::exp(-0.5) / 2.0).epsilon(2e-4));
    double worst = 0.0;
    for (std::size_t p = 0; p < s.num_points(); ++p)
        worst = std::max(worst, std::abs(s.values[p] - oracles::quadratic_gaussian_solution(
                                                           g.radius_of(p), 0.5, 1.0, 1.0, 2)));
    CHECK(worst < 1e-3);
}

TEST_CASE("rk4 beats euler at equal dt") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    const Grid g{GridMode::Radial, 2, 12.0, 128};
    const double dt = auto_dt(g);
    auto run = [&](Scheme scheme) {
        SolverConfig cfg{dt, scheme, 0.25, 1000};
        Stepper st(quad, {0.0}, cfg);
        FieldState s = gaussian_state(g, 1.0, 1.0);
        const auto steps = static_cast<long long>(std::llround(0.25 / dt));
        for (long long i = 0; i < steps; ++i) st.step(s);
        double worst = 0.0;
        for (std::size_t p = 0; p < s.num_points(); ++p)
            worst = std::max(worst, std::abs(s.values[p] - oracles::quadratic_gaussian_solution(
                                                               g.radius_of(p), 0.25, 1.0, 1.0, 2)));
        return worst;
    };
    CHECK(run(Scheme::RK4) <= run(Scheme::ExplicitEuler));
}

TEST_CASE("qbar closed form") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    const Grid g{GridMode::Radial, 2, 4.0, 32};
    FieldState zero = make_constant_state(g, Vec{0.0});
    CoercivityConstants cc{1.0, 0.0, 0.5, 1.0};
    QBarTrace tr = qbar_bound(zero, cc);
    CHECK(tr.at(0.0) == 0.0);
    CHECK(tr.at(3.0) == 0.0);

    QBarTrace t2{2.0, 1.0, 0.0};
    CHECK(t2.at(1.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));

    QBarTrace t3{0.0, 1.0, 2.0};
    CHECK(t3.limit() == doctest::Approx(1.0));
    CHECK(t3.sup_state_bound() == doctest::Approx(std::sqrt(2.0)));
    CHECK(t3.attracting_radius() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("max principle monitor flags corrupted states only") {
    const Grid g{GridMode::Radial, 2, 4.0, 32};
    FieldState s = make_constant_state(g, Vec{0.0});
    QBarTrace tr{1.0, 1.0, 0.0};
    CHECK_FALSE(max_principle_monitor(s, tr).violated);

    s.time = 0.0;
    for (auto& v : s.values) v = 10.0;  // q = 50 >> qbar(0) = 1
    const auto rep = max_principle_monitor(s, tr);
    CHECK(rep.violated);
    CHECK(rep.worst_excess == doctest::Approx(49.0));
}

TEST_CASE("global energy is non-increasing along steps") {
    auto bist = make_potential("bistable", {});
    MinimumPoint m = find_minimum(bist, {1.0});
    const Grid g{GridMode::Radial, 2, 10.0, 128};
    const double dt = auto_dt(g);
    SolverConfig cfg{dt, Scheme::RK4, 1.0, 1000};
    Stepper st(bist, {1.0}, cfg);
    FieldState s = make_constant_state(g, Vec{1.0});
    for (std::size_t p = 0; p + 1 < s.num_points(); ++p) {
        const double r = g.radius_of(p);
        s.values[p] = 1.0 - 2.0 * 0.5 * (1.0 - std::tanh(r - 3.0));
    }
    double prev = energy_plain(s, bist, m);
    for (int block = 0; block < 20; ++block) {
        for (int i = 0; i < 25; ++i) st.step(s);
        const double e = energy_plain(s, bist, m);
        CHECK(e <= prev + 1e-7 * (1.0 + std::abs(prev)));
        prev = e;
    }
}

TEST_CASE("one euler step forward then backward returns to O(dt^2)") {
    auto quad = make_potential("quadratic", {{"n", 1}});
    const Grid g{GridMode::Radial, 2, 8.0, 96};
    const double dt = auto_dt(g);
    SolverConfig fwd{dt, Scheme::ExplicitEuler, 1.0, 1};
    SolverConfig bwd{-dt, Scheme::ExplicitEuler, 1.0, 1};
    Stepper stf(quad, {0.0}, fwd), stb(quad, {0.0}, bwd);
    FieldState s = gaussian_state(g, 1.0, 2.0);
    const FieldState s0 = s;
    stf.step(s);
    stb.step(s);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        worst = std::max(worst, std::abs(s.values[i] - s0.values[i]));
    // The mismatch is dt^2 f'(f) with f carrying the h^-2 diffusion scale, so
    // normalize by the CFL-stable step ratio.
    CHECK(worst <= 10.0 * dt);
}

TEST_CASE("cfl guard formula and blow-up detection") {
    const Grid g{GridMode::Radial, 2, 10.0, 101};
    const double h = g.spacing();
    CHECK(cfl_limit(g) == doctest::Approx(0.9 * h * h / 4.0));

    auto quad = make_potential("quadratic", {{"n", 1}});
    SolverConfig bad{50.0 * cfl_limit(g), Scheme::ExplicitEuler, 1.0, 1};
    Stepper st(quad, {0.0}, bad);
    FieldState s = gaussian_state(g, 1.0, 0.5);
    CHECK_THROWS_AS(
        [&] {
            for (int i = 0; i < 400; ++i) st.step(s);
        }(),
        BlowupError);
}
