#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "gradflow/linalg.hpp"

namespace gradflow {

// Deterministic low-discrepancy (Halton) points in the closed ball of the
// given centre and radius. Supports state dimensions 1..3 directly and uses
// cube rejection above that.
std::vector<Vec> halton_ball(int dim, std::size_t count, const Vec& centre, double radius);

// Evenly spread unit directions: {-1,+1} for dim 1, uniform angles for dim 2,
// a Fibonacci lattice for dim 3+.
std::vector<Vec> sphere_directions(int dim, std::size_t count);

// Derivative-free local maximization (compass pattern search). Deterministic.
Vec pattern_search_max(const std::function<double(const Vec&)>& f, Vec x, double step,
                       double step_tol, int max_iter = 400);

// Golden-section maximization of a 1-D function on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b, double xtol);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t count = 0;
};

// Least-squares line through (t[i], y[i]) for i in [i0, i1).
LinearFit linear_fit(const std::vector<double>& t, const std::vector<double>& y, std::size_t i0,
                     std::size_t i1);

}  // namespace gradflow
