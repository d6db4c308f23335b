#pragma once

#include <functional>

#include "gradflow/potential.hpp"

namespace oracles {

// Adaptive Simpson quadrature to abs/rel tolerance.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

// Solution of u_t = -u + Lap u with a radial Gaussian initial condition
// A exp(-r^2 / (2 sigma^2)) in dimension d.
double quadratic_gaussian_solution(double r, double t, double amplitude, double sigma, int d);

// Escape distance by dense scan of V'' for 1-D potentials.
double escape_distance_scan_1d(const gradflow::PotentialSpec& p, double m, double lambda_min,
                               int points_per_unit = 4096);

// Roots u_minus < u_zero < u_plus of u^3 - u - a = 0 (|a| < 2/(3 sqrt 3)).
struct CubicRoots {
    double u_minus, u_zero, u_plus;
};
CubicRoots tilted_bistable_roots(double a);

// Planar front speed for V' = u^3 - u - a, closed form for the quartic well.
double front_speed_closed_form(double a);

// Planar front speed by shooting on the 1-D profile equation.
double front_speed_shooting(double a, double tol = 1e-9);

}  // namespace oracles
