#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gradflow/linalg.hpp"

namespace gradflow {

enum class GridMode { Cartesian, Radial };

// Spatial discretization. Radial grids store N samples at r_j = j h with
// h = extent/(N-1); Cartesian grids cover [-L, L]^d with N points per axis.
struct Grid {
    GridMode mode = GridMode::Radial;
    int space_dim = 2;
    double extent = 1.0;
    int resolution = 16;

    double spacing() const;
    std::size_t num_points() const;
    // |x| of the grid point with flat index p.
    double radius_of(std::size_t p) const;
    // Cartesian coordinate along `axis` (Radial: axis 0 gives r).
    double coord(std::size_t p, int axis) const;
    bool is_boundary(std::size_t p) const;
    void validate() const;  // throws std::runtime_error on bad parameters
};

// Discretized state u(., t): `values` is point-major, n doubles per point.
struct FieldState {
    Grid grid;
    int n = 1;
    std::vector<double> values;
    double time = 0.0;

    StateOut point(std::size_t p) { return {values.data() + p * n, static_cast<std::size_t>(n)}; }
    StateView point(std::size_t p) const {
        return {values.data() + p * n, static_cast<std::size_t>(n)};
    }
    std::size_t num_points() const { return grid.num_points(); }
};

FieldState make_constant_state(const Grid& g, const Vec& value, double time = 0.0);

// Second-order Laplacian of every state component; boundary rows are zero
// (Dirichlet clamp). Radial grids use u_rr + (d-1)/r u_r with the symmetric
// regularization d*u_rr at r = 0.
std::vector<double> laplacian(const FieldState& s);

// |grad u|^2 per grid point (sum over space and state components).
std::vector<double> gradient_sq(const FieldState& s);

// Integral of a per-point scalar over the ball of radius R.
double ball_reduce(const FieldState& s, double radius, std::span<const double> integrand);

// Integral over the whole truncated domain.
double domain_integral(const FieldState& s, std::span<const double> integrand);

// Surface integral over the sphere of radius R (shell sum of width h on
// Cartesian grids, interpolated S_{d-1} R^{d-1} f(R) on radial ones).
double shell_integral(const FieldState& s, double radius, std::span<const double> integrand);

// max over grid points of a per-point scalar restricted to |x| >= radius.
double max_beyond_radius(const FieldState& s, double radius, std::span<const double> values);

// Angular-offset quadrature on radial grids:
//   integral over R^d of f(j, r_j, cos theta, |x - p e1|) dx
// where theta is the angle between x and the offset axis e1. Used for
// integrands that are radial profiles times a kernel centred at p e1.
double radial_angular_integral(const Grid& g, double offset,
                               const std::function<double(std::size_t, double, double, double)>& f,
                               int angular_nodes = 64);

// Precomputed kernel rows k[j] with sum_j k[j] f(r_j) equal to the integral
// of w(|x - p e1|) f(|x|) dx; one row per probe offset.
std::vector<std::vector<double>> offset_kernel_matrix(
    const Grid& g, const std::vector<double>& offsets,
    const std::function<double(double)>& w, int angular_nodes = 64);

// Writes a snapshot as CSV: r (or x1..xd) columns then u1..un.
void write_snapshot_csv(std::ostream& out, const FieldState& s);

}  // namespace gradflow
