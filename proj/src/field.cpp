#include "gradflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "gradflow/csv.hpp"
#include "gradflow/weights.hpp"

namespace gradflow {

double Grid::spacing() const {
    return (mode == GridMode::Radial) ? extent / (resolution - 1)
                                      : 2.0 * extent / (resolution - 1);
}

std::size_t Grid::num_points() const {
    if (mode == GridMode::Radial) return static_cast<std::size_t>(resolution);
    std::size_t n = 1;
    for (int i = 0; i < space_dim; ++i) n *= static_cast<std::size_t>(resolution);
    return n;
}

double Grid::coord(std::size_t p, int axis) const {
    const double h = spacing();
    if (mode == GridMode::Radial) return static_cast<double>(p) * h;
    std::size_t rem = p;
    for (int i = 0; i < axis; ++i) rem /= static_cast<std::size_t>(resolution);
    const std::size_t j = rem % static_cast<std::size_t>(resolution);
    return -extent + static_cast<double>(j) * h;
}

double Grid::radius_of(std::size_t p) const {
    if (mode == GridMode::Radial) return static_cast<double>(p) * spacing();
    double s = 0.0;
    for (int i = 0; i < space_dim; ++i) {
        const double c = coord(p, i);
        s += c * c;
    }
    return std::sqrt(s);
}

bool Grid::is_boundary(std::size_t p) const {
    if (mode == GridMode::Radial) return p + 1 == static_cast<std::size_t>(resolution);
    std::size_t rem = p;
    for (int i = 0; i < space_dim; ++i) {
        const std::size_t j = rem % static_cast<std::size_t>(resolution);
        if (j == 0 || j + 1 == static_cast<std::size_t>(resolution)) return true;
        rem /= static_cast<std::size_t>(resolution);
    }
    return false;
}

void Grid::validate() const {
    if (resolution < 16) throw std::runtime_error("grid resolution must be >= 16");
    if (extent <= 0.0) throw std::runtime_error("grid extent must be positive");
    if (space_dim < 1) throw std::runtime_error("space dimension must be >= 1");
    if (mode == GridMode::Cartesian && space_dim > 3)
        throw std::runtime_error("cartesian grids support d <= 3");
}

FieldState make_constant_state(const Grid& g, const Vec& value, double time) {
    FieldState s;
    s.grid = g;
    s.n = static_cast<int>(value.size());
    s.time = time;
    s.values.resize(g.num_points() * value.size());
    for (std::size_t p = 0; p < g.num_points(); ++p)
        for (std::size_t j = 0; j < value.size(); ++j) s.values[p * value.size() + j] = value[j];
    return s;
}

std::vector<double> laplacian(const FieldState& s) {
    const Grid& g = s.grid;
    const int n = s.n;
    const double h = g.spacing();
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> out(s.values.size(), 0.0);
    if (g.mode == GridMode::Radial) {
        const std::size_t N = g.num_points();
        const int d = g.space_dim;
        for (int j = 0; j < n; ++j) {
            // r = 0: symmetric limit, one ghost point with u_r(0) = 0.
            out[j] = d * 2.0 * (s.values[n + j] - s.values[j]) * inv_h2;
        }
        for (std::size_t p = 1; p + 1 < N; ++p) {
            const double r = static_cast<double>(p) * h;
            for (int j = 0; j < n; ++j) {
                const double um = s.values[(p - 1) * n + j];
                const double uc = s.values[p * n + j];
                const double up = s.values[(p + 1) * n + j];
                const double urr = (up - 2.0 * uc + um) * inv_h2;
                const double ur = (up - um) / (2.0 * h);
                out[p * n + j] = urr + (d - 1) / r * ur;
            }
        }
        return out;
    }
    const std::size_t N = static_cast<std::size_t>(g.resolution);
    std::size_t strides[3] = {1, N, N * N};
    for (std::size_t p = 0; p < g.num_points(); ++p) {
        if (g.is_boundary(p)) continue;
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int ax = 0; ax < g.space_dim; ++ax) {
                const std::size_t st = strides[ax] * static_cast<std::size_t>(n);
                acc += s.values[p * n + j + st] - 2.0 * s.values[p * n + j] +
                       s.values[p * n + j - st];
            }
            out[p * n + j] = acc * inv_h2;
        }
    }
    return out;
}

std::vector<double> gradient_sq(const FieldState& s) {
    const Grid& g = s.grid;
    const int n = s.n;
    const double h = g.spacing();
    std::vector<double> out(g.num_points(), 0.0);
    if (g.mode == GridMode::Radial) {
        const std::size_t N = g.num_points();
        for (std::size_t p = 1; p < N; ++p) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                double ur;
                if (p + 1 < N) {
                    ur = (s.values[(p + 1) * n + j] - s.values[(p - 1) * n + j]) / (2.0 * h);
                } else {
                    ur = (3.0 * s.values[p * n + j] - 4.0 * s.values[(p - 1) * n + j] +
                          s.values[(p - 2) * n + j]) /
                         (2.0 * h);
                }
                acc += ur * ur;
            }
            out[p] = acc;
        }
        // u_r(0) = 0 by radial symmetry.
        out[0] = 0.0;
        return out;
    }
    const std::size_t N = static_cast<std::size_t>(g.resolution);
    std::size_t strides[3] = {1, N, N * N};
    for (std::size_t p = 0; p < g.num_points(); ++p) {
        double acc = 0.0;
        std::size_t rem = p;
        for (int ax = 0; ax < g.space_dim; ++ax) {
            const std::size_t idx = rem % N;
            rem /= N;
            const std::size_t st = strides[ax] * static_cast<std::size_t>(n);
            for (int j = 0; j < n; ++j) {
                double du;
                const std::size_t base = p * n + j;
                if (idx == 0)
                    du = (-3.0 * s.values[base] + 4.0 * s.values[base + st] -
                          s.values[base + 2 * st]) /
                         (2.0 * h);
                else if (idx + 1 == N)
                    du = (3.0 * s.values[base] - 4.0 * s.values[base - st] +
                          s.values[base - 2 * st]) /
                         (2.0 * h);
                else
                    du = (s.values[base + st] - s.values[base - st]) / (2.0 * h);
                acc += du * du;
            }
        }
        out[p] = acc;
    }
    return out;
}

namespace {

// Trapezoid weight in r for radial quadratures.
double radial_node_weight(const Grid& g, std::size_t p) {
    const double h = g.spacing();
    return (p == 0 || p + 1 == g.num_points()) ? 0.5 * h : h;
}

}  // namespace

double ball_reduce(const FieldState& s, double radius, std::span<const double> integrand) {
    const Grid& g = s.grid;
    if (radius < 0.0 || radius > g.extent + 1e-12)
        throw std::domain_error("ball radius outside the domain");
    if (radius <= 0.0) return 0.0;
    if (g.mode == GridMode::Cartesian) {
        const double hd = std::pow(g.spacing(), g.space_dim);
        double acc = 0.0;
        for (std::size_t p = 0; p < g.num_points(); ++p)
            if (g.radius_of(p) < radius) acc += integrand[p];
        return acc * hd;
    }
    const double h = g.spacing();
    const double surf = sphere_area(g.space_dim);
    const int dm1 = g.space_dim - 1;
    auto gval = [&](std::size_t p) { return std::pow(p * h, dm1) * integrand[p]; };
    const std::size_t jf = std::min<std::size_t>(static_cast<std::size_t>(radius / h),
                                                 g.num_points() - 1);
    double acc = 0.0;
    for (std::size_t p = 1; p <= jf; ++p) acc += 0.5 * (gval(p - 1) + gval(p)) * h;
    if (jf + 1 < g.num_points() && radius > jf * h) {
        // Partial last cell with linear interpolation of the shell integrand.
        const double frac = (radius - jf * h) / h;
        const double g_r = gval(jf) + frac * (gval(jf + 1) - gval(jf));
        acc += 0.5 * (gval(jf) + g_r) * (radius - jf * h);
    }
    return surf * acc;
}

double domain_integral(const FieldState& s, std::span<const double> integrand) {
    const Grid& g = s.grid;
    if (g.mode == GridMode::Cartesian) {
        const double hd = std::pow(g.spacing(), g.space_dim);
        double acc = 0.0;
        for (std::size_t p = 0; p < g.num_points(); ++p) acc += integrand[p];
        return acc * hd;
    }
    const double surf = sphere_area(g.space_dim);
    const int dm1 = g.space_dim - 1;
    double acc = 0.0;
    for (std::size_t p = 0; p < g.num_points(); ++p)
        acc += radial_node_weight(g, p) * std::pow(p * g.spacing(), dm1) * integrand[p];
    return surf * acc;
}

double shell_integral(const FieldState& s, double radius, std::span<const double> integrand) {
    const Grid& g = s.grid;
    if (radius < 0.0 || radius > g.extent + 1e-12)
        throw std::domain_error("shell radius outside the domain");
    if (radius <= 0.0) return 0.0;
    if (g.mode == GridMode::Cartesian) {
        const double h = g.spacing();
        const double hdm1 = std::pow(h, g.space_dim - 1);
        double acc = 0.0;
        for (std::size_t p = 0; p < g.num_points(); ++p) {
            const double r = g.radius_of(p);
            if (r >= radius - 0.5 * h && r < radius + 0.5 * h) acc += integrand[p];
        }
        return acc * hdm1;
    }
    const double h = g.spacing();
    const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(radius / h),
                                                g.num_points() - 2);
    const double frac = (radius - j * h) / h;
    const double f = integrand[j] + frac * (integrand[j + 1] - integrand[j]);
    return sphere_area(g.space_dim) * std::pow(radius, g.space_dim - 1) * f;
}

double max_beyond_radius(const FieldState& s, double radius, std::span<const double> values) {
    double best = 0.0;
    bool any = false;
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        if (s.grid.radius_of(p) < radius) continue;
        best = any ? std::max(best, values[p]) : values[p];
        any = true;
    }
    return any ? best : 0.0;
}

double radial_angular_integral(const Grid& g, double offset,
                               const std::function<double(std::size_t, double, double, double)>& f,
                               int angular_nodes) {
    if (g.mode != GridMode::Radial) throw std::runtime_error("radial grid required");
    const double h = g.spacing();
    const int d = g.space_dim;
    double acc = 0.0;
    if (d == 1) {
        // Even profile on the line: both signed positions contribute at each
        // radius (at r = 0 the two half-line trapezoid endpoints add to h).
        for (std::size_t p = 0; p < g.num_points(); ++p) {
            const double r = p * h;
            const double wr = radial_node_weight(g, p);
            for (double ct : {1.0, -1.0})
                acc += wr * f(p, r, ct, std::abs(ct * r - offset));
        }
        return acc;
    }
    const double pi = std::numbers::pi;
    for (std::size_t p = 1; p < g.num_points(); ++p) {
        const double r = p * h;
        const double wr = radial_node_weight(g, p) * std::pow(r, d - 1);
        double ang = 0.0;
        // Midpoint nodes over [0, pi]; the kernel is symmetric about the axis.
        for (int k = 0; k < angular_nodes; ++k) {
            const double th = pi * (k + 0.5) / angular_nodes;
            const double ct = std::cos(th);
            const double rho =
                std::sqrt(std::max(0.0, r * r + offset * offset - 2.0 * r * offset * ct));
            ang += (d == 2 ? 1.0 : std::sin(th)) * f(p, r, ct, rho);
        }
        ang *= (d == 2) ? 2.0 * pi / angular_nodes : 2.0 * pi * pi / angular_nodes;
        acc += wr * ang;
    }
    return acc;
}

std::vector<std::vector<double>> offset_kernel_matrix(const Grid& g,
                                                      const std::vector<double>& offsets,
                                                      const std::function<double(double)>& w,
                                                      int angular_nodes) {
    if (g.mode != GridMode::Radial) throw std::runtime_error("radial grid required");
    const double h = g.spacing();
    const int d = g.space_dim;
    const double pi = std::numbers::pi;
    std::vector<std::vector<double>> rows;
    rows.reserve(offsets.size());
    for (double p_off : offsets) {
        std::vector<double> row(g.num_points(), 0.0);
        for (std::size_t p = 0; p < g.num_points(); ++p) {
            const double r = p * h;
            const double wr = radial_node_weight(g, p) * std::pow(r, d - 1);
            if (wr == 0.0) continue;
            double ang = 0.0;
            if (d == 1) {
                ang = w(std::abs(r - p_off)) + w(std::abs(-r - p_off));
            } else if (d == 2) {
                for (int k = 0; k < angular_nodes; ++k) {
                    const double th = pi * (k + 0.5) / angular_nodes;
                    const double rho = std::sqrt(std::max(
                        0.0, r * r + p_off * p_off - 2.0 * r * p_off * std::cos(th)));
                    ang += w(rho);
                }
                ang *= 2.0 * pi / angular_nodes;
            } else {
                for (int k = 0; k < angular_nodes; ++k) {
                    const double th = pi * (k + 0.5) / angular_nodes;
                    const double rho = std::sqrt(std::max(
                        0.0, r * r + p_off * p_off - 2.0 * r * p_off * std::cos(th)));
                    ang += std::sin(th) * w(rho);
                }
                ang *= 2.0 * pi * pi / angular_nodes;
            }
            row[p] = wr * ang;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_snapshot_csv(std::ostream& out, const FieldState& s) {
    const Grid& g = s.grid;
    if (g.mode == GridMode::Radial) {
        out << "r";
    } else {
        for (int i = 0; i < g.space_dim; ++i) out << (i ? "," : "") << "x" << (i + 1);
    }
    for (int j = 0; j < s.n; ++j) out << ",u" << (j + 1);
    out << "\n";
    for (std::size_t p = 0; p < g.num_points(); ++p) {
        if (g.mode == GridMode::Radial) {
            out << format_double(g.radius_of(p));
        } else {
            for (int i = 0; i < g.space_dim; ++i)
                out << (i ? "," : "") << format_double(g.coord(p, i));
        }
        for (int j = 0; j < s.n; ++j) out << "," << format_double(s.values[p * s.n + j]);
        out << "\n";
    }
}

}  // namespace gradflow
