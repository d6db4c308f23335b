#include "gradflow/energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gradflow/sampling.hpp"

namespace gradflow {

PointFields compute_point_fields(const FieldState& s, const PotentialSpec& p,
                                 const MinimumPoint& m, const Stepper& stepper) {
    PointFields f;
    const std::size_t np = s.num_points();
    const int n = s.n;
    f.grad_sq = gradient_sq(s);
    f.e_dag.resize(np);
    f.q_half.resize(np);
    f.ut_sq.resize(np);
    f.ut_dot_ur.assign(np, 0.0);
    std::vector<double> ut;
    stepper.rhs(s, ut);
    for (std::size_t pt = 0; pt < np; ++pt) {
        const StateView u = s.point(pt);
        double q = 0.0, utsq = 0.0;
        for (int j = 0; j < n; ++j) {
            const double d = u[j] - m.m[j];
            q += d * d;
            utsq += ut[pt * n + j] * ut[pt * n + j];
        }
        f.q_half[pt] = 0.5 * q;
        f.ut_sq[pt] = utsq;
        f.e_dag[pt] = 0.5 * f.grad_sq[pt] + p.eval(u) - m.v_at_m;
    }
    if (s.grid.mode == GridMode::Radial) {
        const double h = s.grid.spacing();
        for (std::size_t pt = 1; pt + 1 < np; ++pt) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                const double ur =
                    (s.values[(pt + 1) * n + j] - s.values[(pt - 1) * n + j]) / (2.0 * h);
                acc += ut[pt * n + j] * ur;
            }
            f.ut_dot_ur[pt] = acc;
        }
    }
    return f;
}

double energy_plain(const FieldState& s, const PotentialSpec& p, const MinimumPoint& m) {
    std::vector<double> integrand = gradient_sq(s);
    for (std::size_t pt = 0; pt < s.num_points(); ++pt)
        integrand[pt] = 0.5 * integrand[pt] + p.eval(s.point(pt)) - m.v_at_m;
    return domain_integral(s, integrand);
}

double energy_ball(const FieldState& s, const PointFields& f, double radius) {
    return ball_reduce(s, radius, f.e_dag);
}

double dissipation_ball(const FieldState& s, const PointFields& f, double radius) {
    return ball_reduce(s, radius, f.ut_sq);
}

double boundary_term(const FieldState& s, const PointFields& f, double radius) {
    return shell_integral(s, radius, f.e_dag);
}

namespace {

// Weighted integral of a radial profile against chi or psi in a frame moving
// along the first axis; falls back to a plain weighted sum when the weight is
// radially symmetric.
template <typename ScalarWeight>
double weighted_profile_integral(const FieldState& s, std::span<const double> profile,
                                 const WeightParams& w, double t, ScalarWeight&& scalar) {
    const double speed = w.frame_speed();
    if (s.grid.mode == GridMode::Cartesian) {
        const int d = s.grid.space_dim;
        std::vector<double> weighted(s.num_points());
        Vec xi(d);
        for (std::size_t p = 0; p < s.num_points(); ++p) {
            double c_dot = 0.0, rho2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double ci = w.frame_velocity.empty() ? 0.0 : w.frame_velocity[i];
                xi[i] = s.grid.coord(p, i) - ci * t;
                c_dot += ci * xi[i];
                rho2 += xi[i] * xi[i];
            }
            weighted[p] = std::exp(c_dot) * scalar(std::sqrt(rho2), t) * profile[p];
        }
        return domain_integral(s, weighted);
    }
    if (speed == 0.0) {
        std::vector<double> weighted(s.num_points());
        for (std::size_t p = 0; p < s.num_points(); ++p)
            weighted[p] = scalar(s.grid.radius_of(p), t) * profile[p];
        return domain_integral(s, weighted);
    }
    const double offset = speed * t;
    return radial_angular_integral(
        s.grid, offset, [&](std::size_t p, double r, double costh, double rho) {
            const double c_dot_xi = speed * r * costh - speed * offset;
            return std::exp(c_dot_xi) * scalar(rho, t) * profile[p];
        });
}

}  // namespace

double weighted_integral(const FieldState& s, std::span<const double> profile,
                         const WeightParams& w, WeightKind kind) {
    if (kind == WeightKind::Chi)
        return weighted_profile_integral(
            s, profile, w, s.time,
            [&](double rho, double t) { return chi_scalar(rho, t, w.kappa, w.c_cut); });
    return weighted_profile_integral(
        s, profile, w, s.time,
        [&](double rho, double t) { return psi_scalar(rho, t, w.kappa, w.c_cut); });
}

double localized_energy(const FieldState& s, const PointFields& f, const WeightParams& w) {
    return weighted_integral(s, f.e_dag, w, WeightKind::Chi);
}

double localized_dissipation(const FieldState& s, const PointFields& f, const WeightParams& w) {
    const double speed = w.frame_speed();
    if (s.grid.mode == GridMode::Radial && speed != 0.0) {
        // |v_t|^2 = |u_t|^2 + 2 c.x_hat (u_t.u_r) cos + c^2 cos^2 |u_r|^2 in
        // the frame moving along the first axis.
        const double t = s.time;
        const double offset = speed * t;
        return radial_angular_integral(
            s.grid, offset, [&](std::size_t p, double r, double costh, double rho) {
                const double c_dot_xi = speed * r * costh - speed * offset;
                const double w_val =
                    std::exp(c_dot_xi) * chi_scalar(rho, t, w.kappa, w.c_cut);
                const double vt_sq = f.ut_sq[p] + 2.0 * speed * costh * f.ut_dot_ur[p] +
                                     speed * speed * costh * costh * f.grad_sq[p];
                return w_val * vt_sq;
            });
    }
    if (s.grid.mode == GridMode::Cartesian && speed != 0.0)
        throw std::runtime_error("cartesian traveling dissipation requires per-axis derivatives; "
                                 "use the pipeline helpers");
    return weighted_profile_integral(
        s, f.ut_sq, w, s.time,
        [&](double rho, double t) { return chi_scalar(rho, t, w.kappa, w.c_cut); });
}

AsymptoticEnergy asymptotic_energy_estimate(const FunctionalSeries& series,
                                            double fit_window_frac, double cauchy_window_frac) {
    const std::size_t n = series.size();
    AsymptoticEnergy out;
    const std::size_t fit_start = static_cast<std::size_t>(n * (1.0 - fit_window_frac));
    const std::size_t cauchy_start = static_cast<std::size_t>(n * (1.0 - cauchy_window_frac));
    if (n < 10 || n - fit_start < 10 || n - cauchy_start < 5)
        throw std::runtime_error("window too short");

    double lo = series.values[cauchy_start], hi = lo, mean = 0.0;
    for (std::size_t i = cauchy_start; i < n; ++i) {
        lo = std::min(lo, series.values[i]);
        hi = std::max(hi, series.values[i]);
        mean += series.values[i];
    }
    mean /= static_cast<double>(n - cauchy_start);
    out.value = mean;
    out.oscillation = hi - lo;
    const LinearFit fit = linear_fit(series.times, series.values, fit_start, n);
    out.slope = fit.slope;

    const double cauchy_tol = 1e-3 * (1.0 + std::abs(mean));
    const double div_slope = 1e-3;
    if (out.oscillation < cauchy_tol)
        out.status = AsymptoticStatus::Converged;
    else if (fit.slope < -div_slope)
        out.status = AsymptoticStatus::DivergingToMinusInfinity;
    else
        out.status = AsymptoticStatus::Undetermined;
    return out;
}

double max_balance_residual(const FunctionalSeries& energy, const FunctionalSeries& dissipation,
                            const FunctionalSeries& boundary, double c) {
    const std::size_t n = energy.size();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dt = energy.times[i + 1] - energy.times[i - 1];
        if (dt <= 0.0) continue;
        const double de = (energy.values[i + 1] - energy.values[i - 1]) / dt;
        const double r = de + dissipation.values[i] - c * boundary.values[i];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

const char* to_string(AsymptoticStatus s) {
    switch (s) {
        case AsymptoticStatus::Converged: return "Converged";
        case AsymptoticStatus::DivergingToMinusInfinity: return "DivergingToMinusInfinity";
        default: return "Undetermined";
    }
}

}  // namespace gradflow
