#pragma once

#include "gradflow/csv.hpp"
#include "gradflow/field.hpp"
#include "gradflow/potential.hpp"
#include "gradflow/solver.hpp"
#include "gradflow/weights.hpp"

namespace gradflow {

// Per-point scalar fields shared by the energy and firewall functionals.
// e_dag = |grad u|^2/2 + V(u) - V(m); ut_sq = |u_t|^2 with u_t taken from the
// PDE right-hand side; q_half = |u - m|^2/2.
struct PointFields {
    std::vector<double> e_dag;
    std::vector<double> ut_sq;
    std::vector<double> q_half;
    std::vector<double> grad_sq;
    std::vector<double> ut_dot_ur;  // radial grids only; zero otherwise
};

PointFields compute_point_fields(const FieldState& s, const PotentialSpec& p,
                                 const MinimumPoint& m, const Stepper& stepper);

// Energy over the truncated domain, normalized so u == m gives 0.
double energy_plain(const FieldState& s, const PotentialSpec& p, const MinimumPoint& m);

// Ball functionals at radius R: energy, dissipation, and the surface term.
double energy_ball(const FieldState& s, const PointFields& f, double radius);
double dissipation_ball(const FieldState& s, const PointFields& f, double radius);
double boundary_term(const FieldState& s, const PointFields& f, double radius);

// Weighted functionals in a frame moving at w.frame_velocity (energies use
// chi, firewalls psi). The state is never resampled: weights shift instead.
double localized_energy(const FieldState& s, const PointFields& f, const WeightParams& w);
double localized_dissipation(const FieldState& s, const PointFields& f, const WeightParams& w);

enum class WeightKind { Chi, Psi };

// Integral of a per-point profile against the chi or psi weight evaluated at
// xi = x - c t. Radial grids with a moving frame use the angular-offset
// quadrature; the profile itself must be radially symmetric there.
double weighted_integral(const FieldState& s, std::span<const double> profile,
                         const WeightParams& w, WeightKind kind);

enum class AsymptoticStatus { Converged, DivergingToMinusInfinity, Undetermined };

struct AsymptoticEnergy {
    AsymptoticStatus status = AsymptoticStatus::Undetermined;
    double value = 0.0;        // tail mean (meaningful when Converged)
    double oscillation = 0.0;  // max - min over the Cauchy window
    double slope = 0.0;        // fitted tail slope
};

// Tail classification of a functional series: Cauchy tail -> Converged,
// steady downward trend -> DivergingToMinusInfinity, else Undetermined.
// Throws std::runtime_error("window too short") below 10 tail samples.
AsymptoticEnergy asymptotic_energy_estimate(const FunctionalSeries& series,
                                            double fit_window_frac = 0.5,
                                            double cauchy_window_frac = 0.25);

// max over interior samples of |dE/dt + D - c B| with dE/dt by centered
// differences of the series.
double max_balance_residual(const FunctionalSeries& energy, const FunctionalSeries& dissipation,
                            const FunctionalSeries& boundary, double c);

const char* to_string(AsymptoticStatus s);

}  // namespace gradflow
