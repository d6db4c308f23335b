#pragma once

#include <cstdint>
#include <string>

#include "gradflow/energy.hpp"

namespace gradflow {

// Escape-set descriptor for one snapshot.
struct SigmaDescriptor {
    std::vector<std::uint8_t> mask;  // per grid point: |u - m| > d_Esc
    double outer_radius = 0.0;
    bool empty = true;
};

SigmaDescriptor sigma_esc(const FieldState& s, const MinimumPoint& m);

// max |u - m| per radial node (radial grids) or per radius shell (Cartesian).
std::vector<double> deviation_profile(const FieldState& s, const MinimumPoint& m);

// Time series of escape/homogeneity radii.
struct EscapeTrack {
    std::vector<double> times;
    std::vector<double> r_esc_outer;  // outer radius of the escape set
    std::vector<double> r_esc_hom;    // escape radius relative to r_hom
    std::vector<double> r_hom;
    std::vector<std::uint8_t> sigma_empty;
};

// Largest R whose clipped annulus [R-band, R+band] stays within hom_tol of m.
double hom_radius(const FieldState& s, const MinimumPoint& m, double band, double hom_tol);

// Escape radius restricted to [0, r_hom): outermost shell with deviation
// >= d_Esc, zero when none.
double r_esc_within(const FieldState& s, const MinimumPoint& m, double r_hom);

struct SpeedEstimate {
    double c_inv = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    bool degenerate = false;  // escape set empty over the whole window
};

// Least-squares slope of r_esc_outer over the tail window, clamped to >= 0;
// throws std::runtime_error("window too short") below 10 samples.
SpeedEstimate invasion_speed_fit(const EscapeTrack& track, double window_frac = 0.5);

struct HomFlags {
    bool h_hom = false;
    bool h_noinv = false;
    double hom_slope = 0.0;
    double resc_over_t_tail = 0.0;
};

HomFlags hom_flags(const EscapeTrack& track, double domain_radius, double noinv_tol,
                   double window_frac = 0.5);

// Exponential-rate fit of a nonnegative decaying series over its tail.
struct DecayFit {
    double rate = 0.0;
    bool identically_zero = false;
};

DecayFit decay_rate_fit(const FunctionalSeries& series, double tail_frac = 0.5);

enum class Verdict { NoInvasion, Invasion, Inconclusive };
const char* to_string(Verdict v);

struct CheckItem {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct DichotomyReport {
    SpeedEstimate c_inv;
    AsymptoticEnergy e_asympt;
    double ut_tail = 0.0;  // max sup|u_t| over the last 10% of the run
    Verdict verdict = Verdict::Inconclusive;
    std::vector<CheckItem> checks;
    double speed_zero_tol = 0.0;
    double accept_tol = 5e-3;
    double ut_tol = 1e-4;
};

// Combines the fitted invasion speed, the asymptotic-energy estimate, and the
// derivative decay into the dichotomy verdict. speed_zero_tol is the
// grid-limited zero-speed resolution 2h / (fit-window length).
DichotomyReport dichotomy_verdict(const EscapeTrack& track, const FunctionalSeries& energy_ball,
                                  const FunctionalSeries& sup_ut, double spacing,
                                  double window_frac = 0.5);

// Integrals of a series over the four quarters of its tail window (used to
// check that dissipation increments shrink).
std::vector<double> tail_quarter_integrals(const FunctionalSeries& series,
                                           double window_frac = 0.5);

}  // namespace gradflow
