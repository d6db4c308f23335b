#include "gradflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradflow/sampling.hpp"

namespace gradflow {

SigmaDescriptor sigma_esc(const FieldState& s, const MinimumPoint& m) {
    SigmaDescriptor out;
    out.mask.assign(s.num_points(), 0);
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        const StateView u = s.point(p);
        double d2 = 0.0;
        for (int j = 0; j < s.n; ++j) {
            const double d = u[j] - m.m[j];
            d2 += d * d;
        }
        if (std::sqrt(d2) > m.escape_distance) {
            out.mask[p] = 1;
            out.empty = false;
            out.outer_radius = std::max(out.outer_radius, s.grid.radius_of(p));
        }
    }
    return out;
}

std::vector<double> deviation_profile(const FieldState& s, const MinimumPoint& m) {
    const Grid& g = s.grid;
    auto dev = [&](std::size_t p) {
        double d2 = 0.0;
        const StateView u = s.point(p);
        for (int j = 0; j < s.n; ++j) {
            const double d = u[j] - m.m[j];
            d2 += d * d;
        }
        return std::sqrt(d2);
    };
    if (g.mode == GridMode::Radial) {
        std::vector<double> prof(g.num_points());
        for (std::size_t p = 0; p < g.num_points(); ++p) prof[p] = dev(p);
        return prof;
    }
    const double h = g.spacing();
    const std::size_t shells = static_cast<std::size_t>(std::ceil(g.extent * std::sqrt(
                                   double(g.space_dim)) / h)) + 2;
    std::vector<double> prof(shells, 0.0);
    for (std::size_t p = 0; p < g.num_points(); ++p) {
        const auto k = static_cast<std::size_t>(std::lround(g.radius_of(p) / h));
        prof[std::min(k, shells - 1)] = std::max(prof[std::min(k, shells - 1)], dev(p));
    }
    return prof;
}

double hom_radius(const FieldState& s, const MinimumPoint& m, double band, double hom_tol) {
    const std::vector<double> prof = deviation_profile(s, m);
    const double h = s.grid.spacing();
    const double rmax = s.grid.extent;
    std::vector<double> bad;  // radii where the deviation exceeds hom_tol
    for (std::size_t k = 0; k < prof.size(); ++k)
        if (prof[k] > hom_tol) bad.push_back(k * h);
    if (bad.empty()) return rmax;
    for (double r = rmax; r >= 0.0; r -= h) {
        const auto lo = std::lower_bound(bad.begin(), bad.end(), r - band);
        if (lo == bad.end() || *lo > r + band) return r;
    }
    return 0.0;
}

double r_esc_within(const FieldState& s, const MinimumPoint& m, double r_hom) {
    const std::vector<double> prof = deviation_profile(s, m);
    const double h = s.grid.spacing();
    double best = 0.0;
    for (std::size_t k = 0; k < prof.size(); ++k) {
        const double r = k * h;
        if (r >= r_hom) break;
        if (prof[k] >= m.escape_distance) best = r;
    }
    return best;
}

SpeedEstimate invasion_speed_fit(const EscapeTrack& track, double window_frac) {
    const std::size_t n = track.times.size();
    const std::size_t start = static_cast<std::size_t>(n * (1.0 - window_frac));
    if (n < 10 || n - start < 10) throw std::runtime_error("window too short");
    SpeedEstimate out;
    bool all_empty = true;
    for (std::size_t i = start; i < n; ++i)
        if (!track.sigma_empty[i]) all_empty = false;
    if (all_empty) {
        out.degenerate = true;
        return out;
    }
    const LinearFit fit = linear_fit(track.times, track.r_esc_outer, start, n);
    out.c_inv = std::max(0.0, fit.slope);
    const double half = 1.96 * fit.slope_stderr;
    out.ci_lo = std::max(0.0, fit.slope - half);
    out.ci_hi = std::max(0.0, fit.slope + half);
    return out;
}

HomFlags hom_flags(const EscapeTrack& track, double domain_radius, double noinv_tol,
                   double window_frac) {
    const std::size_t n = track.times.size();
    const std::size_t start = static_cast<std::size_t>(n * (1.0 - window_frac));
    HomFlags out;
    if (n - start < 5) return out;
    std::size_t clamped = 0;
    for (std::size_t i = start; i < n; ++i)
        if (track.r_hom[i] >= 0.95 * domain_radius) ++clamped;
    const LinearFit fit = linear_fit(track.times, track.r_hom, start, n);
    out.hom_slope = fit.slope;
    // Clamped at the domain edge counts as homogeneous arbitrarily far out.
    out.h_hom = (clamped >= (n - start) * 9 / 10) ||
                (fit.slope > 0.0 && fit.slope_stderr < 0.5 * fit.slope);
    double worst = 0.0;
    for (std::size_t i = start; i < n; ++i)
        if (track.times[i] > 0.0) worst = std::max(worst, track.r_esc_hom[i] / track.times[i]);
    out.resc_over_t_tail = worst;
    out.h_noinv = worst <= noinv_tol;
    return out;
}

DecayFit decay_rate_fit(const FunctionalSeries& series, double tail_frac) {
    DecayFit out;
    const std::size_t n = series.size();
    const std::size_t start = static_cast<std::size_t>(n * (1.0 - tail_frac));
    std::vector<double> ts, logs;
    for (std::size_t i = start; i < n; ++i) {
        if (series.values[i] > 1e-290) {
            ts.push_back(series.times[i]);
            logs.push_back(std::log(series.values[i]));
        }
    }
    if (ts.size() < 5) {
        out.identically_zero = true;
        return out;
    }
    out.rate = -linear_fit(ts, logs, 0, ts.size()).slope;
    return out;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::NoInvasion: return "NoInvasion";
        case Verdict::Invasion: return "Invasion";
        default: return "Inconclusive";
    }
}

DichotomyReport dichotomy_verdict(const EscapeTrack& track, const FunctionalSeries& energy_ball,
                                  const FunctionalSeries& sup_ut, double spacing,
                                  double window_frac) {
    DichotomyReport rep;
    const std::size_t n = track.times.size();
    // A trajectory too short for the tail fits cannot support either branch.
    try {
        const double t_window = track.times.back() - track.times[static_cast<std::size_t>(
                                    n * (1.0 - window_frac))];
        rep.speed_zero_tol = 2.0 * spacing / std::max(t_window, 1e-12);
        rep.c_inv = invasion_speed_fit(track, window_frac);
        rep.e_asympt = asymptotic_energy_estimate(energy_ball);
    } catch (const std::runtime_error&) {
        rep.verdict = Verdict::Inconclusive;
        rep.checks.push_back({"window_long_enough", double(n), 10.0, false});
        return rep;
    }

    const std::size_t ut_n = sup_ut.size();
    for (std::size_t i = ut_n - std::max<std::size_t>(1, ut_n / 10); i < ut_n; ++i)
        rep.ut_tail = std::max(rep.ut_tail, sup_ut.values[i]);

    const bool speed_zero = rep.c_inv.ci_hi <= rep.speed_zero_tol;
    const bool speed_positive = rep.c_inv.ci_lo > rep.speed_zero_tol;
    const bool energy_converged = rep.e_asympt.status == AsymptoticStatus::Converged &&
                                  rep.e_asympt.value >= -rep.accept_tol;
    const bool energy_diverging =
        rep.e_asympt.status == AsymptoticStatus::DivergingToMinusInfinity;
    const bool ut_small = rep.ut_tail <= rep.ut_tol;

    rep.checks.push_back({"c_inv_ci_upper", rep.c_inv.ci_hi, rep.speed_zero_tol, speed_zero});
    rep.checks.push_back({"c_inv_ci_lower", rep.c_inv.ci_lo, rep.speed_zero_tol, speed_positive});
    rep.checks.push_back({"e_asympt_value", rep.e_asympt.value, -rep.accept_tol,
                          rep.e_asympt.value >= -rep.accept_tol});
    rep.checks.push_back({"e_asympt_oscillation", rep.e_asympt.oscillation,
                          1e-3 * (1.0 + std::abs(rep.e_asympt.value)),
                          rep.e_asympt.status == AsymptoticStatus::Converged});
    rep.checks.push_back({"ut_tail", rep.ut_tail, rep.ut_tol, ut_small});

    if (speed_zero && energy_converged && ut_small)
        rep.verdict = Verdict::NoInvasion;
    else if (speed_positive && energy_diverging)
        rep.verdict = Verdict::Invasion;
    else
        rep.verdict = Verdict::Inconclusive;
    return rep;
}

std::vector<double> tail_quarter_integrals(const FunctionalSeries& series, double window_frac) {
    const std::size_t n = series.size();
    const std::size_t start = static_cast<std::size_t>(n * (1.0 - window_frac));
    std::vector<double> quarters(4, 0.0);
    if (n - start < 8) return quarters;
    const std::size_t len = (n - start) / 4;
    for (int q = 0; q < 4; ++q) {
        const std::size_t a = start + q * len;
        const std::size_t b = (q == 3) ? n : a + len;
        for (std::size_t i = a + 1; i < b; ++i) {
            quarters[q] += 0.5 * (series.values[i] + series.values[i - 1]) *
                           (series.times[i] - series.times[i - 1]);
        }
    }
    return quarters;
}

}  // namespace gradflow
