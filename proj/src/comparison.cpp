#include "gradflow/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gradflow/sampling.hpp"

namespace gradflow {

ModifiedPotential::ModifiedPotential(const PotentialSpec& p, const MinimumPoint& m,
                                     double r_switch, CutoffProfile profile)
    : pot_(p), m_(m.m), v_at_m_(m.v_at_m), r_switch_(r_switch), profile_(profile) {}

double ModifiedPotential::cutoff(double s) const {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    if (profile_ == CutoffProfile::Linear) return 1.0 - s;
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double ModifiedPotential::cutoff_deriv(double s) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    if (profile_ == CutoffProfile::Linear) return -1.0;
    return -s * s * (30.0 + s * (-60.0 + 30.0 * s));
}

double ModifiedPotential::value(StateView v) const {
    const double r = norm(v);
    const double quad = 0.5 * r * r;
    const double chi = cutoff(r - r_switch_);
    if (chi == 0.0) return quad;
    Vec u(m_.size());
    for (std::size_t i = 0; i < m_.size(); ++i) u[i] = m_[i] + v[i];
    const double vdag = pot_.eval(u) - v_at_m_;
    return chi * vdag + (1.0 - chi) * quad;
}

void ModifiedPotential::grad(StateView v, StateOut g) const {
    const double r = norm(v);
    const double chi = cutoff(r - r_switch_);
    if (chi == 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = v[i];
        return;
    }
    Vec u(m_.size());
    for (std::size_t i = 0; i < m_.size(); ++i) u[i] = m_[i] + v[i];
    Vec gdag(m_.size());
    pot_.grad(u, gdag);
    const double dchi = (r > 0.0) ? cutoff_deriv(r - r_switch_) : 0.0;
    const double vdag = pot_.eval(u) - v_at_m_;
    const double quad = 0.5 * r * r;
    for (std::size_t i = 0; i < v.size(); ++i) {
        g[i] = chi * gdag[i] + (1.0 - chi) * v[i];
        if (dchi != 0.0) g[i] += dchi * (v[i] / r) * (vdag - quad);
    }
}

double ModifiedPotential::radial_term(StateView v) const {
    Vec g(v.size());
    grad(v, g);
    return dot(v, g);
}

double n_bar(const ModifiedPotential& vddag, int state_dim, double q, int seeds) {
    if (q <= 0.0) return 0.0;
    const double r = std::sqrt(2.0 * q);
    if (state_dim == 1) {
        const Vec plus{r}, minus{-r};
        return std::max(-vddag.radial_term(plus), -vddag.radial_term(minus));
    }
    // Seeded sphere scan with local ascent from the best eight directions
    // (the angular landscape can carry several local maxima).
    constexpr int kRefineSeeds = 8;
    if (state_dim == 2) {
        auto at_angle = [&](double th) {
            const Vec v{r * std::cos(th), r * std::sin(th)};
            return -vddag.radial_term(v);
        };
        std::vector<std::pair<double, int>> ranked(seeds);
        for (int k = 0; k < seeds; ++k)
            ranked[k] = {at_angle(2.0 * std::numbers::pi * k / seeds), k};
        std::partial_sort(ranked.begin(), ranked.begin() + kRefineSeeds, ranked.end(),
                          std::greater<>());
        double best = ranked.front().first;
        const double width = 2.0 * std::numbers::pi / seeds;
        for (int j = 0; j < kRefineSeeds; ++j) {
            const double th0 = 2.0 * std::numbers::pi * ranked[j].second / seeds;
            const double th = golden_max(at_angle, th0 - width, th0 + width, 1e-13);
            best = std::max(best, at_angle(th));
        }
        return best;
    }
    const auto dirs = sphere_directions(state_dim, seeds);
    std::vector<std::pair<double, std::size_t>> ranked(dirs.size());
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        Vec v(state_dim);
        for (int i = 0; i < state_dim; ++i) v[i] = r * dirs[k][i];
        ranked[k] = {-vddag.radial_term(v), k};
    }
    const std::size_t refine = std::min<std::size_t>(kRefineSeeds, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + refine, ranked.end(), std::greater<>());
    double best = ranked.front().first;
    auto on_sphere = [&](const Vec& x) {
        const double nx = norm(x);
        if (nx < 1e-14) return -std::numeric_limits<double>::infinity();
        Vec v(state_dim);
        for (int i = 0; i < state_dim; ++i) v[i] = r * x[i] / nx;
        return -vddag.radial_term(v);
    };
    for (std::size_t j = 0; j < refine; ++j) {
        Vec seed(state_dim);
        for (int i = 0; i < state_dim; ++i) seed[i] = r * dirs[ranked[j].second][i];
        const Vec refined = pattern_search_max(on_sphere, seed, 0.1 * r, 1e-12 * r);
        best = std::max(best, on_sphere(refined));
    }
    return best;
}

double sup_n_bar(const ModifiedPotential& vddag, int state_dim, double q_hi) {
    auto f = [&](double q) { return n_bar(vddag, state_dim, q); };
    const int grid = 1024;
    double best = f(0.0);
    int best_k = 0;
    for (int k = 1; k <= grid; ++k) {
        const double val = f(q_hi * k / grid);
        if (val > best) {
            best = val;
            best_k = k;
        }
    }
    const double cell = q_hi / grid;
    const double lo = std::max(0.0, best_k * cell - cell);
    const double hi = std::min(q_hi, best_k * cell + cell);
    const double q_star = golden_max(f, lo, hi, 1e-13 * std::max(1.0, q_hi));
    return std::max(best, f(q_star));
}

double eta0(double rho, const SupersolutionParams& sp) {
    const double gap = sp.gamma_second() - sp.gamma_prime();
    const double ramp_end = sp.q_max / gap;
    if (rho <= 0.0) return sp.q_max + gap;
    if (rho <= ramp_end) return sp.q_max + gap * (1.0 - rho);
    return gap * std::exp(-rho + ramp_end);
}

double eta(double r, double t, const SupersolutionParams& sp) {
    return eta0(r - sp.c * t - sp.r_esc_init, sp);
}

double eta_bar(double r, double t, const SupersolutionParams& sp) {
    return eta(r, t, sp) + sp.gamma_prime() * std::exp(-sp.lambda * t);
}

double c_noesc(const SupersolutionParams& sp, double sup_nbar_value) {
    const double gap = sp.gamma_second() - sp.gamma_prime();
    return std::max((sp.lambda * sp.gamma_prime() + sup_nbar_value) / gap, 1.0 - sp.lambda);
}

ComparisonSetup build_comparison(const PotentialSpec& p, const MinimumPoint& m, double r_bound,
                                 int state_dim, CutoffProfile profile) {
    const double r_switch = r_bound + norm(m.m);
    ComparisonSetup setup{ModifiedPotential(p, m, r_switch, profile), {}, 0.0, 0.0, 0.0};

    // delta < delta' < delta'' inside the escape ball keeps the Hessian
    // positive definite there by construction; shrink only if the scan says
    // otherwise.
    double scale = 1.0;
    double lambda = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            lambda = local_coercivity_lambda(p, m, 0.8 * scale * m.escape_distance);
            break;
        } catch (const std::exception&) {
            scale *= 0.5;
            lambda = 0.0;
        }
    }
    if (lambda <= 0.0) throw std::runtime_error("no positive-definite ball around the minimum");
    SupersolutionParams& sp = setup.params;
    sp.delta = 0.5 * scale * m.escape_distance;
    sp.delta_prime = 0.6 * scale * m.escape_distance;
    sp.delta_second = 0.8 * scale * m.escape_distance;
    sp.lambda = lambda;
    sp.r_coerc = r_bound + norm(m.m) + 1.0 +
                 std::sqrt(lambda * sp.delta_prime * sp.delta_prime / 2.0);
    sp.q_max = 0.5 * sp.r_coerc * sp.r_coerc;
    setup.lambda_from_ball = lambda;
    setup.sup_nbar = sup_n_bar(setup.vddag, state_dim, sp.q_max + sp.gamma_second());
    setup.c_noesc_value = c_noesc(sp, setup.sup_nbar);
    sp.c = setup.c_noesc_value;
    return setup;
}

double supersolution_residual(const ModifiedPotential& vddag, int state_dim,
                              const SupersolutionParams& sp, int nr, int nt, double t_span) {
    const double gap = sp.gamma_second() - sp.gamma_prime();
    const double ramp = sp.q_max / gap;
    const double r_span = sp.r_esc_init + std::max(0.0, sp.c) * t_span + ramp + 10.0;
    const double dr = r_span / nr;
    double worst = -std::numeric_limits<double>::infinity();
    for (int it = 0; it <= nt; ++it) {
        const double t = t_span * it / nt;
        const double front = sp.r_esc_init + sp.c * t;
        const double decay = sp.gamma_prime() * std::exp(-sp.lambda * t);
        for (int ir = 0; ir <= nr; ++ir) {
            const double r = dr * ir;
            // Skip cells adjacent to the two profile kinks.
            if (std::abs(r - front) <= dr || std::abs(r - (front + ramp)) <= dr) continue;
            const double rho = r - front;
            const double e = eta0(rho, sp);
            double eta_r, eta_rr;
            if (rho < 0.0) {
                eta_r = 0.0;
                eta_rr = 0.0;
            } else if (rho < ramp) {
                eta_r = -gap;
                eta_rr = 0.0;
            } else {
                eta_r = -e;
                eta_rr = e;
            }
            const double lhs = -sp.c * eta_r - sp.lambda * decay;
            const double rhs = n_bar(vddag, state_dim, e + decay) + eta_rr;
            worst = std::max(worst, rhs - lhs);
        }
    }
    return worst;
}

double choose_r_esc_init(const FieldState& initial, const MinimumPoint& m, double gamma_prime) {
    const Grid& g = initial.grid;
    double r_needed = -1.0;
    for (std::size_t p = 0; p < initial.num_points(); ++p) {
        double q = 0.0;
        const StateView u = initial.point(p);
        for (int j = 0; j < initial.n; ++j) {
            const double d = u[j] - m.m[j];
            q += 0.5 * d * d;
        }
        if (q > gamma_prime) r_needed = std::max(r_needed, g.radius_of(p));
    }
    if (r_needed < 0.0) return g.spacing();  // already inside the envelope everywhere
    const double r0 = r_needed + g.spacing();
    if (r0 >= g.extent) throw std::runtime_error("r_esc_init too small");
    return r0;
}

double sandwich_excess(const FieldState& s, const MinimumPoint& m,
                       const SupersolutionParams& sp) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        double q = 0.0;
        const StateView u = s.point(p);
        for (int j = 0; j < s.n; ++j) {
            const double d = u[j] - m.m[j];
            q += 0.5 * d * d;
        }
        worst = std::max(worst, q - eta_bar(s.grid.radius_of(p), s.time, sp));
    }
    return worst;
}

double subsolution_residual(const FieldState& s, const MinimumPoint& m, const Stepper& stepper,
                            const ModifiedPotential& vddag, int sample_stride) {
    FieldState qfield;
    qfield.grid = s.grid;
    qfield.n = 1;
    qfield.time = s.time;
    qfield.values.resize(s.num_points());
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        double q = 0.0;
        const StateView u = s.point(p);
        for (int j = 0; j < s.n; ++j) {
            const double d = u[j] - m.m[j];
            q += 0.5 * d * d;
        }
        qfield.values[p] = q;
    }
    std::vector<double> ut;
    stepper.rhs(s, ut);
    const std::vector<double> lap_q = laplacian(qfield);
    double worst = -std::numeric_limits<double>::infinity();
    Vec v(s.n);
    for (std::size_t p = 1; p + 1 < s.num_points(); p += sample_stride) {
        if (s.grid.is_boundary(p)) continue;
        const StateView u = s.point(p);
        double qt = 0.0;
        for (int j = 0; j < s.n; ++j) {
            v[j] = u[j] - m.m[j];
            qt += v[j] * ut[p * s.n + j];
        }
        const double nb = n_bar(vddag, s.n, qfield.values[p]);
        worst = std::max(worst, qt - nb - lap_q[p]);
    }
    return worst;
}

}  // namespace gradflow
