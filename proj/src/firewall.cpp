#include "gradflow/firewall.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gradflow/sampling.hpp"

namespace gradflow {

bool FirewallConstants::inequalities_hold(int space_dim, std::string* why) const {
    if (w_en * kappa0 * kappa0 / 4.0 > 0.5 + 1e-12) {
        if (why) *why = "w_en*kappa0^2/4 exceeds 1/2";
        return false;
    }
    if (kappa0 * kappa0 / 2.0 > lambda_min / 8.0 + 1e-12) {
        if (why) *why = "kappa0^2/2 exceeds lambda_min/8";
        return false;
    }
    if (nu_f0 * w_en > 0.5 + 1e-12) {
        if (why) *why = "nu_f0*w_en exceeds 1/2";
        return false;
    }
    if (nu_f0 / 2.0 > lambda_min / 8.0 + 1e-12) {
        if (why) *why = "nu_f0/2 exceeds lambda_min/8";
        return false;
    }
    if (nu_f * w_en > 0.25 + 1e-12) {
        if (why) *why = "nu_f*w_en exceeds 1/4";
        return false;
    }
    if (nu_f / 2.0 > lambda_min / 8.0 + 1e-12) {
        if (why) *why = "nu_f/2 exceeds lambda_min/8";
        return false;
    }
    return kappa_ccut_conditions_hold(w_en, kappa, c_cut, space_dim, lambda_min, why);
}

FirewallConstants firewall_constants(const PotentialSpec& p, const MinimumPoint& m,
                                     const CoercivityConstants& cc, double r_max_infty,
                                     int space_dim, double c_hom) {
    FirewallConstants fc;
    fc.lambda_min = m.lambda_min;
    fc.w_en = cc.w_en;
    fc.r_max_infty = r_max_infty;
    fc.kappa0 = default_kappa0(cc.w_en, m.lambda_min);
    fc.nu_f0 = std::min(1.0 / (2.0 * cc.w_en), m.lambda_min / 4.0);
    fc.kappa = default_kappa(cc.w_en, m.lambda_min, space_dim);
    fc.c_cut = default_c_cut(cc.w_en, m.lambda_min, c_hom);
    fc.nu_f = std::min(1.0 / (4.0 * cc.w_en), m.lambda_min / 4.0);
    fc.k_ef = fc.kappa * (fc.c_cut + fc.kappa) / cc.w_en;

    // Pollution bound: sampled maximization of the decrease-lemma bracket
    // over the trajectory's sup-norm ball.
    const int n = p.state_dim;
    Vec g(n);
    auto bracket = [&](const Vec& v) {
        if (norm(v) > r_max_infty) return -std::numeric_limits<double>::infinity();
        p.grad(v, g);
        double vg = 0.0, d2 = 0.0;
        for (int i = 0; i < n; ++i) {
            vg += (v[i] - m.m[i]) * g[i];
            d2 += (v[i] - m.m[i]) * (v[i] - m.m[i]);
        }
        return -vg + 0.5 * std::abs(p.eval(v) - m.v_at_m) + 0.25 * m.lambda_min * d2;
    };
    const auto samples = halton_ball(n, 4096, Vec(n, 0.0), r_max_infty);
    Vec best(n, 0.0);
    double best_val = bracket(best);
    for (const auto& v : samples) {
        const double b = bracket(v);
        if (b > best_val) {
            best_val = b;
            best = v;
        }
    }
    const Vec refined = pattern_search_max(bracket, best, 0.05 * r_max_infty, 1e-12);
    fc.k_f0 = std::max({0.0, best_val, bracket(refined)}) * (1.0 + 1e-9);
    return fc;
}

double firewall0(const FieldState& s, const PointFields& f, const Vec& xbar, double kappa0) {
    const std::size_t np = s.num_points();
    if (s.grid.mode == GridMode::Cartesian) {
        std::vector<double> integrand(np);
        const int d = s.grid.space_dim;
        for (std::size_t p = 0; p < np; ++p) {
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) {
                const double dx = s.grid.coord(p, i) - xbar[i];
                r2 += dx * dx;
            }
            integrand[p] = std::exp(-kappa0 * std::sqrt(r2)) * (f.e_dag[p] + f.q_half[p]);
        }
        return domain_integral(s, integrand);
    }
    const double offset = norm(xbar);
    return radial_angular_integral(s.grid, offset,
                                   [&](std::size_t p, double, double, double rho) {
                                       return std::exp(-kappa0 * rho) *
                                              (f.e_dag[p] + f.q_half[p]);
                                   });
}

Firewall0Evaluator::Firewall0Evaluator(const Grid& g, std::vector<double> probe_radii,
                                       double kappa0)
    : probes_(std::move(probe_radii)) {
    kernel_ = offset_kernel_matrix(g, probes_,
                                   [kappa0](double rho) { return std::exp(-kappa0 * rho); });
}

double Firewall0Evaluator::value(const PointFields& f, std::size_t probe) const {
    const auto& row = kernel_[probe];
    double acc = 0.0;
    for (std::size_t p = 0; p < row.size(); ++p) acc += row[p] * (f.e_dag[p] + f.q_half[p]);
    return acc;
}

double Firewall0Evaluator::pollution(const std::vector<std::uint8_t>& mask,
                                     std::size_t probe) const {
    const auto& row = kernel_[probe];
    double acc = 0.0;
    for (std::size_t p = 0; p < row.size(); ++p)
        if (mask[p]) acc += row[p];
    return acc;
}

Firewall0Coercivity Firewall0Evaluator::coercivity(const PointFields& f, double w_en,
                                                   std::size_t probe) const {
    const auto& row = kernel_[probe];
    Firewall0Coercivity out;
    const double coeff = std::min(0.5 * w_en, 0.25);
    for (std::size_t p = 0; p < row.size(); ++p) {
        out.lhs += row[p] * (f.e_dag[p] + f.q_half[p]);
        out.rhs += row[p] * coeff * (f.grad_sq[p] + 2.0 * f.q_half[p]);
    }
    return out;
}

std::vector<double> default_probe_panel(const Grid& g, int count) {
    const double outer = 0.8 * g.extent;
    const double inner = std::max(g.spacing(), outer / 1024.0);
    std::vector<double> probes{0.0};
    const double ratio = std::pow(outer / inner, 1.0 / (count - 2));
    for (int k = 0; k < count - 1; ++k) probes.push_back(inner * std::pow(ratio, k));
    probes.back() = outer;
    return probes;
}

double firewall_traveling(const FieldState& s, const PointFields& f, const WeightParams& w,
                          double w_en, double lambda_min) {
    std::string why;
    if (!kappa_ccut_conditions_hold(w_en, w.kappa, w.c_cut, s.grid.space_dim, lambda_min, &why))
        throw std::domain_error("weight conditions violated: " + why);
    if (!frame_speed_conditions_hold(w.frame_speed(), w.kappa, w.c_cut, lambda_min, &why))
        throw std::domain_error("frame speed conditions violated: " + why);
    std::vector<double> profile(s.num_points());
    for (std::size_t p = 0; p < s.num_points(); ++p)
        profile[p] = w_en * f.e_dag[p] + f.q_half[p];
    return weighted_integral(s, profile, w, WeightKind::Psi);
}

double max_decay_residual(const FunctionalSeries& fw, const FunctionalSeries& pollution,
                          double nu, double k) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < fw.size(); ++i) {
        const double dt = fw.times[i + 1] - fw.times[i - 1];
        if (dt <= 0.0) continue;
        const double df = (fw.values[i + 1] - fw.values[i - 1]) / dt;
        worst = std::max(worst, df + nu * fw.values[i] - k * pollution.values[i]);
    }
    return worst;
}

ExponentialFit firewall_exponential_fit(const FunctionalSeries& sup_firewall,
                                        const FunctionalSeries& r_esc_outer, double c1, double c2,
                                        const FirewallConstants& fc, double tail_frac) {
    ExponentialFit out;
    out.predicted_rate = std::min(fc.nu_f0, fc.kappa0 * (c2 - c1) / 2.0);
    const std::size_t n = sup_firewall.size();
    const std::size_t start = static_cast<std::size_t>(n * (1.0 - tail_frac));
    if (n == 0) {
        out.identically_zero = true;
        return out;
    }
    // The two series may be sampled on different strides; gate the escape
    // track by the window start time.
    const double t_start = sup_firewall.times[start];
    for (std::size_t i = 0; i < r_esc_outer.size(); ++i) {
        const double t = r_esc_outer.times[i];
        if (t >= t_start && t > 0.0 && r_esc_outer.values[i] > c1 * t + 1e-12)
            throw std::runtime_error("hypothesis violated: escape set leaves B(c1 t)");
    }
    std::vector<double> ts, logs;
    for (std::size_t i = start; i < n; ++i) {
        if (sup_firewall.values[i] > 1e-290) {
            ts.push_back(sup_firewall.times[i]);
            logs.push_back(std::log(sup_firewall.values[i]));
        }
    }
    if (ts.size() < 5) {
        out.identically_zero = true;
        return out;
    }
    const LinearFit fit = linear_fit(ts, logs, 0, ts.size());
    out.rate = -fit.slope;
    out.prefactor = std::exp(fit.intercept);
    return out;
}

}  // namespace gradflow
