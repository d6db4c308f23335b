#include "gradflow/weights.hpp"

#include <cmath>
#include <numbers>

namespace gradflow {

double WeightParams::frame_speed() const {
    if (frame_velocity.empty()) return 0.0;
    return norm(frame_velocity);
}

bool kappa_ccut_conditions_hold(double w_en, double kappa, double c_cut, int space_dim,
                                double lambda_min, std::string* why) {
    if (w_en * kappa * (c_cut / 2.0 + kappa / 4.0) > 0.5 + 1e-12) {
        if (why) *why = "w_en*kappa*(c_cut/2 + kappa/4) exceeds 1/2";
        return false;
    }
    if (w_en * kappa * c_cut > 0.25 + 1e-12) {
        if (why) *why = "w_en*kappa*c_cut exceeds 1/4";
        return false;
    }
    if (kappa * (space_dim * kappa + c_cut) / 2.0 > lambda_min / 8.0 + 1e-12) {
        if (why) *why = "kappa*(d*kappa + c_cut)/2 exceeds lambda_min/8";
        return false;
    }
    return true;
}

bool frame_speed_conditions_hold(double speed, double kappa, double c_cut, double lambda_min,
                                 std::string* why) {
    if (speed > std::sqrt(lambda_min) / 4.0 + 1e-12) {
        if (why) *why = "|c| exceeds sqrt(lambda_min)/4";
        return false;
    }
    if (speed > kappa / 20.0 + 1e-12) {
        if (why) *why = "|c| exceeds kappa/20";
        return false;
    }
    if (speed > c_cut / 6.0 + 1e-12) {
        if (why) *why = "|c| exceeds c_cut/6";
        return false;
    }
    return true;
}

double psi0(StateView x, StateView centre, double kappa0) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double c = centre.empty() ? 0.0 : centre[i];
        const double d = x[i] - c;
        s += d * d;
    }
    return std::exp(-kappa0 * std::sqrt(s));
}

double psi0(StateView x, const WeightParams& w) { return psi0(x, w.centre, w.kappa); }

double chi_scalar(double rho, double t, double kappa, double c_cut) {
    const double r = std::abs(rho);
    const double edge = c_cut * t;
    return (r <= edge) ? 1.0 : std::exp(-kappa * (r - edge));
}

double psi_scalar(double rho, double t, double kappa, double c_cut) {
    const double edge = c_cut * t;
    const double plus = std::exp(-kappa * std::abs(edge - rho));
    const double minus = std::exp(-kappa * std::abs(-edge - rho));
    return plus + minus;
}

double chi_from_parts(double rho, double c_dot_xi, double t, const WeightParams& w) {
    return std::exp(c_dot_xi) * chi_scalar(rho, t, w.kappa, w.c_cut);
}

double psi_from_parts(double rho, double c_dot_xi, double t, const WeightParams& w) {
    return std::exp(c_dot_xi) * psi_scalar(rho, t, w.kappa, w.c_cut);
}

namespace {
double c_dot(StateView xi, const Vec& c) {
    if (c.empty()) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < xi.size(); ++i) s += c[i] * xi[i];
    return s;
}
}  // namespace

double chi(StateView xi, double t, const WeightParams& w) {
    return chi_from_parts(norm(xi), c_dot(xi, w.frame_velocity), t, w);
}

double psi(StateView xi, double t, const WeightParams& w) {
    return psi_from_parts(norm(xi), c_dot(xi, w.frame_velocity), t, w);
}

double exp_sum(int n, double tau) {
    double term = 1.0, s = 1.0;
    for (int k = 1; k <= n; ++k) {
        term *= tau / k;
        s += term;
    }
    return s;
}

double tail_integral(double rho0, int n) {
    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    return fact * std::exp(-rho0) * exp_sum(n, rho0);
}

double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double default_kappa0(double w_en, double lambda_min) {
    return std::min(std::sqrt(2.0 / w_en), std::sqrt(lambda_min) / 2.0);
}

double default_kappa(double w_en, double lambda_min, int space_dim) {
    return std::min(1.0 / std::sqrt(w_en), std::sqrt(lambda_min) / (4.0 * std::sqrt(double(space_dim))));
}

double default_c_cut(double w_en, double lambda_min, double c_hom) {
    double c = std::min(1.0 / (4.0 * std::sqrt(w_en)), std::sqrt(lambda_min) / 4.0);
    if (c_hom > 0.0) c = std::min(c, c_hom / 2.0);
    return c;
}

}  // namespace gradflow
