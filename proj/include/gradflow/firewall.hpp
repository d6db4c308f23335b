#pragma once

#include <cstdint>

#include "gradflow/energy.hpp"

namespace gradflow {

// Decay rates and pollution constants of the two firewall functionals.
struct FirewallConstants {
    double kappa0 = 0.0;
    double nu_f0 = 0.0;
    double k_f0 = 0.0;
    double kappa = 0.0;
    double c_cut = 0.0;
    double nu_f = 0.0;
    double k_ef = 0.0;
    double r_max_infty = 0.0;
    double lambda_min = 0.0;
    double w_en = 1.0;

    bool inequalities_hold(int space_dim, std::string* why = nullptr) const;
};

// Computes every firewall constant from the potential data. `r_max_infty`
// bounds the trajectory's sup-norm (pollution maximization runs over that
// ball); `c_hom` <= 0 means unknown.
FirewallConstants firewall_constants(const PotentialSpec& p, const MinimumPoint& m,
                                     const CoercivityConstants& cc, double r_max_infty,
                                     int space_dim, double c_hom = 0.0);

// F0(xbar, t): integral of exp(-kappa0 |x - xbar|) (E_dag + q_dag) dx.
double firewall0(const FieldState& s, const PointFields& f, const Vec& xbar, double kappa0);

// Two-sided coercivity data for F0 at one probe.
struct Firewall0Coercivity {
    double lhs = 0.0;  // F0
    double rhs = 0.0;  // min(w_en/2, 1/4) * integral psi0 (|grad u|^2 + |u - m|^2)
};

// Radial-grid evaluator with precomputed psi0 kernel rows, one per probe
// radius (probes sit on a ray through the origin).
class Firewall0Evaluator {
  public:
    Firewall0Evaluator(const Grid& g, std::vector<double> probe_radii, double kappa0);

    std::size_t num_probes() const { return probes_.size(); }
    double probe_radius(std::size_t i) const { return probes_[i]; }

    double value(const PointFields& f, std::size_t probe) const;
    // integral of T psi0 over the escape set described by a per-point mask.
    double pollution(const std::vector<std::uint8_t>& mask, std::size_t probe) const;
    Firewall0Coercivity coercivity(const PointFields& f, double w_en, std::size_t probe) const;

  private:
    std::vector<double> probes_;
    std::vector<std::vector<double>> kernel_;  // one row per probe
};

// Geometric probe panel {0} + log-spaced radii up to 0.8 * domain radius.
std::vector<double> default_probe_panel(const Grid& g, int count = 16);

// F(t) = integral of psi(xi,t) [ w_en E_dag + q_dag ] dxi; throws
// std::domain_error when the weight/frame conditions fail.
double firewall_traveling(const FieldState& s, const PointFields& f, const WeightParams& w,
                          double w_en, double lambda_min);

// max over interior samples of dF/dt + nu F - k * pollution (the linear
// decrease inequality, nonpositive up to tolerance when it holds).
double max_decay_residual(const FunctionalSeries& fw, const FunctionalSeries& pollution,
                          double nu, double k);

struct ExponentialFit {
    double rate = 0.0;       // fitted decay rate of sup F0 beyond c2 t
    double prefactor = 0.0;  // exp(intercept)
    double predicted_rate = 0.0;  // min(nu_f0, kappa0 (c2 - c1) / 2)
    bool identically_zero = false;
};

// Least-squares fit of log sup_{|x| >= c2 t} F0 over the tail window; throws
// std::runtime_error("hypothesis violated") when the escape set leaves
// B(c1 t) on the window.
ExponentialFit firewall_exponential_fit(const FunctionalSeries& sup_firewall,
                                        const FunctionalSeries& r_esc_outer, double c1, double c2,
                                        const FirewallConstants& fc, double tail_frac = 0.5);

}  // namespace gradflow
