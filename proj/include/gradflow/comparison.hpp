#pragma once

#include <functional>

#include "gradflow/energy.hpp"

namespace gradflow {

enum class CutoffProfile { Smoothstep, Linear };

// V_ddag: equals the normalized potential V(m + v) - V(m) for |v| <= r_switch
// and |v|^2/2 beyond r_switch + 1, with a smooth blend between.
class ModifiedPotential {
  public:
    ModifiedPotential(const PotentialSpec& p, const MinimumPoint& m, double r_switch,
                      CutoffProfile profile = CutoffProfile::Smoothstep);

    double value(StateView v) const;
    void grad(StateView v, StateOut g) const;
    // v . grad V_ddag(v), the combination the envelope bounds.
    double radial_term(StateView v) const;
    double r_switch() const { return r_switch_; }

  private:
    PotentialSpec pot_;  // owned copy; evaluators stay valid wherever this moves
    Vec m_;
    double v_at_m_;
    double r_switch_;
    CutoffProfile profile_;

    double cutoff(double s) const;
    double cutoff_deriv(double s) const;
};

// Scalar envelope: max of -v . grad V_ddag(v) over the sphere |v|^2/2 = q.
// Exact two-point evaluation for scalar states; sampled directions plus local
// refinement otherwise.
double n_bar(const ModifiedPotential& vddag, int state_dim, double q, int seeds = 256);

// sup of n_bar over [0, q_hi], dense grid + golden refinement of the same
// pointwise evaluation (so pointwise calls can never exceed it by more than
// the refinement tolerance).
double sup_n_bar(const ModifiedPotential& vddag, int state_dim, double q_hi);

struct SupersolutionParams {
    double lambda = 0.0;  // 2 min lambda_min over the delta''-ball
    double delta = 0.0;
    double delta_prime = 0.0;
    double delta_second = 0.0;
    double q_max = 0.0;
    double r_coerc = 0.0;
    double r_esc_init = 0.0;
    double c = 0.0;  // plateau-front speed, >= c_noesc for a certificate

    double gamma_prime() const { return 0.5 * delta_prime * delta_prime; }
    double gamma_second() const { return 0.5 * delta_second * delta_second; }
    double ramp_length() const { return q_max / (gamma_second() - gamma_prime()); }
};

// Envelope profile: plateau, linear ramp, exponential tail.
double eta0(double rho, const SupersolutionParams& sp);
double eta(double r, double t, const SupersolutionParams& sp);
double eta_bar(double r, double t, const SupersolutionParams& sp);

double c_noesc(const SupersolutionParams& sp, double sup_nbar_value);

// Everything derived from one choice of the state-space bound r_bound
// (the trajectory sup-norm bound, or the attracting radius for the uniform
// variant).
struct ComparisonSetup {
    ModifiedPotential vddag;
    SupersolutionParams params;
    double sup_nbar = 0.0;
    double c_noesc_value = 0.0;
    double lambda_from_ball = 0.0;
};

ComparisonSetup build_comparison(const PotentialSpec& p, const MinimumPoint& m, double r_bound,
                                 int state_dim, CutoffProfile profile = CutoffProfile::Smoothstep);

// Max over an (r, t) sample grid (kink cells excluded) of
//   N_bar(eta + gamma' e^{-lambda t}) + eta_rr - ( -c eta_r - lambda gamma' e^{-lambda t} ).
// Nonpositive when c >= c_noesc.
double supersolution_residual(const ModifiedPotential& vddag, int state_dim,
                              const SupersolutionParams& sp, int nr = 200, int nt = 200,
                              double t_span = 10.0);

// Smallest radius beyond which |u0 - m|^2/2 <= gamma' on the initial state;
// throws std::runtime_error("r_esc_init too small") when no radius works.
double choose_r_esc_init(const FieldState& initial, const MinimumPoint& m, double gamma_prime);

// max over grid of q_dag - eta_bar at the snapshot time.
double sandwich_excess(const FieldState& s, const MinimumPoint& m, const SupersolutionParams& sp);

// Spot check of the subsolution inequality q_t <= N_bar(q) + Lap q at interior
// samples; returns the worst residual.
double subsolution_residual(const FieldState& s, const MinimumPoint& m, const Stepper& stepper,
                            const ModifiedPotential& vddag, int sample_stride = 7);

}  // namespace gradflow
