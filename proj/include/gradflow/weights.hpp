#pragma once

#include <span>
#include <string>
#include <vector>

#include "gradflow/linalg.hpp"

namespace gradflow {

// Parameters of the exponential weight families used by the localized energy
// and firewall functionals. `kappa` is the decay rate, `c_cut` the speed of
// the cutoff radius, `frame_velocity` the frame velocity (aligned with the
// first space axis on radial grids), `centre` the translate for psi0.
struct WeightParams {
    double kappa = 1.0;
    double c_cut = 0.0;
    Vec frame_velocity;  // size = space dim; empty means zero
    Vec centre;          // size = space dim; empty means origin

    double frame_speed() const;
};

// Constraints the decay/cutoff rates must satisfy so the firewall decay
// inequalities hold; checked against lambda_min(m) and the energy weight.
bool kappa_ccut_conditions_hold(double w_en, double kappa, double c_cut, int space_dim,
                                double lambda_min, std::string* why = nullptr);
// Constraints on the frame speed for almost-standing frames.
bool frame_speed_conditions_hold(double speed, double kappa, double c_cut, double lambda_min,
                                 std::string* why = nullptr);

// psi0(x) = exp(-kappa0 |x - centre|).
double psi0(StateView x, StateView centre, double kappa0);
// Translate taken from w.centre, rate from w.kappa.
double psi0(StateView x, const WeightParams& w);

// Scalar cores: value as a function of rho = |xi| at time t.
double chi_scalar(double rho, double t, double kappa, double c_cut);
double psi_scalar(double rho, double t, double kappa, double c_cut);

// Full weights evaluated from the radial/axial decomposition of xi, where
// `c_dot_xi` is the scalar product of the frame velocity with xi.
double chi_from_parts(double rho, double c_dot_xi, double t, const WeightParams& w);
double psi_from_parts(double rho, double c_dot_xi, double t, const WeightParams& w);

// Vector-argument versions (xi in R^d).
double chi(StateView xi, double t, const WeightParams& w);
double psi(StateView xi, double t, const WeightParams& w);

// Exponential sum e_n(tau) = sum_{k<=n} tau^k / k!.
double exp_sum(int n, double tau);

// Closed form of the tail integral of rho^n e^{-rho} over [rho0, infinity).
double tail_integral(double rho0, int n);

// Surface area of the unit sphere in R^d.
double sphere_area(int d);

// Suggested decay rates derived from the potential constants. `c_hom` may be
// zero or negative to mean "unknown" (the corresponding bound is dropped).
double default_kappa0(double w_en, double lambda_min);
double default_kappa(double w_en, double lambda_min, int space_dim);
double default_c_cut(double w_en, double lambda_min, double c_hom);

}  // namespace gradflow
