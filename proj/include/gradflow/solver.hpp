#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gradflow/field.hpp"
#include "gradflow/potential.hpp"

namespace gradflow {

enum class Scheme { ExplicitEuler, RK4 };

struct SolverConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::RK4;
    double t_end = 1.0;
    int snapshot_stride = 100;
};

// Largest dt the explicit schemes accept on this grid (diffusive CFL bound
// with a 0.9 safety factor).
double cfl_limit(const Grid& g);

struct BlowupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Time stepper for u_t = -grad V(u) + Lap u with Dirichlet clamp to
// `far_field` on the outer boundary. Owns its work buffers; one instance per
// simulation.
class Stepper {
  public:
    Stepper(const PotentialSpec& p, Vec far_field, SolverConfig cfg);

    // Advances the state by one dt. Throws BlowupError on non-finite values
    // (unreachable for coercive potentials with a compliant dt).
    void step(FieldState& s) const;

    // Right-hand side -grad V(u) + Lap u (zero on clamped boundary rows).
    void rhs(const FieldState& s, std::vector<double>& out) const;

    const SolverConfig& config() const { return cfg_; }

  private:
    const PotentialSpec* pot_;
    Vec far_field_;
    SolverConfig cfg_;
    mutable std::vector<double> k1_, k2_, k3_, k4_;
    mutable FieldState tmp_;

    void clamp(FieldState& s) const;
};

// Closed-form scalar comparison bound qbar' = -2 eps qbar + K with
// qbar(0) = sup_x |u(x,0)|^2 / 2.
struct QBarTrace {
    double q0 = 0.0;
    double eps = 1.0;
    double k = 0.0;

    double at(double t) const;
    double limit() const { return 0.5 * k / eps; }
    // Attracting L-infinity radius sqrt(K/eps + 1).
    double attracting_radius() const;
    // Upper bound on sup_t sup_x |u| implied by the trace.
    double sup_state_bound() const;
};

QBarTrace qbar_bound(const FieldState& initial, const CoercivityConstants& cc);

struct MaxPrincipleReport {
    double worst_excess = 0.0;  // max over grid of |u|^2/2 - qbar(t)
    bool violated = false;
};

MaxPrincipleReport max_principle_monitor(const FieldState& s, const QBarTrace& trace,
                                         double tolerance = 1e-8);

// sup over the grid of |u(x)|^2/2.
double sup_q(const FieldState& s);

}  // namespace gradflow
