#include "gradflow/solver.hpp"

#include <algorithm>
#include <cmath>

namespace gradflow {

double cfl_limit(const Grid& g) {
    const double h = g.spacing();
    return 0.9 * h * h / (2.0 * g.space_dim);
}

Stepper::Stepper(const PotentialSpec& p, Vec far_field, SolverConfig cfg)
    : pot_(&p), far_field_(std::move(far_field)), cfg_(cfg) {}

void Stepper::clamp(FieldState& s) const {
    const int n = s.n;
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        if (!s.grid.is_boundary(p)) continue;
        for (int j = 0; j < n; ++j) s.values[p * n + j] = far_field_[j];
    }
}

void Stepper::rhs(const FieldState& s, std::vector<double>& out) const {
    out = laplacian(s);
    const int n = s.n;
    Vec g(n);
    for (std::size_t p = 0; p < s.num_points(); ++p) {
        if (s.grid.is_boundary(p)) {
            for (int j = 0; j < n; ++j) out[p * n + j] = 0.0;
            continue;
        }
        pot_->grad(s.point(p), g);
        for (int j = 0; j < n; ++j) out[p * n + j] -= g[j];
    }
}

void Stepper::step(FieldState& s) const {
    const double dt = cfg_.dt;
    const std::size_t m = s.values.size();
    if (cfg_.scheme == Scheme::ExplicitEuler) {
        rhs(s, k1_);
        for (std::size_t i = 0; i < m; ++i) s.values[i] += dt * k1_[i];
    } else {
        if (tmp_.values.size() != m) tmp_ = s;
        rhs(s, k1_);
        tmp_.grid = s.grid;
        tmp_.n = s.n;
        for (std::size_t i = 0; i < m; ++i) tmp_.values[i] = s.values[i] + 0.5 * dt * k1_[i];
        rhs(tmp_, k2_);
        for (std::size_t i = 0; i < m; ++i) tmp_.values[i] = s.values[i] + 0.5 * dt * k2_[i];
        rhs(tmp_, k3_);
        for (std::size_t i = 0; i < m; ++i) tmp_.values[i] = s.values[i] + dt * k3_[i];
        rhs(tmp_, k4_);
        for (std::size_t i = 0; i < m; ++i)
            s.values[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
    clamp(s);
    s.time += dt;
    for (std::size_t i = 0; i < m; ++i)
        if (!std::isfinite(s.values[i]))
            throw BlowupError("blow-up detected at t = " + std::to_string(s.time));
}

double QBarTrace::at(double t) const {
    const double qinf = limit();
    return qinf + (q0 - qinf) * std::exp(-2.0 * eps * t);
}

double QBarTrace::attracting_radius() const { return std::sqrt(k / eps + 1.0); }

double QBarTrace::sup_state_bound() const { return std::sqrt(2.0 * std::max(q0, limit())); }

double sup_q(const FieldState& s) {
    double best = 0.0;
    for (std::size_t p = 0; p < s.num_points(); ++p)
        best = std::max(best, 0.5 * dot(s.point(p), s.point(p)));
    return best;
}

QBarTrace qbar_bound(const FieldState& initial, const CoercivityConstants& cc) {
    QBarTrace t;
    t.q0 = sup_q(initial);
    t.eps = cc.eps_coerc;
    t.k = cc.k_coerc;
    return t;
}

MaxPrincipleReport max_principle_monitor(const FieldState& s, const QBarTrace& trace,
                                         double tolerance) {
    MaxPrincipleReport rep;
    rep.worst_excess = sup_q(s) - trace.at(s.time);
    rep.violated = rep.worst_excess > tolerance;
    return rep;
}

}  // namespace gradflow
