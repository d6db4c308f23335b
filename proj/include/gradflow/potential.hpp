#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gradflow/linalg.hpp"

namespace gradflow {

// A potential V : R^n -> R with gradient and (symmetric) Hessian evaluation.
// Evaluations must be pure; all scans treat the callbacks as reentrant.
struct PotentialSpec {
    int state_dim = 1;
    double sampling_radius = 4.0;  // radius of the region global scans cover
    std::function<double(StateView)> eval;
    std::function<void(StateView, StateOut)> grad;
    std::function<void(StateView, StateOut)> hess;  // row-major state_dim^2
    std::string kind;
    std::map<std::string, double> params;
};

struct MinimumPoint {
    Vec m;
    double lambda_min = 0.0;
    double escape_distance = 0.0;  // in (0,1]; 0 until computed
    double v_at_m = 0.0;
};

struct CoercivityConstants {
    double eps_coerc = 0.0;
    double k_coerc = 0.0;
    double q_low_hull = 0.0;
    double w_en = 1.0;
};

struct SecondOrderCheck {
    bool quadratic_lower = false;       // V(u)-V(m) >= lambda_min/4 |u-m|^2
    bool grad_controls_square = false;  // (u-m).grad V(u) >= lambda_min/2 |u-m|^2
    bool grad_controls_potential = false;  // (u-m).grad V(u) >= V(u)-V(m)
};

// Smallest Hessian eigenvalue at u.
double eig_min(const PotentialSpec& p, StateView u);

// Newton-refines `guess` to a critical point; throws std::runtime_error with
// message "not a nondegenerate minimum" when the converged point fails the
// positive-definiteness test, or "no convergence" after the iteration cap.
MinimumPoint find_minimum(const PotentialSpec& p, const Vec& guess);

// Largest delta in (0,1] such that lambda_min stays >= lambda_min(m)/2 on the
// closed delta-ball, located by bisection over deterministic shell samples.
double escape_distance(const PotentialSpec& p, const MinimumPoint& m);

// Fits (eps, K) of the coercivity inequality and evaluates the lower
// quadratic hull constants over the sampling region. Throws
// "coercivity violated" when no positive eps works on the samples.
CoercivityConstants coercivity_scan(const PotentialSpec& p,
                                    const std::vector<MinimumPoint>& minima);

// The three second-order estimates near a minimum (normalized by V(m)).
SecondOrderCheck second_order_check(const PotentialSpec& p, const MinimumPoint& m, StateView u,
                                    double tol = 1e-10);

// lambda = 2 min over the closed delta2-ball of lambda_min; throws
// "delta'' too large" when the sampled minimum is nonpositive.
double local_coercivity_lambda(const PotentialSpec& p, const MinimumPoint& m, double delta2);

// Factory for the built-in potentials:
//   quadratic            : |u|^2 / 2                       (any state_dim via "n")
//   bistable             : (u^2-1)^2 / 4                   (n = 1)
//   tilted_bistable      : (u^2-1)^2 / 4 - a u             (n = 1, param "a")
//   vector_double_well   : |u|^4/4 - |u|^2/2 + a u1        (n = 2, param "a")
PotentialSpec make_potential(const std::string& kind, std::map<std::string, double> params);

// Starting guesses for the built-in kinds (one per expected minimum).
std::vector<Vec> default_minimum_guesses(const PotentialSpec& p);

// Refines every guess, keeps nondegenerate minima, logs rejected critical
// points (saddles/maxima) to `log` when provided, and fills escape distances.
// Also widens p.sampling_radius to 4 * max(1, max |m|).
std::vector<MinimumPoint> analyze_minima(PotentialSpec& p, std::ostream* log = nullptr);

// Wraps grad with central finite differences when no analytic Hessian exists;
// step h = 1e-5 (1 + |u|).
std::function<void(StateView, StateOut)> fd_hessian_from_grad(
    std::function<void(StateView, StateOut)> grad, int n);

}  // namespace gradflow
