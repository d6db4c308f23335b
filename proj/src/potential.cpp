#include "gradflow/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "gradflow/sampling.hpp"

namespace gradflow {

namespace {

constexpr double kEscapeBisectTol = 1e-6;
constexpr int kScanPointsPerUnit = 64;

Vec to_vec(StateView v) { return Vec(v.begin(), v.end()); }

// Minimum of lambda_min over the sphere |u - m| = r (closed-ball scans take
// the minimum over a family of such shells plus the centre).
double shell_lambda_min(const PotentialSpec& p, const Vec& m, double r,
                        const std::vector<Vec>& dirs) {
    Vec u(m.size());
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
        for (std::size_t i = 0; i < m.size(); ++i) u[i] = m[i] + r * d[i];
        lo = std::min(lo, eig_min(p, u));
    }
    return lo;
}

std::vector<Vec> scan_directions(int n, double radius) {
    const std::size_t count =
        (n == 1) ? 2
                 : std::max<std::size_t>(
                       32, static_cast<std::size_t>(kScanPointsPerUnit * 2.0 * std::numbers::pi *
                                                    std::max(radius, 0.25)));
    return sphere_directions(n, count);
}

}  // namespace

double eig_min(const PotentialSpec& p, StateView u) {
    const int n = p.state_dim;
    std::vector<double> h(static_cast<std::size_t>(n) * n);
    p.hess(u, h);
    for (double v : h)
        if (!std::isfinite(v)) throw std::runtime_error("non-finite Hessian entries");
    // Symmetrize; invariants allow 1e-12 relative asymmetry from FD synthesis.
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double s = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = h[j * n + i] = s;
        }
    return smallest_eigenvalue_sym(h, n);
}

MinimumPoint find_minimum(const PotentialSpec& p, const Vec& guess) {
    const int n = p.state_dim;
    Vec u = guess, g(n), step(n);
    std::vector<double> h(static_cast<std::size_t>(n) * n);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        p.grad(u, g);
        if (!all_finite(g)) throw std::runtime_error("non-finite gradient");
        const double gn = norm(g);
        if (gn < 1e-13 * (1.0 + std::abs(p.eval(u)))) {
            converged = true;
            break;
        }
        p.hess(u, h);
        Vec rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -g[i];
        // Levenberg fallback keeps the iteration alive across degenerate
        // Hessians (ring-shaped valleys).
        double tau = 0.0;
        std::vector<double> hreg = h;
        while (!solve_dense(hreg, rhs, step) || !all_finite(step)) {
            tau = (tau == 0.0) ? 1e-8 * (1.0 + std::abs(h[0])) : 10.0 * tau;
            if (tau > 1e12) throw std::runtime_error("no convergence: singular Hessian");
            hreg = h;
            for (int i = 0; i < n; ++i) hreg[static_cast<std::size_t>(i) * n + i] += tau;
        }
        double sn = norm(step);
        const double cap = 0.5 * (1.0 + norm(u));
        if (sn > cap)
            for (auto& s : step) s *= cap / sn;
        for (int i = 0; i < n; ++i) u[i] += step[i];
    }
    if (!converged) throw std::runtime_error("no convergence after max iterations");
    MinimumPoint mp;
    mp.m = u;
    mp.lambda_min = eig_min(p, u);
    mp.v_at_m = p.eval(u);
    if (!(mp.lambda_min > 0.0)) throw std::runtime_error("not a nondegenerate minimum");
    return mp;
}

double escape_distance(const PotentialSpec& p, const MinimumPoint& m) {
    const double target = 0.5 * m.lambda_min;
    auto ball_ok = [&](double delta) {
        if (delta <= 0.0) return true;
        const auto dirs = scan_directions(p.state_dim, delta);
        const int shells = std::max(4, static_cast<int>(std::ceil(kScanPointsPerUnit * delta)));
        for (int k = 1; k <= shells; ++k) {
            const double r = delta * k / shells;
            if (shell_lambda_min(p, m.m, r, dirs) < target) return false;
        }
        return true;
    };
    if (ball_ok(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > kEscapeBisectTol) {
        const double mid = 0.5 * (lo + hi);
        (ball_ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

CoercivityConstants coercivity_scan(const PotentialSpec& p,
                                    const std::vector<MinimumPoint>& minima) {
    if (minima.empty()) throw std::runtime_error("coercivity_scan needs at least one minimum");
    const int n = p.state_dim;
    const double R = p.sampling_radius;
    Vec g(n);
    auto radial_ratio = [&](const Vec& u) {
        p.grad(u, g);
        const double u2 = dot(u, u);
        return dot(u, g) / u2;
    };

    // eps from the outermost shell band, where the coercive growth dominates.
    double eps = std::numeric_limits<double>::infinity();
    const auto dirs = scan_directions(n, R);
    for (int k = 0; k <= 8; ++k) {
        const double r = R * (0.9 + 0.0125 * k);
        Vec u(n);
        for (const auto& d : dirs) {
            for (int i = 0; i < n; ++i) u[i] = r * d[i];
            eps = std::min(eps, radial_ratio(u));
        }
    }
    if (!(eps > 0.0)) throw std::runtime_error("coercivity violated");

    const std::size_t count = (n == 1) ? 4096 : 8192;
    auto samples = halton_ball(n, count, Vec(n, 0.0), R);
    // Axis grid sharpens 1-D scans (Halton alone undersamples near 0).
    if (n == 1)
        for (int k = -256; k <= 256; ++k) samples.push_back({R * k / 256.0});

    double k_coerc = 0.0;
    for (const auto& u : samples) {
        p.grad(u, g);
        k_coerc = std::max(k_coerc, eps * dot(u, u) - dot(u, g));
    }
    k_coerc *= 1.0 + 1e-9;

    // Lower quadratic hull over all minima, with local refinement of the
    // worst sampled ratio.
    double q_hull = std::numeric_limits<double>::infinity();
    for (const auto& mp : minima) {
        auto ratio = [&](const Vec& u) {
            const double d2 = [&] {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += (u[i] - mp.m[i]) * (u[i] - mp.m[i]);
                return s;
            }();
            if (d2 < 1e-16) return std::numeric_limits<double>::infinity();
            return (p.eval(u) - mp.v_at_m) / d2;
        };
        Vec best;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (const auto& u : samples) {
            const double r = ratio(u);
            if (r < best_ratio) {
                best_ratio = r;
                best = u;
            }
        }
        const Vec refined = pattern_search_max(
            [&](const Vec& u) { return -ratio(u); }, best, 0.1 * R, 1e-12);
        q_hull = std::min({q_hull, best_ratio, ratio(refined)});
    }

    CoercivityConstants cc;
    cc.eps_coerc = eps;
    cc.k_coerc = k_coerc;
    cc.q_low_hull = q_hull;
    cc.w_en = 1.0 / std::max(1.0, -4.0 * q_hull);
    return cc;
}

SecondOrderCheck second_order_check(const PotentialSpec& p, const MinimumPoint& m, StateView u,
                                    double tol) {
    const int n = p.state_dim;
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = u[i] - m.m[i];
    const double d2 = dot(d, d);
    if (std::sqrt(d2) > m.escape_distance + 1e-12)
        throw std::domain_error("point outside the escape-distance ball");
    Vec g(n);
    p.grad(u, g);
    const double dv = p.eval(u) - m.v_at_m;
    const double dg = dot(d, g);
    SecondOrderCheck out;
    out.quadratic_lower = dv >= 0.25 * m.lambda_min * d2 - tol;
    out.grad_controls_square = dg >= 0.5 * m.lambda_min * d2 - tol;
    out.grad_controls_potential = dg >= dv - tol;
    return out;
}

double local_coercivity_lambda(const PotentialSpec& p, const MinimumPoint& m, double delta2) {
    const auto dirs = scan_directions(p.state_dim, delta2);
    const int shells = std::max(4, static_cast<int>(std::ceil(kScanPointsPerUnit * delta2)));
    double lo = m.lambda_min;
    for (int k = 1; k <= shells; ++k) {
        const double r = delta2 * k / shells;
        lo = std::min(lo, shell_lambda_min(p, m.m, r, dirs));
    }
    if (!(lo > 0.0)) throw std::runtime_error("delta'' too large");
    return 2.0 * lo;
}

std::function<void(StateView, StateOut)> fd_hessian_from_grad(
    std::function<void(StateView, StateOut)> grad, int n) {
    return [grad = std::move(grad), n](StateView u, StateOut h) {
        Vec up(u.begin(), u.end()), um(u.begin(), u.end());
        Vec gp(n), gm(n);
        const double step = 1e-5 * (1.0 + norm(u));
        for (int j = 0; j < n; ++j) {
            up[j] += step;
            um[j] -= step;
            grad(up, gp);
            grad(um, gm);
            for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i) * n + j] = (gp[i] - gm[i]) / (2.0 * step);
            up[j] = u[j];
            um[j] = u[j];
        }
        // Exact symmetry, matching the PotentialSpec invariant.
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double s = 0.5 * (h[static_cast<std::size_t>(i) * n + j] +
                                        h[static_cast<std::size_t>(j) * n + i]);
                h[static_cast<std::size_t>(i) * n + j] = s;
                h[static_cast<std::size_t>(j) * n + i] = s;
            }
    };
}

PotentialSpec make_potential(const std::string& kind, std::map<std::string, double> params) {
    PotentialSpec p;
    p.kind = kind;
    p.params = params;
    auto param = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (kind == "quadratic") {
        p.state_dim = static_cast<int>(param("n", 1));
        p.eval = [](StateView u) { return 0.5 * dot(u, u); };
        p.grad = [](StateView u, StateOut g) {
            for (std::size_t i = 0; i < u.size(); ++i) g[i] = u[i];
        };
        const int n = p.state_dim;
        p.hess = [n](StateView, StateOut h) {
            std::fill(h.begin(), h.end(), 0.0);
            for (int i = 0; i < n; ++i) h[static_cast<std::size_t>(i) * n + i] = 1.0;
        };
    } else if (kind == "bistable" || kind == "tilted_bistable") {
        const double a = (kind == "bistable") ? 0.0 : param("a", 0.1);
        p.state_dim = 1;
        p.eval = [a](StateView u) {
            const double s = u[0] * u[0] - 1.0;
            return 0.25 * s * s - a * u[0];
        };
        p.grad = [a](StateView u, StateOut g) { g[0] = u[0] * (u[0] * u[0] - 1.0) - a; };
        p.hess = [](StateView u, StateOut h) { h[0] = 3.0 * u[0] * u[0] - 1.0; };
    } else if (kind == "vector_double_well") {
        const double a = param("a", 0.1);
        p.state_dim = 2;
        p.eval = [a](StateView u) {
            const double r2 = dot(u, u);
            return 0.25 * r2 * r2 - 0.5 * r2 + a * u[0];
        };
        p.grad = [a](StateView u, StateOut g) {
            const double r2 = dot(u, u);
            g[0] = (r2 - 1.0) * u[0] + a;
            g[1] = (r2 - 1.0) * u[1];
        };
        p.hess = [](StateView u, StateOut h) {
            const double r2 = dot(u, u);
            h[0] = r2 - 1.0 + 2.0 * u[0] * u[0];
            h[1] = 2.0 * u[0] * u[1];
            h[2] = h[1];
            h[3] = r2 - 1.0 + 2.0 * u[1] * u[1];
        };
    } else {
        throw std::runtime_error("unknown potential kind: " + kind);
    }
    return p;
}

std::vector<Vec> default_minimum_guesses(const PotentialSpec& p) {
    if (p.kind == "quadratic") return {Vec(p.state_dim, 0.1)};
    if (p.kind == "bistable" || p.kind == "tilted_bistable") return {{1.0}, {-1.0}, {0.0}};
    if (p.kind == "vector_double_well") {
        const double a = p.params.count("a") ? p.params.at("a") : 0.1;
        const double side = (a >= 0.0) ? -1.0 : 1.0;
        // Seeds sit off the degenerate |u| = 1 ring of the untilted well.
        return {{side * (1.0 + 0.5 * std::abs(a)), 0.0}, {-side * (1.0 - 0.5 * std::abs(a)), 0.0}};
    }
    return {Vec(p.state_dim, 0.0)};
}

std::vector<MinimumPoint> analyze_minima(PotentialSpec& p, std::ostream* log) {
    std::vector<MinimumPoint> minima;
    for (const auto& guess : default_minimum_guesses(p)) {
        try {
            MinimumPoint mp = find_minimum(p, guess);
            const bool dup = std::any_of(minima.begin(), minima.end(), [&](const MinimumPoint& q) {
                return dist(q.m, mp.m) < 1e-6;
            });
            if (!dup) minima.push_back(std::move(mp));
        } catch (const std::exception& e) {
            if (log) *log << "rejected critical point near guess: " << e.what() << "\n";
        }
    }
    if (minima.empty()) throw std::runtime_error("no nondegenerate minimum found");
    double mmax = 0.0;
    for (const auto& mp : minima) mmax = std::max(mmax, norm(mp.m));
    p.sampling_radius = 4.0 * std::max(1.0, mmax);
    for (auto& mp : minima) mp.escape_distance = escape_distance(p, mp);
    return minima;
}

}  // namespace gradflow
