#include "gradflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gradflow {

double dot(StateView a, StateView b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(StateView a) { return std::sqrt(dot(a, a)); }

double dist(StateView a, StateView b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool all_finite(StateView a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

double smallest_eigenvalue_sym(std::span<const double> a, int n) {
    if (n == 1) return a[0];
    if (n == 2) {
        // Closed form, avoids iteration noise in the common scalar-pair case.
        const double tr = a[0] + a[3];
        const double det = a[0] * a[3] - a[1] * a[2];
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        return tr / 2.0 - disc;
    }
    std::vector<double> m(a.begin(), a.end());
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-30) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double lo = at(0, 0);
    for (int i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
    return lo;
}

bool solve_dense(std::vector<double> a, Vec b, Vec& x) {
    const int n = static_cast<int>(b.size());
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
        if (std::abs(at(piv, col)) < 1e-300) return false;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(at(piv, j), at(col, j));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = at(r, col) / at(col, col);
            for (int j = col; j < n; ++j) at(r, j) -= f * at(col, j);
            b[r] -= f * b[col];
        }
    }
    x.assign(b.size(), 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < n; ++j) s -= at(r, j) * x[j];
        x[r] = s / at(r, r);
    }
    return true;
}

}  // namespace gradflow
