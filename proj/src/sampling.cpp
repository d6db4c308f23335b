#include "gradflow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gradflow {
namespace {

double halton(std::size_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    std::size_t i = index + 1;  // skip the origin
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13};

}  // namespace

std::vector<Vec> halton_ball(int dim, std::size_t count, const Vec& centre, double radius) {
    std::vector<Vec> pts;
    pts.reserve(count);
    if (dim == 1) {
        for (std::size_t k = 0; k < count; ++k) {
            const double u = halton(k, 2);
            pts.push_back({centre[0] + radius * (2.0 * u - 1.0)});
        }
        return pts;
    }
    if (dim == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double r = radius * std::sqrt(halton(k, 2));
            const double a = 2.0 * std::numbers::pi * halton(k, 3);
            pts.push_back({centre[0] + r * std::cos(a), centre[1] + r * std::sin(a)});
        }
        return pts;
    }
    if (dim == 3) {
        for (std::size_t k = 0; k < count; ++k) {
            const double r = radius * std::cbrt(halton(k, 2));
            const double ct = 2.0 * halton(k, 3) - 1.0;
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double a = 2.0 * std::numbers::pi * halton(k, 5);
            pts.push_back({centre[0] + r * st * std::cos(a), centre[1] + r * st * std::sin(a),
                           centre[2] + r * ct});
        }
        return pts;
    }
    std::size_t k = 0;
    while (pts.size() < count) {
        Vec p(dim);
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            p[i] = 2.0 * halton(k, kPrimes[i % 6]) - 1.0;
            s += p[i] * p[i];
        }
        ++k;
        if (s > 1.0) continue;
        for (int i = 0; i < dim; ++i) p[i] = centre[i] + radius * p[i];
        pts.push_back(std::move(p));
    }
    return pts;
}

std::vector<Vec> sphere_directions(int dim, std::size_t count) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
        return dirs;
    }
    dirs.reserve(count);
    if (dim == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / count;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
        return dirs;
    }
    // Fibonacci lattice on S^2; higher dims take the first three coordinates
    // padded with zeros, which is enough for the scan seeds used here.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < count; ++k) {
        const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * static_cast<double>(k);
        Vec d(dim, 0.0);
        d[0] = r * std::cos(a);
        d[1] = r * std::sin(a);
        d[2] = z;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

Vec pattern_search_max(const std::function<double(const Vec&)>& f, Vec x, double step,
                       double step_tol, int max_iter) {
    const int n = static_cast<int>(x.size());
    double fx = f(x);
    for (int it = 0; it < max_iter && step > step_tol; ++it) {
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            for (double sgn : {1.0, -1.0}) {
                Vec y = x;
                y[i] += sgn * step;
                const double fy = f(y);
                if (fy > fx) {
                    x = std::move(y);
                    fx = fy;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}

double golden_max(const std::function<double(double)>& f, double a, double b, double xtol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

LinearFit linear_fit(const std::vector<double>& t, const std::vector<double>& y, std::size_t i0,
                     std::size_t i1) {
    LinearFit out;
    const std::size_t n = (i1 > i0) ? i1 - i0 : 0;
    out.count = n;
    if (n < 2) return out;
    double st = 0.0, sy = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        st += t[i];
        sy += y[i];
    }
    const double tm = st / n, ym = sy / n;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    if (stt <= 0.0) return out;
    out.slope = sty / stt;
    out.intercept = ym - out.slope * tm;
    double ss_res = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        const double r = y[i] - (out.intercept + out.slope * t[i]);
        ss_res += r * r;
    }
    if (n > 2) out.slope_stderr = std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / stt);
    return out;
}

}  // namespace gradflow
