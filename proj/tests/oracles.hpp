#pragma once

// Independent reference computations for the unit and acceptance tests.

#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

/// Root of an increasing function on [lo, hi] by plain bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Reference material c1 and its caloric integrals, written out by hand.
inline double c1_ref(double r) { return r <= 0.0 ? 0.0 : (r <= 1.0 ? r : r * r); }
inline double e1_ref(double t) {
    if (t <= 0.0) return 0.0;
    if (t <= 1.0) return 0.5 * t * t;
    return 0.5 + (t * t * t - 1.0) / 3.0;
}
inline double s1_ref(double t) {
    if (t <= 0.0) return 0.0;
    if (t <= 1.0) return t;
    return 1.0 + 0.5 * (t * t - 1.0);
}
inline double f1_ref(double t) { return e1_ref(t) - t * s1_ref(t); }

/// Relative difference with an absolute floor.
inline double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace oracle
