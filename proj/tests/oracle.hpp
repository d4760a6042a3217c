// oracle.hpp — test-only reference numerics, independent of the library's
// evaluation paths: adaptive Simpson quadrature (1-D and iterated 2-D),
// least-squares regression, and FWHM extraction from sampled curves.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

namespace detail {

inline double simpson_panel(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(const F& f, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson_panel(a, m, fa, flm, fm);
    const double right = simpson_panel(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// adaptive Simpson on [a, b]
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10, int depth = 28) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = detail::simpson_panel(a, b, fa, fm, fb);
    return detail::adapt(f, a, b, fa, fm, fb, whole, tol, depth);
}

// iterated 2-D integral over a rectangle
template <class F>
double integrate2d(const F& f, double ax, double bx, double ay, double by,
                   double tol = 1e-8) {
    auto inner = [&](double x) {
        return integrate([&](double y) { return f(x, y); }, ay, by, tol * 1e-2, 22);
    };
    return integrate(inner, ax, bx, tol, 22);
}

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    Fit f;
    const double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0;
    const double ybar = sy / n;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

// FWHM of a sampled curve via linear interpolation of the half crossings.
inline double fwhm(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t imax = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[imax]) imax = i;
    const double half = 0.5 * y[imax];
    double left = x.front(), right = x.back();
    for (std::size_t i = imax; i-- > 0;)
        if (y[i] <= half) {
            left = x[i] + (half - y[i]) / (y[i + 1] - y[i]) * (x[i + 1] - x[i]);
            break;
        }
    for (std::size_t i = imax + 1; i < y.size(); ++i)
        if (y[i] <= half) {
            right = x[i - 1] + (y[i - 1] - half) / (y[i - 1] - y[i]) * (x[i] - x[i - 1]);
            break;
        }
    return right - left;
}

}  // namespace oracle
