#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "bihar/errors.hpp"

namespace bihar {

struct RootResult {
    double root;
    int iterations;
};

/// Bisection on a sign-change bracket [a, b], run until the bracket
/// collapses to neighbouring doubles (or max_iter). The endpoint values fa,
/// fb must have opposite signs (zero counts as either sign).
template <class F>
RootResult bisect(F&& f, double a, double b, double fa, double fb, int max_iter = 400)
{
    if (fa == 0.0) return {a, 0};
    if (fb == 0.0) return {b, 0};
    if ((fa > 0) == (fb > 0))
        throw BracketNotFound("bisect: endpoints do not bracket a sign change");
    int it = 0;
    for (; it < max_iter; ++it) {
        const double mid = a + 0.5 * (b - a);
        if (mid <= std::min(a, b) || mid >= std::max(a, b)) break;
        const double fm = f(mid);
        if (fm == 0.0) return {mid, it + 1};
        if ((fm > 0) == (fa > 0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
            fb = fm;
        }
    }
    return {std::abs(fa) <= std::abs(fb) ? a : b, it};
}

/// Bisection followed by a Newton polish that is only accepted while it
/// stays inside the original bracket and reduces |f|.
template <class F, class DF>
RootResult bisect_newton(F&& f, DF&& df, double a, double b, double fa, double fb,
                         int max_iter = 400)
{
    const double lo = std::min(a, b), hi = std::max(a, b);
    RootResult r = bisect(f, a, b, fa, fb, max_iter);
    double x = r.root, fx = f(x);
    for (int k = 0; k < 3 && fx != 0.0; ++k) {
        const double d = df(x);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double xn = x - fx / d;
        if (!(xn >= lo && xn <= hi)) break;
        const double fn = f(xn);
        if (!(std::abs(fn) < std::abs(fx))) break;
        x = xn;
        fx = fn;
        ++r.iterations;
    }
    r.root = x;
    return r;
}

}  // namespace bihar
