#pragma once

#include <cmath>
#include <concepts>

#include "error.hpp"

namespace filcol {

struct Root {
    double x;
    double residual;
    int bisections;
};

/// Bisection on a sign-changing bracket down to `width`, then up to
/// `polish_steps` Newton steps that are only accepted while they stay inside
/// the final bracket and do not increase |f|.
template <std::invocable<double> F, std::invocable<double> DF>
Root bisect_newton(F&& f, DF&& df, double lo, double hi, double width = 1e-13,
                   int polish_steps = 3) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return {lo, 0.0, 0};
    if (fhi == 0.0)
        return {hi, 0.0, 0};
    if (std::signbit(flo) == std::signbit(fhi))
        throw Error(ErrorCode::NumericalFailure, "root is not bracketed");

    int n = 0;
    while (hi - lo > width * std::max(1.0, std::abs(lo)) && n < 400) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double fm = f(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            flo = fhi = 0.0;
            break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        ++n;
    }

    double x = std::abs(flo) < std::abs(fhi) ? lo : hi;
    double fx = f(x);
    const double blo = lo - width;
    const double bhi = hi + width;
    for (int i = 0; i < polish_steps && fx != 0.0; ++i) {
        const double slope = df(x);
        if (slope == 0.0 || !std::isfinite(slope))
            break;
        const double next = x - fx / slope;
        if (!(next >= blo && next <= bhi))
            break;
        const double fn = f(next);
        if (!(std::abs(fn) <= std::abs(fx)))
            break;
        x = next;
        fx = fn;
    }
    return {x, std::abs(fx), n};
}

} // namespace filcol
