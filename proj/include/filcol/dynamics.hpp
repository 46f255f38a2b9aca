#pragma once

// Coaxial circular filament pair under localized induction: full (R, z)
// system, the d = 0 reduced Hamiltonian system in (theta, W), and the
// hyperbolic reduction for d != 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <variant>

#include "error.hpp"
#include "types.hpp"

namespace filcol {

inline FullRates rhs_full(const FullState& s, const Params& p) {
    const double sep2 = s.separation_sq();
    if (!(sep2 > 0.0))
        throw Error(ErrorCode::SeparationZero, "filaments overlap");
    const double a = p.alpha();
    const double g = p.gamma();
    const double w = s.z1 - s.z2;
    const double dr = s.r1 - s.r2;
    const double inv3 = 1.0 / (sep2 * std::sqrt(sep2));
    return {
        -a * s.r2 * w * inv3,
        -g / s.r1 + a * s.r2 * dr * inv3,
        -a * g * s.r1 * w * inv3,
        1.0 / s.r2 + a * g * s.r1 * dr * inv3,
    };
}

inline double conserved_d(const FullState& s, const Params& p) {
    return p.gamma() * s.r1 * s.r1 - s.r2 * s.r2;
}

/// Scale-relative threshold below which d is treated as zero.
inline double default_tol_d(const FullState& s, const Params& p) {
    return 1e-9 * std::max(1.0, p.gamma() * s.r1 * s.r1);
}

using Reduction = std::variant<ReducedState, HyperbolicState>;

inline std::pair<double, double> radii(const HyperbolicState& hs, const Params& p) {
    const double g = p.gamma();
    const double ad = std::abs(hs.d);
    const double c = std::cosh(hs.theta);
    const double sh = std::sinh(hs.theta);
    if (hs.d > 0.0)
        return {std::sqrt(ad / g) * c, std::sqrt(ad) * sh};
    return {std::sqrt(ad / g) * sh, std::sqrt(ad) * c};
}

inline std::pair<double, double> radii(const ReducedState& rs, const Params& p) {
    const double r1 = std::exp(rs.theta);
    return {r1, p.sqrt_gamma() * r1};
}

inline Reduction reduce(const FullState& s, const Params& p,
                        std::optional<double> tol_d = std::nullopt) {
    if (!s.valid())
        throw Error(ErrorCode::InvalidInitialState, "full state violates r > 0 / non-overlap");
    const double tol = tol_d.value_or(default_tol_d(s, p));
    if (!(tol > 0.0))
        throw Error(ErrorCode::DomainError, "tol_d must be positive");
    const double d = conserved_d(s, p);
    const double w = s.z1 - s.z2;
    if (std::abs(d) <= tol)
        return ReducedState{std::log(s.r1), w};

    // tanh(theta) is a ratio of the radii on either branch, which keeps the
    // inversion scale free.
    const double sg = p.sqrt_gamma();
    const double ratio = d > 0.0 ? s.r2 / (sg * s.r1) : sg * s.r1 / s.r2;
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(ErrorCode::InversionFailure, "radii are not on the hyperbola branch");
    HyperbolicState hs{std::atanh(ratio), w, d};
    const auto [r1, r2] = radii(hs, p);
    const double scale = std::max(s.r1, s.r2);
    if (std::abs(r1 - s.r1) > 1e-9 * scale || std::abs(r2 - s.r2) > 1e-9 * scale)
        throw Error(ErrorCode::InversionFailure, "hyperbolic parametrization does not reproduce radii");
    return hs;
}

inline ReducedRates rhs_reduced(const ReducedState& rs, const Params& p) {
    const double a = p.alpha();
    if (p.equal_circulation()) {
        if (rs.w == 0.0)
            throw Error(ErrorCode::OnSingularLine, "W = 0 is outside the gamma = 1 phase space");
        const double aw = std::abs(rs.w);
        return {-a * rs.w / (aw * aw * aw), -2.0 * std::exp(-rs.theta)};
    }
    const double sg = p.sqrt_gamma();
    const double m = p.mismatch();
    const double e2 = std::exp(2.0 * rs.theta);
    const double dsq = m * m * e2 + rs.w * rs.w;
    const double inv3 = 1.0 / (dsq * std::sqrt(dsq));
    return {
        -a * sg * rs.w * inv3,
        -p.self_coeff() * std::exp(-rs.theta) + a * sg * m * m * e2 * inv3,
    };
}

inline double hamiltonian(const ReducedState& rs, const Params& p) {
    const double a = p.alpha();
    if (p.equal_circulation()) {
        if (rs.w == 0.0)
            throw Error(ErrorCode::Divergent, "Hamiltonian diverges at W = 0 for gamma = 1");
        return -2.0 * std::exp(-rs.theta) + a / std::abs(rs.w);
    }
    const double m = p.mismatch();
    const double dsq = m * m * std::exp(2.0 * rs.theta) + rs.w * rs.w;
    return -p.self_coeff() * std::exp(-rs.theta) + a * p.sqrt_gamma() / std::sqrt(dsq);
}

/// Sum of the magnitudes of the two Hamiltonian terms; the natural scale for
/// round-off in H.
inline double hamiltonian_scale(const ReducedState& rs, const Params& p) {
    const double self = p.self_coeff() * std::exp(-rs.theta);
    if (p.equal_circulation())
        return self + p.alpha() / std::abs(rs.w);
    const double m = p.mismatch();
    const double dsq = m * m * std::exp(2.0 * rs.theta) + rs.w * rs.w;
    return self + p.alpha() * p.sqrt_gamma() / std::sqrt(dsq);
}

namespace detail {

struct LevelSetTerms {
    double shifted;  // h0 + (gamma + gamma^{-1/2}) e^{-theta}
    double bracket;  // alpha^2 gamma - (sqrt(gamma)-1)^2 e^{2 theta} shifted^2
};

inline LevelSetTerms level_set_terms(double theta, const Params& p, double h0) {
    const double m = p.mismatch();
    const double shifted = h0 + p.self_coeff() * std::exp(-theta);
    const double a2g = p.alpha() * p.alpha() * p.gamma();
    const double bracket = a2g - m * m * std::exp(2.0 * theta) * shifted * shifted;
    if (!(shifted > 0.0))
        throw Error(ErrorCode::OffLevelSet, "h0 + (gamma + gamma^{-1/2}) e^{-theta} must be positive");
    if (bracket < -1e-12 * a2g)
        throw Error(ErrorCode::OffLevelSet, "theta lies outside the level set of h0");
    return {shifted, std::max(bracket, 0.0)};
}

} // namespace detail

/// Reduced vector field written on the level set H = h0, W > 0 branch.
inline ReducedRates rhs_reduced_alt(double theta, const Params& p, double h0) {
    const auto t = detail::level_set_terms(theta, p, h0);
    const double a2g = p.alpha() * p.alpha() * p.gamma();
    const double m = p.mismatch();
    return {
        -t.shifted * t.shifted * std::sqrt(t.bracket) / a2g,
        -p.self_coeff() * std::exp(-theta) +
            m * m / a2g * t.shifted * t.shifted * t.shifted * std::exp(2.0 * theta),
    };
}

/// Nonnegative W on the level set H(theta, W) = h0.
inline double w_from_theta(double theta, const Params& p, double h0) {
    const auto t = detail::level_set_terms(theta, p, h0);
    // W^2 = bracket / shifted^2; dividing after the subtraction keeps the
    // boundary W = 0 exact.
    return std::sqrt(t.bracket) / t.shifted;
}

// --- d != 0 -----------------------------------------------------------------

/// Inter-filament distance sqrt((R1-R2)^2 + W^2) in hyperbolic coordinates.
inline double hyperbolic_separation(const HyperbolicState& hs, const Params& p) {
    const auto [r1, r2] = radii(hs, p);
    return std::hypot(r1 - r2, hs.w);
}

inline ReducedRates rhs_hyperbolic(const HyperbolicState& hs, const Params& p) {
    if (hs.d == 0.0)
        throw Error(ErrorCode::DomainError, "hyperbolic coordinates need d != 0");
    if (!(hs.theta > 0.0))
        throw Error(ErrorCode::DomainError, "hyperbolic angle must be positive");
    const double a = p.alpha();
    const double g = p.gamma();
    const double sg = p.sqrt_gamma();
    const double ad = std::abs(hs.d);
    const double c = std::cosh(hs.theta);
    const double sh = std::sinh(hs.theta);
    const double mix = hs.d > 0.0 ? c - sg * sh : sh - sg * c;
    const double dsq = ad / g * mix * mix + hs.w * hs.w;
    if (!(dsq > 0.0))
        throw Error(ErrorCode::SeparationZero, "filaments overlap");
    const double inv3 = 1.0 / (dsq * std::sqrt(dsq));
    const double g32 = g * sg;
    const double self = hs.d > 0.0 ? g32 / c + 1.0 / sh : g32 / sh + 1.0 / c;
    return {
        -a * sg * hs.w * inv3,
        -self / std::sqrt(ad) + a * ad * (sh - sg * c) * (c - sg * sh) / sg * inv3,
    };
}

inline double hamiltonian_hyperbolic(const HyperbolicState& hs, const Params& p) {
    if (hs.d == 0.0)
        throw Error(ErrorCode::DomainError, "hyperbolic coordinates need d != 0");
    if (!(hs.theta > 0.0))
        throw Error(ErrorCode::DomainError, "log(tanh(theta/2)) needs theta > 0");
    const double g = p.gamma();
    const double sg = p.sqrt_gamma();
    const double ad = std::abs(hs.d);
    const double th = std::tanh(0.5 * hs.theta);
    const double gd = 2.0 * std::atan(th);
    const double lt = std::log(th);
    const double self = hs.d > 0.0 ? g * sg * gd + lt : g * sg * lt + gd;
    const double sep = hyperbolic_separation(hs, p);
    if (!(sep > 0.0))
        throw Error(ErrorCode::Divergent, "Hamiltonian diverges at the collision point");
    return self / std::sqrt(ad) + p.alpha() * sg / sep;
}

inline double hamiltonian_hyperbolic_scale(const HyperbolicState& hs, const Params& p) {
    const double g = p.gamma();
    const double sg = p.sqrt_gamma();
    const double th = std::tanh(0.5 * hs.theta);
    const double gd = 2.0 * std::atan(th);
    const double lt = std::abs(std::log(th));
    const double self = hs.d > 0.0 ? g * sg * gd + lt : g * sg * lt + gd;
    return self / std::sqrt(std::abs(hs.d)) + p.alpha() * sg / hyperbolic_separation(hs, p);
}

// --- circular ansatz check ---------------------------------------------------

namespace detail {

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }
inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 axpy(double s, const Vec3& x, const Vec3& y) {
    return {s * x[0] + y[0], s * x[1] + y[1], s * x[2] + y[2]};
}

} // namespace detail

/// Evaluates the rescaled filament PDE (beta = -gamma) on the two circles at
/// n_samples parameter values and returns the largest Euclidean mismatch with
/// the velocity the ODE system induces through the circular ansatz.
inline double ansatz_residual(const FullState& s, const Params& p, int n_samples,
                              double xi_offset = 0.0) {
    using detail::Vec3;
    if (n_samples < 4)
        throw Error(ErrorCode::DomainError, "n_samples must be at least 4");
    if (!(s.separation_sq() > 0.0))
        throw Error(ErrorCode::SeparationZero, "filaments overlap");
    const auto rates = rhs_full(s, p);
    const double beta = -p.gamma();
    const double a = p.alpha();
    double worst = 0.0;
    for (int j = 0; j < n_samples; ++j) {
        const double xi = xi_offset + 2.0 * std::numbers::pi * j / n_samples;
        const double c = std::cos(xi);
        const double sn = std::sin(xi);
        const Vec3 x{s.r1 * c, s.r1 * sn, s.z1};
        const Vec3 y{s.r2 * c, s.r2 * sn, s.z2};
        const Vec3 x_xi{-s.r1 * sn, s.r1 * c, 0.0};
        const Vec3 y_xi{-s.r2 * sn, s.r2 * c, 0.0};
        const Vec3 x_xixi{-s.r1 * c, -s.r1 * sn, 0.0};
        const Vec3 y_xixi{-s.r2 * c, -s.r2 * sn, 0.0};

        const Vec3 xy = detail::sub(x, y);
        const double sep = detail::norm(xy);
        const double sep3 = sep * sep * sep;
        const double nx = detail::norm(x_xi);
        const double ny = detail::norm(y_xi);

        const Vec3 x_self = detail::cross(x_xi, x_xixi);
        const Vec3 x_int = detail::cross(y_xi, xy);
        const Vec3 pde_x = detail::axpy(beta / (nx * nx * nx), x_self,
                                        Vec3{-a * x_int[0] / sep3, -a * x_int[1] / sep3,
                                             -a * x_int[2] / sep3});

        const Vec3 y_self = detail::cross(y_xi, y_xixi);
        const Vec3 y_int = detail::cross(x_xi, detail::sub(y, x));
        const Vec3 pde_y = detail::axpy(1.0 / (ny * ny * ny), y_self,
                                        Vec3{-a * beta * y_int[0] / sep3,
                                             -a * beta * y_int[1] / sep3,
                                             -a * beta * y_int[2] / sep3});

        const Vec3 ode_x{rates[0] * c, rates[0] * sn, rates[1]};
        const Vec3 ode_y{rates[2] * c, rates[2] * sn, rates[3]};
        worst = std::max({worst, detail::norm(detail::sub(pde_x, ode_x)),
                          detail::norm(detail::sub(pde_y, ode_y))});
    }
    return worst;
}

} // namespace filcol
