#pragma once

// Regime threshold, separatrix, motion classification, collision-time
// formulas and bounds, the supercritical escape corridor and the d != 0
// no-collision certificate.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynamics.hpp"
#include "error.hpp"
#include "roots.hpp"
#include "types.hpp"

namespace filcol {

// --- threshold gamma* ----------------------------------------------------------

/// -eta^4 + eta^3 + alpha eta^2 - eta + 1; its root in (1, inf) is sqrt(gamma*).
inline double threshold_quartic(double eta, double alpha) {
    return (((-eta + 1.0) * eta + alpha) * eta - 1.0) * eta + 1.0;
}

inline double threshold_quartic_slope(double eta, double alpha) {
    return ((-4.0 * eta + 3.0) * eta + 2.0 * alpha) * eta - 1.0;
}

struct GammaStar {
    double gamma;
    double eta;
    double residual;  // |p(eta*)|
};

inline GammaStar solve_gamma_star(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(ErrorCode::DomainError, "alpha must lie in (0,1)");
    auto p = [alpha](double e) { return threshold_quartic(e, alpha); };
    auto dp = [alpha](double e) { return threshold_quartic_slope(e, alpha); };
    const Root r = bisect_newton(p, dp, 1.0 + 1e-12, 10.0, 1e-13, 3);
    return {r.x * r.x, r.x, r.residual};
}

inline double gamma_star(double alpha) { return solve_gamma_star(alpha).gamma; }

enum class Regime { EqualCirculation, Subcritical, Critical, Supercritical };

constexpr std::string_view to_string(Regime r) {
    switch (r) {
    case Regime::EqualCirculation: return "EqualCirculation";
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
    }
    return "Unknown";
}

inline constexpr double kCriticalBand = 1e-9;

inline Regime regime(const Params& p, double gstar) {
    if (p.equal_circulation())
        return Regime::EqualCirculation;
    if (std::abs(p.gamma() - gstar) <= kCriticalBand)
        return Regime::Critical;
    return p.gamma() < gstar ? Regime::Subcritical : Regime::Supercritical;
}

inline Regime regime(const Params& p) { return regime(p, gamma_star(p.alpha())); }

enum class Equilibria { NoneGamma1, NoneOffCritical, LineAtCritical };

inline Equilibria equilibria(const Params& p) {
    switch (regime(p)) {
    case Regime::EqualCirculation: return Equilibria::NoneGamma1;
    case Regime::Critical: return Equilibria::LineAtCritical;
    default: return Equilibria::NoneOffCritical;
    }
}

/// Coefficient c with H(theta, 0) = F2(theta, 0) = c e^{-theta} (gamma > 1).
/// Positive below gamma*, zero at gamma*, negative above.
inline double axis_coefficient(const Params& p) {
    if (p.equal_circulation())
        throw Error(ErrorCode::RegimeError, "axis coefficient is undefined for gamma = 1");
    return -p.self_coeff() + p.alpha() * p.sqrt_gamma() / p.mismatch();
}

inline double axis_rate(double theta, const Params& p) {
    return axis_coefficient(p) * std::exp(-theta);
}

/// dW/dt written on the level set H = h0 as a function of theta alone.
inline double level_set_wdot(double theta, const Params& p, double h0) {
    const double k = p.self_coeff();
    const double m = p.mismatch();
    const double shifted = h0 + k * std::exp(-theta);
    const double a2g = p.alpha() * p.alpha() * p.gamma();
    return -k * std::exp(-theta) +
           m * m / a2g * shifted * shifted * shifted * std::exp(2.0 * theta);
}

/// |H0| below this is treated as H0 = 0.
inline double h0_zero_threshold(const ReducedState& rs, const Params& p) {
    return 1e-12 * (1.0 + p.self_coeff() * std::exp(-rs.theta));
}

// --- separatrix theta* ----------------------------------------------------------

inline double theta_star(const Params& p, double h0, double gstar) {
    if (regime(p, gstar) != Regime::Subcritical)
        throw Error(ErrorCode::RegimeError, "theta* exists only for gamma in (1, gamma*)");
    if (!(h0 > 0.0))
        throw Error(ErrorCode::DomainError, "theta* needs H0 > 0");
    const double k = p.self_coeff();
    const double m = p.mismatch();
    const double lead = 1.0 / (k * k);
    const double mix = m * m / (p.alpha() * p.alpha() * p.gamma());
    auto h = [&](double y) {
        const double s = h0 + y;
        return -lead * y * y * y + mix * s * s * s;
    };
    auto dh = [&](double y) {
        const double s = h0 + y;
        return -3.0 * lead * y * y + 3.0 * mix * s * s;
    };
    double hi = std::max(h0, 1e-300);
    for (int i = 0; h(hi) >= 0.0; ++i) {
        if (i > 2000)
            throw Error(ErrorCode::NumericalFailure, "no sign change for the separatrix cubic");
        hi *= 2.0;
    }
    const Root r = bisect_newton(h, dh, 0.0, hi, 1e-13, 3);
    return std::log(k / r.x);
}

inline double theta_star(const Params& p, double h0) {
    return theta_star(p, h0, gamma_star(p.alpha()));
}

// --- classification -------------------------------------------------------------

enum class Verdict {
    HeadOnCollision,
    AsymmetricCollision,
    NoCollisionGamma1,
    NoCollisionSubcritical,
    NoCollisionCritical,
    GlobalPassThrough,
    EquilibriumRest,
};

constexpr std::string_view to_string(Verdict v) {
    switch (v) {
    case Verdict::HeadOnCollision: return "HeadOnCollision";
    case Verdict::AsymmetricCollision: return "AsymmetricCollision";
    case Verdict::NoCollisionGamma1: return "NoCollisionGamma1";
    case Verdict::NoCollisionSubcritical: return "NoCollisionSubcritical";
    case Verdict::NoCollisionCritical: return "NoCollisionCritical";
    case Verdict::GlobalPassThrough: return "GlobalPassThrough";
    case Verdict::EquilibriumRest: return "EquilibriumRest";
    }
    return "Unknown";
}

constexpr bool is_collision(Verdict v) {
    return v == Verdict::HeadOnCollision || v == Verdict::AsymmetricCollision;
}

struct MotionClass {
    Verdict verdict;
    Regime regime;
    double h0;
    double gamma_star;
    std::optional<double> theta_star;
};

inline MotionClass classify(const ReducedState& rs0, const Params& p) {
    if (!std::isfinite(rs0.theta) || !std::isfinite(rs0.w))
        throw Error(ErrorCode::InvalidInitialState, "non-finite initial state");
    if (p.equal_circulation() && rs0.w == 0.0)
        throw Error(ErrorCode::InvalidInitialState, "W0 = 0 is outside the gamma = 1 phase space");
    const double gs = gamma_star(p.alpha());
    const Regime reg = regime(p, gs);
    const double h0 = hamiltonian(rs0, p);
    MotionClass mc{Verdict::GlobalPassThrough, reg, h0, gs, std::nullopt};
    switch (reg) {
    case Regime::EqualCirculation:
        mc.verdict = rs0.w > 0.0 ? Verdict::HeadOnCollision : Verdict::NoCollisionGamma1;
        break;
    case Regime::Subcritical: {
        const bool positive = h0 > h0_zero_threshold(rs0, p);
        if (positive)
            mc.theta_star = theta_star(p, h0, gs);
        const bool collides = rs0.w > 0.0 && (!positive || rs0.theta <= *mc.theta_star);
        mc.verdict = collides ? Verdict::AsymmetricCollision : Verdict::NoCollisionSubcritical;
        break;
    }
    case Regime::Critical:
        if (rs0.w > 0.0)
            mc.verdict = Verdict::AsymmetricCollision;
        else if (rs0.w == 0.0)
            mc.verdict = Verdict::EquilibriumRest;
        else
            mc.verdict = Verdict::NoCollisionCritical;
        break;
    case Regime::Supercritical:
        mc.verdict = Verdict::GlobalPassThrough;
        break;
    }
    return mc;
}

// --- collision time ---------------------------------------------------------------

enum class EstimateKind { Exact, ImplicitRoot, UpperBound };

enum class FormulaTag {
    Gamma1_H0Zero,
    Gamma1_H0Nonzero,
    Subcritical_H0Zero,
    Subcritical_H0Negative,
    Subcritical_H0Positive,
    Critical,
};

constexpr std::string_view to_string(EstimateKind k) {
    switch (k) {
    case EstimateKind::Exact: return "Exact";
    case EstimateKind::ImplicitRoot: return "ImplicitRoot";
    case EstimateKind::UpperBound: return "UpperBound";
    }
    return "Unknown";
}

constexpr std::string_view to_string(FormulaTag t) {
    switch (t) {
    case FormulaTag::Gamma1_H0Zero: return "Gamma1_H0Zero";
    case FormulaTag::Gamma1_H0Nonzero: return "Gamma1_H0Nonzero";
    case FormulaTag::Subcritical_H0Zero: return "Subcritical_H0Zero";
    case FormulaTag::Subcritical_H0Negative: return "Subcritical_H0Negative";
    case FormulaTag::Subcritical_H0Positive: return "Subcritical_H0Positive";
    case FormulaTag::Critical: return "Critical";
    }
    return "Unknown";
}

struct CollisionTimeEstimate {
    EstimateKind kind;
    double value;
    FormulaTag formula;
    std::map<std::string, double> constants;
};

namespace detail {

// (-log(1-x) - x) / x^2 for x < 1.
inline double log_remainder(double x) {
    if (std::abs(x) < 1e-3)
        return 0.5 + x * (1.0 / 3.0 + x * (0.25 + x * (0.2 + x / 6.0)));
    return (-std::log1p(-x) - x) / (x * x);
}

// log((v+1)/(v-1)) - 2v/(v^2-1) for v > 1.
inline double critical_log_term(double v) {
    const double x = 1.0 / v;
    if (x < 1e-2) {
        // 2 (atanh(x) - x/(1-x^2)) = -2 sum_{n>=1} 2n/(2n+1) x^{2n+1}
        double term = x * x * x;
        double sum = 0.0;
        for (int n = 1; n <= 8; ++n) {
            sum += 2.0 * n / (2.0 * n + 1.0) * term;
            term *= x * x;
        }
        return -2.0 * sum;
    }
    return std::log((v + 1.0) / (v - 1.0)) - 2.0 * v / (v * v - 1.0);
}

} // namespace detail

inline CollisionTimeEstimate collision_time(const ReducedState& rs0, const Params& p) {
    const MotionClass mc = classify(rs0, p);
    if (!is_collision(mc.verdict))
        throw Error(ErrorCode::RegimeError,
                    "initial data does not lead to a collision (" + std::string(to_string(mc.verdict)) + ")");
    const double a = p.alpha();
    const double g = p.gamma();
    const double k = p.self_coeff();
    const double m = p.mismatch();
    const double h0 = mc.h0;
    const double th0 = rs0.theta;
    const double w0 = rs0.w;
    const bool h0_zero = std::abs(h0) <= h0_zero_threshold(rs0, p);

    switch (mc.regime) {
    case Regime::EqualCirculation: {
        if (h0_zero) {
            // W W' = -alpha  =>  W^2 = W0^2 - 2 alpha t
            return {EstimateKind::Exact, w0 * w0 / (2.0 * a), FormulaTag::Gamma1_H0Zero,
                    {{"printed_t_max", 2.0 * w0 * w0 / a}}};
        }
        const double g1_w0 = a / (h0 * h0) * std::log(a - h0 * w0) + w0 / h0;
        const double x = h0 * w0 / a;
        const double t = w0 * w0 / a * detail::log_remainder(x);
        return {EstimateKind::ImplicitRoot, t, FormulaTag::Gamma1_H0Nonzero,
                {{"H0", h0}, {"G1_W0", g1_w0}, {"G1_limit", a / (h0 * h0) * std::log(a)}}};
    }
    case Regime::Subcritical: {
        const double a2g = a * a * g;
        if (h0_zero) {
            const double m0 = k * k * k / a2g * std::sqrt(a2g / (k * k) - m * m);
            const double e2 = std::exp(2.0 * th0);
            return {EstimateKind::Exact, e2 / (2.0 * m0), FormulaTag::Subcritical_H0Zero,
                    {{"m0", m0}, {"printed_t_max", e2 / (4.0 * m0)}}};
        }
        if (h0 < 0.0) {
            const double A = a * std::sqrt(g);
            const double m1 = std::sqrt(A * (A - m * k)) / a2g;
            const double u0 = k / std::abs(h0) * std::exp(-th0);
            const double x = 1.0 / (u0 - 1.0);
            const double bracket = std::log1p(x) - x;
            const double t_star = -bracket / (m1 * h0 * h0);
            return {EstimateKind::UpperBound, t_star, FormulaTag::Subcritical_H0Negative,
                    {{"m1", m1}, {"u0", u0}, {"T_star", t_star}}};
        }
        const double m2 = std::sqrt(h0) * std::pow(k, 1.5) / (a * std::sqrt(g));
        return {EstimateKind::UpperBound, 2.0 * std::exp(1.5 * th0) / (3.0 * m2),
                FormulaTag::Subcritical_H0Positive,
                {{"m2", m2}, {"theta_star", *mc.theta_star}}};
    }
    case Regime::Critical: {
        const double ah = std::abs(h0);
        const double m3 = std::sqrt(m) * std::sqrt(ah) / (std::pow(a, 1.5) * std::pow(g, 0.75));
        const double m3_printed = std::sqrt(m) * std::sqrt(ah) / (std::pow(a, 1.75) * std::pow(g, 0.75));
        const double v0 = std::sqrt(k / ah) * std::exp(-0.5 * th0);
        const double g1 = detail::critical_log_term(v0) / (4.0 * std::sqrt(k) * std::pow(ah, 1.5));
        return {EstimateKind::UpperBound, -2.0 / m3 * g1, FormulaTag::Critical,
                {{"m3", m3}, {"v0", v0}, {"g1_v0", g1},
                 {"printed_m3", m3_printed}, {"printed_bound", -2.0 / m3_printed * g1}}};
    }
    case Regime::Supercritical: break;
    }
    throw Error(ErrorCode::RegimeError, "no collision in the supercritical regime");
}

// --- supercritical corridor --------------------------------------------------------

/// W0 + lower_slope t <= W(t) <= W0 + upper_slope t.
struct LinearCorridor {
    double lower_slope;
    double upper_slope;
    double theta_lo;
    double theta_hi;
    double w0;

    double lower(double t) const { return w0 + lower_slope * t; }
    double upper(double t) const { return w0 + upper_slope * t; }
    bool consistent() const {
        return lower_slope <= upper_slope && upper_slope < 0.0 && theta_lo < theta_hi;
    }
};

namespace detail {

struct CorridorAngles {
    double h0;
    double c;
    double theta_lo;
    double theta_hi;
};

inline CorridorAngles corridor_angles(const ReducedState& rs0, const Params& p) {
    const double gs = gamma_star(p.alpha());
    if (regime(p, gs) != Regime::Supercritical)
        throw Error(ErrorCode::RegimeError, "corridor exists only for gamma > gamma*");
    const double h0 = hamiltonian(rs0, p);
    const double c = axis_coefficient(p);
    const double k = p.self_coeff();
    const double theta_tilde = std::log(c / h0);  // H(theta~, 0) = H0
    const double lo = theta_tilde - 1.0;
    const double hi = std::max(std::log(k / std::abs(h0)), lo + 1e-6);
    return {h0, c, lo, hi};
}

} // namespace detail

/// Escape corridor from theta_lo <= theta(t) <= theta_hi:
/// -k e^{-theta_lo} <= dW/dt <= c e^{-theta_hi} < 0.
inline LinearCorridor apriori_corridor(const ReducedState& rs0, const Params& p) {
    const auto ang = detail::corridor_angles(rs0, p);
    const double k = p.self_coeff();
    return {-k * std::exp(-ang.theta_lo), ang.c * std::exp(-ang.theta_hi), ang.theta_lo,
            ang.theta_hi, rs0.w};
}

/// The corridor with the angle assignment of the printed estimate
/// (lower slope -k e^{-theta_hi}, upper slope -|f(theta_lo)|). Kept for
/// comparison; it is empty for t > 0 (see consistent()).
inline LinearCorridor printed_corridor(const ReducedState& rs0, const Params& p) {
    const auto ang = detail::corridor_angles(rs0, p);
    const double k = p.self_coeff();
    return {-k * std::exp(-ang.theta_hi), -std::abs(ang.c * std::exp(-ang.theta_lo)),
            ang.theta_lo, ang.theta_hi, rs0.w};
}

// --- d != 0 certificate ---------------------------------------------------------------

struct NoCollisionCertificate {
    double h_level;
    double min_separation;
};

namespace detail {

// theta-only part of the hyperbolic Hamiltonian.
inline double hyperbolic_potential(double theta, double d, const Params& p) {
    const double g32 = p.gamma() * p.sqrt_gamma();
    const double th = std::tanh(0.5 * theta);
    const double gd = 2.0 * std::atan(th);
    const double lt = std::log(th);
    return (d > 0.0 ? g32 * gd + lt : g32 * lt + gd) / std::sqrt(std::abs(d));
}

inline double radial_gap(double theta, double d, const Params& p) {
    const auto [r1, r2] = radii(HyperbolicState{theta, 0.0, d}, p);
    return std::abs(r1 - r2);
}

} // namespace detail

/// Lower bound on the inter-filament distance over the whole level set of the
/// hyperbolic Hamiltonian through hs0. Along the level set the distance is
/// D = alpha sqrt(gamma) / (H0 - V(theta)), increasing in theta, so the
/// infimum sits at the left end (W = 0) of a level-set component.
inline NoCollisionCertificate no_collision_certificate(const HyperbolicState& hs0, const Params& p) {
    const double h0 = hamiltonian_hyperbolic(hs0, p);
    const double d = hs0.d;
    const double num = p.alpha() * p.sqrt_gamma();
    auto potential = [&](double th) { return detail::hyperbolic_potential(th, d, p); };
    // >= 0 exactly on the level set (where H0 > V).
    auto admissible = [&](double th) {
        return num - detail::radial_gap(th, d, p) * (h0 - potential(th));
    };

    double theta_end = 40.0;
    const double theta_min = 1e-9;
    if (potential(theta_end) >= h0) {
        const Root r = bisect_newton([&](double th) { return potential(th) - h0; },
                                     [](double) { return 0.0; }, theta_min, theta_end, 1e-15, 0);
        theta_end = r.x;
    }

    std::vector<double> grid;
    constexpr int n = 4000;
    grid.reserve(2 * n + 2);
    for (int i = 0; i <= n; ++i) {
        grid.push_back(theta_min * std::pow(theta_end / theta_min, double(i) / n));
        grid.push_back(theta_min + (theta_end - theta_min) * double(i) / n);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double best = hyperbolic_separation(hs0, p);
    double prev = admissible(grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double cur = admissible(grid[i]);
        if (prev < 0.0 && cur >= 0.0) {
            const Root r = bisect_newton(admissible, [](double) { return 0.0; }, grid[i - 1],
                                         grid[i], 1e-15, 0);
            best = std::min(best, detail::radial_gap(r.x, d, p));
        }
        prev = cur;
    }
    if (!(best > 0.0))
        throw Error(ErrorCode::NumericalFailure, "level set reaches zero separation");
    return {h0, best};
}

} // namespace filcol
