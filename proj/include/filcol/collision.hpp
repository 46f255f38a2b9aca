#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>

#include "error.hpp"
#include "integrator.hpp"
#include "types.hpp"

namespace filcol {

enum class CollisionOutcome {
    Collided,             // W -> 0 monotonically with theta -> -inf in finite time
    Survived,             // reached t_end
    NonMonotoneCollapse,  // finite-time collapse, but W was not monotone throughout
    Inconclusive,
};

constexpr std::string_view to_string(CollisionOutcome o) {
    switch (o) {
    case CollisionOutcome::Collided: return "Collided";
    case CollisionOutcome::Survived: return "Survived";
    case CollisionOutcome::NonMonotoneCollapse: return "NonMonotoneCollapse";
    case CollisionOutcome::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

struct CollisionRun {
    CollisionOutcome outcome;
    double time;  // collision time, or the time integration stopped
    Trajectory<2> trajectory;
};

inline constexpr double kDefaultOracleHorizon = 1e4;

namespace detail {

inline bool monotone_positive_w(const Trajectory<2>& tr) {
    constexpr double slack = 4.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const double w = tr.states[i][1];
        if (!(w > 0.0)) return false;
        if (i > 0) {
            const double prev = tr.states[i - 1][1];
            if (w - prev > slack * std::abs(prev)) return false;
        }
    }
    return true;
}

inline bool theta_falling_tail(const Trajectory<2>& tr) {
    const std::size_t n = tr.states.size();
    if (n < 2) return false;
    const std::size_t start = n - std::max<std::size_t>(2, n / 10);
    for (std::size_t i = start + 1; i < n; ++i)
        if (tr.states[i][0] > tr.states[i - 1][0]) return false;
    return true;
}

} // namespace detail

/// Event-driven collision oracle on the reduced system. A run ends at the
/// first time theta drops below log(eps_r) or on step collapse. It counts as a
/// collision when W stayed positive and non-increasing over the whole run and
/// the end state is at the singularity: |W| <= eps_w, or a step collapse with
/// theta still falling and |W| <= sqrt(eps_w). The second form is needed
/// because the time left before the singularity, ~W^2/(2 alpha) for gamma = 1,
/// drops below the double spacing of t long before W reaches eps_w.
inline CollisionRun simulate_until_collision(const ReducedState& rs0, const Params& p,
                                             const IntegrationConfig& cfg, double eps_w = 1e-8,
                                             double eps_r = 1e-8,
                                             double t_end = kDefaultOracleHorizon) {
    if (!(eps_w > 0.0) || !(eps_r > 0.0))
        throw Error(ErrorCode::InvalidInitialState, "eps_w and eps_r must be positive");
    const std::vector<EventSpec> events{
        {EventKind::WBelow, eps_w, Direction::Decreasing, false},
        {EventKind::ThetaEscapesBelow, std::log(eps_r), Direction::Decreasing, true},
        {EventKind::StepCollapse, 0.0, Direction::Any, true},
    };
    auto tr = integrate(rs0, p, t_end, cfg, events);
    const double t_stop = tr.times.back();
    if (tr.outcome == Outcome::ReachedTEnd)
        return {CollisionOutcome::Survived, t_stop, std::move(tr)};

    const auto& last = tr.states.back();
    const bool falling = std::exp(last[0]) <= eps_r || detail::theta_falling_tail(tr);
    const bool collapsed = tr.outcome == Outcome::StepCollapsed;
    const double w_end = std::abs(last[1]);
    const bool near = falling && (w_end <= eps_w || (collapsed && w_end <= std::sqrt(eps_w)));
    CollisionOutcome oc = CollisionOutcome::Inconclusive;
    if (near)
        oc = detail::monotone_positive_w(tr) ? CollisionOutcome::Collided
                                             : CollisionOutcome::NonMonotoneCollapse;
    return {oc, t_stop, std::move(tr)};
}

} // namespace filcol
