#pragma once

// Adaptive Dormand-Prince 5(4) integration with cubic Hermite dense output,
// event location and invariant-drift monitoring.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dynamics.hpp"
#include "error.hpp"
#include "types.hpp"

namespace filcol {

struct IntegrationConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 10'000'000;
    double h_init = 1e-4;
    double h_min = 1e-14;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw Error(ErrorCode::ConfigInvalid, "tolerances must be positive");
        if (max_steps <= 0)
            throw Error(ErrorCode::ConfigInvalid, "max_steps must be positive");
        if (!(h_min > 0.0) || !(h_min < h_init))
            throw Error(ErrorCode::ConfigInvalid, "need 0 < h_min < h_init");
    }
};

enum class EventKind { WCrossesZero, ThetaEscapesBelow, WBelow, StepCollapse };
enum class Direction { Decreasing, Increasing, Any };

constexpr std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::WCrossesZero: return "WCrossesZero";
    case EventKind::ThetaEscapesBelow: return "ThetaEscapesBelow";
    case EventKind::WBelow: return "WBelow";
    case EventKind::StepCollapse: return "StepCollapse";
    }
    return "Unknown";
}

struct EventSpec {
    EventKind kind;
    double threshold = 0.0;
    Direction direction = Direction::Any;
    bool terminal = true;
};

enum class Outcome { ReachedTEnd, EventTerminated, StepCollapsed };

constexpr std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::ReachedTEnd: return "ReachedTEnd";
    case Outcome::EventTerminated: return "EventTerminated";
    case Outcome::StepCollapsed: return "StepCollapsed";
    }
    return "Unknown";
}

template <std::size_t N>
struct EventRecord {
    double t;
    EventSpec spec;
    std::array<double, N> state;
};

template <std::size_t N>
struct Trajectory {
    std::vector<double> times;
    std::vector<std::array<double, N>> states;
    std::vector<double> step_sizes;  // accepted step sizes, one per interval
    std::vector<EventRecord<N>> events;
    std::map<std::string, double> drift;
    Outcome outcome = Outcome::ReachedTEnd;
};

struct InvariantValue {
    double value;
    double scale;  // magnitude of the terms that make up the value
};

// --- systems -----------------------------------------------------------------

struct FullSystem {
    static constexpr std::size_t dim = 4;
    static constexpr const char* invariant_name = "d";
    using State = std::array<double, dim>;
    Params params;

    static FullState unpack(const State& y) { return {y[0], y[1], y[2], y[3]}; }
    static State pack(const FullState& s) { return {s.r1, s.z1, s.r2, s.z2}; }
    State rhs(const State& y) const { return rhs_full(unpack(y), params); }
    bool valid(const State& y) const { return unpack(y).valid(); }
    double theta(const State& y) const { return std::log(y[0]); }
    double w(const State& y) const { return y[1] - y[3]; }
    InvariantValue invariant(const State& y) const {
        const double a = params.gamma() * y[0] * y[0];
        const double b = y[2] * y[2];
        return {a - b, a + b};
    }
};

struct ReducedSystem {
    static constexpr std::size_t dim = 2;
    static constexpr const char* invariant_name = "H";
    using State = std::array<double, dim>;
    Params params;

    State rhs(const State& y) const { return rhs_reduced({y[0], y[1]}, params); }
    bool valid(const State& y) const {
        return std::isfinite(y[0]) && std::isfinite(y[1]) &&
               !(params.equal_circulation() && y[1] == 0.0);
    }
    double theta(const State& y) const { return y[0]; }
    double w(const State& y) const { return y[1]; }
    InvariantValue invariant(const State& y) const {
        const ReducedState rs{y[0], y[1]};
        return {hamiltonian(rs, params), hamiltonian_scale(rs, params)};
    }
};

struct HyperbolicSystem {
    static constexpr std::size_t dim = 2;
    static constexpr const char* invariant_name = "H";
    using State = std::array<double, dim>;
    Params params;
    double d;

    State rhs(const State& y) const { return rhs_hyperbolic({y[0], y[1], d}, params); }
    bool valid(const State& y) const {
        return d != 0.0 && y[0] > 0.0 && std::isfinite(y[0]) && std::isfinite(y[1]);
    }
    double theta(const State& y) const { return y[0]; }
    double w(const State& y) const { return y[1]; }
    InvariantValue invariant(const State& y) const {
        const HyperbolicState hs{y[0], y[1], d};
        return {hamiltonian_hyperbolic(hs, params), hamiltonian_hyperbolic_scale(hs, params)};
    }
};

namespace detail {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
bool all_finite(const Vec<N>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

template <std::size_t N>
struct StepResult {
    Vec<N> y;
    Vec<N> f;  // rhs at y (FSAL)
    double err;
};

// Dormand-Prince 5(4). Returns err = +inf when a stage leaves the domain.
template <class System>
StepResult<System::dim> dopri_step(const System& sys, const Vec<System::dim>& y,
                                   const Vec<System::dim>& f0, double h,
                                   const IntegrationConfig& cfg) {
    constexpr std::size_t N = System::dim;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    StepResult<N> out{y, f0, std::numeric_limits<double>::infinity()};
    auto stage = [&](const Vec<N>& arg, Vec<N>& k) {
        if (!all_finite(arg) || !sys.valid(arg))
            return false;
        try {
            k = sys.rhs(arg);
        } catch (const Error&) {
            return false;
        }
        return all_finite(k);
    };

    Vec<N> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{};
    const Vec<N>& k1 = f0;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    if (!stage(tmp, k2)) return out;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    if (!stage(tmp, k3)) return out;
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    if (!stage(tmp, k4)) return out;
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    if (!stage(tmp, k5)) return out;
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    if (!stage(tmp, k6)) return out;
    Vec<N> y5{};
    for (std::size_t i = 0; i < N; ++i)
        y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    if (!stage(y5, k7)) return out;

    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        acc += (e / sc) * (e / sc);
    }
    out.y = y5;
    out.f = k7;
    out.err = std::sqrt(acc / N);
    return out;
}

template <std::size_t N>
Vec<N> hermite(double t0, const Vec<N>& y0, const Vec<N>& f0, double t1, const Vec<N>& y1,
               const Vec<N>& f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    Vec<N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return out;
}

template <class System>
double event_value(const System& sys, const EventSpec& ev, const Vec<System::dim>& y) {
    switch (ev.kind) {
    case EventKind::WCrossesZero: return sys.w(y);
    case EventKind::WBelow: return sys.w(y) - ev.threshold;
    case EventKind::ThetaEscapesBelow: return sys.theta(y) - ev.threshold;
    case EventKind::StepCollapse: break;
    }
    return 1.0;
}

inline bool crosses(double g0, double g1, Direction dir) {
    const bool down = g0 > 0.0 && g1 <= 0.0;
    const bool up = g0 < 0.0 && g1 >= 0.0;
    switch (dir) {
    case Direction::Decreasing: return down;
    case Direction::Increasing: return up;
    case Direction::Any: return down || up;
    }
    return false;
}

} // namespace detail

template <class System>
Trajectory<System::dim> integrate(const System& sys, const std::array<double, System::dim>& y0,
                                  double t_end, const IntegrationConfig& cfg,
                                  const std::vector<EventSpec>& events = {}) {
    constexpr std::size_t N = System::dim;
    using State = std::array<double, N>;
    cfg.validate();
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw Error(ErrorCode::InvalidInitialState, "t_end must be positive and finite");
    if (!detail::all_finite(y0) || !sys.valid(y0))
        throw Error(ErrorCode::InvalidInitialState, "initial state is outside the phase space");
    for (const auto& ev : events)
        if (!std::isfinite(ev.threshold))
            throw Error(ErrorCode::ConfigInvalid, "event thresholds must be finite");

    State f;
    try {
        f = sys.rhs(y0);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidInitialState, e.what());
    }

    Trajectory<N> traj;
    traj.times.push_back(0.0);
    traj.states.push_back(y0);

    const InvariantValue inv0 = sys.invariant(y0);
    double drift_abs = 0.0;
    double drift_rel = 0.0;
    auto track = [&](const State& y) {
        const InvariantValue iv = sys.invariant(y);
        const double da = std::abs(iv.value - inv0.value);
        drift_abs = std::max(drift_abs, da);
        drift_rel = std::max(drift_rel, da / (1.0 + std::max(iv.scale, inv0.scale)));
    };
    auto finish = [&](Outcome o) {
        traj.outcome = o;
        traj.drift[System::invariant_name] = drift_rel;
        traj.drift[std::string(System::invariant_name) + "_abs"] = drift_abs;
        return traj;
    };
    auto collapse_event = [&](double t, const State& y) {
        EventSpec spec{EventKind::StepCollapse};
        for (const auto& ev : events)
            if (ev.kind == EventKind::StepCollapse) spec = ev;
        traj.events.push_back({t, spec, y});
        return finish(Outcome::StepCollapsed);
    };

    double t = 0.0;
    State y = y0;
    double h = std::min(cfg.h_init, t_end);
    const double t_tol = 1e-12 * t_end;
    long steps = 0;

    while (t < t_end) {
        if (steps >= cfg.max_steps)
            throw Error(ErrorCode::StepLimitExceeded, "max_steps reached before t_end");
        h = std::min(h, t_end - t);
        if (h < cfg.h_min && t_end - t > cfg.h_min)
            return collapse_event(t, y);
        if (t + h == t)
            return collapse_event(t, y);

        auto step = detail::dopri_step(sys, y, f, h, cfg);
        ++steps;
        if (!(step.err <= 1.0)) {
            const double fac = std::isfinite(step.err) ? std::max(0.2, 0.9 * std::pow(step.err, -0.2)) : 0.2;
            h *= fac;
            continue;
        }
        const double t_new = (t_end - t - h <= 0.0) ? t_end : t + h;

        // Earliest event crossing inside (t, t_new].
        struct Hit {
            double t;
            std::size_t idx;
        };
        std::vector<Hit> hits;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const auto& ev = events[e];
            if (ev.kind == EventKind::StepCollapse) continue;
            const double g0 = detail::event_value(sys, ev, y);
            const double g1 = detail::event_value(sys, ev, step.y);
            if (!detail::crosses(g0, g1, ev.direction)) continue;
            double lo = t, hi = t_new;
            double glo = g0;
            while (hi - lo > t_tol) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double gm =
                    detail::event_value(sys, ev, detail::hermite(t, y, f, t_new, step.y, step.f, mid));
                if (detail::crosses(glo, gm, ev.direction) ||
                    (ev.direction == Direction::Any && gm == 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            hits.push_back({hi, e});
        }
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });

        bool terminated = false;
        for (const auto& hit : hits) {
            const auto& ev = events[hit.idx];
            // Land on the event with a genuine step; the interpolant is only
            // used to locate it.
            State ye = hit.t >= t_new ? step.y : detail::hermite(t, y, f, t_new, step.y, step.f, hit.t);
            if (hit.t < t_new && hit.t > t) {
                auto landing = detail::dopri_step(sys, y, f, hit.t - t, cfg);
                if (std::isfinite(landing.err)) ye = landing.y;
            }
            traj.events.push_back({hit.t, ev, ye});
            if (ev.terminal) {
                if (hit.t > t) {
                    traj.step_sizes.push_back(hit.t - t);
                    traj.times.push_back(hit.t);
                    traj.states.push_back(ye);
                    track(ye);
                }
                terminated = true;
                break;
            }
        }
        if (terminated)
            return finish(Outcome::EventTerminated);

        traj.step_sizes.push_back(t_new - t);
        t = t_new;
        y = step.y;
        f = step.f;
        traj.times.push_back(t);
        traj.states.push_back(y);
        track(y);

        const double fac = step.err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(step.err, -0.2), 0.2, 5.0);
        h *= fac;
    }
    return finish(Outcome::ReachedTEnd);
}

inline Trajectory<4> integrate(const FullState& s0, const Params& p, double t_end,
                               const IntegrationConfig& cfg, const std::vector<EventSpec>& events = {}) {
    return integrate(FullSystem{p}, FullSystem::pack(s0), t_end, cfg, events);
}

inline Trajectory<2> integrate(const ReducedState& rs0, const Params& p, double t_end,
                               const IntegrationConfig& cfg, const std::vector<EventSpec>& events = {}) {
    return integrate(ReducedSystem{p}, {rs0.theta, rs0.w}, t_end, cfg, events);
}

inline Trajectory<2> integrate(const HyperbolicState& hs0, const Params& p, double t_end,
                               const IntegrationConfig& cfg, const std::vector<EventSpec>& events = {}) {
    return integrate(HyperbolicSystem{p, hs0.d}, {hs0.theta, hs0.w}, t_end, cfg, events);
}

template <std::size_t N>
const std::map<std::string, double>& drift_report(const Trajectory<N>& traj) {
    if (traj.times.empty())
        throw Error(ErrorCode::EmptyTrajectory, "trajectory has no samples");
    return traj.drift;
}

} // namespace filcol
