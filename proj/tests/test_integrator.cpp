#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "filcol/analysis.hpp"
#include "filcol/collision.hpp"
#include "filcol/integrator.hpp"

using namespace filcol;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected filcol::Error";
    return ErrorCode::NumericalFailure;
}

} // namespace

TEST(Config, Validation) {
    IntegrationConfig c;
    c.rel_tol = 0.0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigInvalid);
    c = {};
    c.h_min = 1.0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigInvalid);
    c = {};
    c.max_steps = 0;
    EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::ConfigInvalid);
}

TEST(Integrate, RejectsBadInput) {
    const Params p(0.5, 1.0);
    EXPECT_EQ(code_of([&] { integrate(ReducedState{0.0, 1.0}, p, -1.0, {}); }), ErrorCode::InvalidInitialState);
    EXPECT_EQ(code_of([&] { integrate(ReducedState{0.0, 0.0}, p, 1.0, {}); }), ErrorCode::InvalidInitialState);
    EXPECT_EQ(code_of([&] { integrate(FullState{1, 0, 1, 0}, p, 1.0, {}); }), ErrorCode::InvalidInitialState);
}

TEST(Integrate, StepLimit) {
    IntegrationConfig c;
    c.max_steps = 3;
    EXPECT_EQ(code_of([&] { integrate(ReducedState{0.0, 1.0}, Params(0.2, 1.1), 100.0, c); }),
              ErrorCode::StepLimitExceeded);
}

TEST(Integrate, Gamma1CollisionTime) {
    // W^2 = W0^2 - 2 alpha t exactly
    const Params p(0.5, 1.0);
    const auto run = simulate_until_collision({std::log(4.0), 1.0}, p, {});
    EXPECT_EQ(run.outcome, CollisionOutcome::Collided);
    EXPECT_NEAR(run.time, 1.0, 1e-6);
    const auto& tr = run.trajectory;
    for (std::size_t i = 0; i < tr.times.size(); i += 7) {
        const double w = tr.states[i][1];
        EXPECT_NEAR(w * w, 1.0 - 2.0 * p.alpha() * tr.times[i], 1e-8);
    }
}

TEST(Integrate, Gamma1Receding) {
    const auto run = simulate_until_collision({0.0, -1.0}, Params(0.5, 1.0), {}, 1e-8, 1e-8, 50.0);
    EXPECT_EQ(run.outcome, CollisionOutcome::Survived);
    const auto& tr = run.trajectory;
    for (std::size_t i = 1; i < tr.states.size(); ++i) EXPECT_LT(tr.states[i][1], tr.states[i - 1][1]);
}

TEST(Integrate, OracleRejectsDegenerateTolerance) {
    EXPECT_EQ(code_of([] { simulate_until_collision({0.0, 1.0}, Params(0.5, 1.0), {}, 0.0); }),
              ErrorCode::InvalidInitialState);
}

TEST(Integrate, SupercriticalPassThrough) {
    const Params p(0.2, 2.0);
    const auto tr = integrate(ReducedState{0.0, 1.0}, p, 50.0, {});
    EXPECT_EQ(tr.outcome, Outcome::ReachedTEnd);
    EXPECT_LT(tr.states.back()[1], -50.0);
    EXPECT_LT(tr.drift.at("H"), 1e-8);
}

TEST(Integrate, EquilibriumStationary) {
    const Params p(0.2, gamma_star(0.2));
    const auto tr = integrate(ReducedState{0.3, 0.0}, p, 100.0, {});
    EXPECT_EQ(tr.outcome, Outcome::ReachedTEnd);
    EXPECT_NEAR(tr.states.back()[0], 0.3, 1e-9);
    EXPECT_NEAR(tr.states.back()[1], 0.0, 1e-9);
}

TEST(Integrate, FullSystemConservesD) {
    const Params p(0.2, 1.1);
    const auto tr = integrate(FullState{1.0, 0.5, 1.2, 0.0}, p, 20.0, {});
    EXPECT_EQ(tr.outcome, Outcome::ReachedTEnd);
    EXPECT_LT(tr.drift.at("d"), 1e-9);
}

TEST(Integrate, FiniteDifferenceOfFullRhs) {
    const Params p(0.2, 1.1);
    const FullState s0{1.0, 0.5, std::sqrt(1.1), 0.0};
    const auto r = rhs_full(s0, p);
    IntegrationConfig c;
    c.rel_tol = 1e-12;
    c.abs_tol = 1e-14;
    const double h = 1e-5;
    const auto tr = integrate(s0, p, h, c);
    const auto s1 = tr.states.back();
    const auto s_start = FullSystem::pack(s0);
    // forward difference error is O(h |y''|)
    for (int i = 0; i < 4; ++i) EXPECT_NEAR((s1[i] - s_start[i]) / h, r[i], 1e-4 * (1 + std::abs(r[i])));
}

TEST(Integrate, FifthOrderConvergence) {
    const Params p(0.2, 1.5);
    const ReducedState y0{0.0, 1.0};
    IntegrationConfig ref;
    ref.rel_tol = 1e-14;
    ref.abs_tol = 1e-16;
    const auto exact = integrate(y0, p, 2.0, ref).states.back();
    std::vector<double> log_n, log_e;
    for (double tol : {1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
        IntegrationConfig c;
        c.rel_tol = tol;
        c.abs_tol = tol * 1e-2;
        const auto tr = integrate(y0, p, 2.0, c);
        const double err = std::hypot(tr.states.back()[0] - exact[0], tr.states.back()[1] - exact[1]);
        log_n.push_back(std::log(double(tr.step_sizes.size())));
        log_e.push_back(std::log(err));
    }
    // least-squares slope of log error against log step count
    double mn = 0, me = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        mn += log_n[i];
        me += log_e[i];
    }
    mn /= log_n.size();
    me /= log_e.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
        num += (log_n[i] - mn) * (log_e[i] - me);
        den += (log_n[i] - mn) * (log_n[i] - mn);
    }
    EXPECT_LE(num / den, -4.0);
}

TEST(Integrate, BlowUpIsReportedNotHidden) {
    // without collision events the oracle's stopping rule is absent; the
    // integrator must stop with a step collapse rather than claim t_end
    const auto tr = integrate(ReducedState{std::log(4.0), 1.0}, Params(0.5, 1.0), 2.0, {});
    EXPECT_NE(tr.outcome, Outcome::ReachedTEnd);
    EXPECT_LT(tr.times.back(), 1.0 + 1e-6);
}

TEST(Integrate, TimeReversal) {
    // (theta, W, t) -> (theta, -W, -t) maps solutions to solutions
    const Params p(0.3, 1.2);
    IntegrationConfig c;
    c.rel_tol = 1e-12;
    const auto fwd = integrate(ReducedState{0.2, -0.4}, p, 0.5, c);
    ASSERT_EQ(fwd.outcome, Outcome::ReachedTEnd);
    const auto end = fwd.states.back();
    const auto back = integrate(ReducedState{end[0], -end[1]}, p, 0.5, c);
    EXPECT_NEAR(back.states.back()[0], 0.2, 1e-9);
    EXPECT_NEAR(back.states.back()[1], 0.4, 1e-9);
}

TEST(Integrate, EventLocation) {
    // supercritical W falls through 0 at a well defined time
    const Params p(0.2, 2.0);
    const std::vector<EventSpec> ev{{EventKind::WCrossesZero, 0.0, Direction::Decreasing, true}};
    const auto tr = integrate(ReducedState{0.0, 0.5}, p, 50.0, {}, ev);
    ASSERT_EQ(tr.outcome, Outcome::EventTerminated);
    ASSERT_EQ(tr.events.size(), 1u);
    EXPECT_NEAR(tr.events[0].state[1], 0.0, 1e-9);
    EXPECT_DOUBLE_EQ(tr.times.back(), tr.events[0].t);
}

TEST(Integrate, NonTerminalEventsRecorded) {
    const Params p(0.2, 2.0);
    const std::vector<EventSpec> ev{{EventKind::WBelow, -1.0, Direction::Decreasing, false},
                                    {EventKind::WBelow, -2.0, Direction::Decreasing, false}};
    const auto tr = integrate(ReducedState{0.0, 0.5}, p, 50.0, {}, ev);
    EXPECT_EQ(tr.outcome, Outcome::ReachedTEnd);
    ASSERT_EQ(tr.events.size(), 2u);
    EXPECT_LT(tr.events[0].t, tr.events[1].t);
}

TEST(Drift, EmptyAndSinglePoint) {
    Trajectory<2> empty;
    EXPECT_EQ(code_of([&] { drift_report(empty); }), ErrorCode::EmptyTrajectory);
    Trajectory<2> single;
    single.times = {0.0};
    single.states = {{0.0, 1.0}};
    for (const auto& [k, v] : drift_report(single)) EXPECT_EQ(v, 0.0) << k;
}

TEST(Drift, ReducedCollisionTrajectories) {
    const Params p(0.2, 1.1);
    for (const ReducedState rs : {ReducedState{0.0, 1.0}, ReducedState{1.0, 0.3}, ReducedState{-1.0, 2.0}}) {
        const auto run = simulate_until_collision(rs, p, {});
        EXPECT_EQ(run.outcome, CollisionOutcome::Collided);
        EXPECT_LT(run.trajectory.drift.at("H"), 1e-8);
    }
}
