#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "filcol/analysis.hpp"
#include "filcol/dynamics.hpp"

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

TEST(Params, RejectsOutOfRange) {
    EXPECT_EQ(code_of([] { Params(0.0, 1.0); }), ErrorCode::DomainError);
    EXPECT_EQ(code_of([] { Params(1.0, 1.0); }), ErrorCode::DomainError);
    EXPECT_EQ(code_of([] { Params(0.2, 0.9); }), ErrorCode::DomainError);
    EXPECT_NO_THROW(Params(0.2, 1.0));
}

TEST(RhsFull, OverlappingFilaments) {
    EXPECT_EQ(code_of([] { rhs_full({1, 0, 1, 0}, Params(0.2, 1.0)); }), ErrorCode::SeparationZero);
}

TEST(RhsFull, SymmetricContraction) {
    const Params p(0.3, 1.0);
    for (double h : {0.1, 0.5, 2.0}) {
        const auto r = rhs_full({1, h, 1, 0}, p);
        EXPECT_NEAR(r[0], -p.alpha() / (h * h), 1e-12 / (h * h));
        EXPECT_NEAR(r[2], -p.alpha() / (h * h), 1e-12 / (h * h));
    }
}

TEST(RhsFull, ComponentsByHand) {
    const Params p(0.2, 1.1);
    const FullState s{1.0, 0.5, std::sqrt(1.1), 0.0};
    const double dr = s.r1 - s.r2, w = s.z1 - s.z2;
    const double d3 = std::pow(dr * dr + w * w, 1.5);
    const auto r = rhs_full(s, p);
    EXPECT_DOUBLE_EQ(r[0], -0.2 * s.r2 * w / d3);
    EXPECT_DOUBLE_EQ(r[1], -1.1 / s.r1 + 0.2 * s.r2 * dr / d3);
    EXPECT_DOUBLE_EQ(r[2], -0.2 * 1.1 * s.r1 * w / d3);
    EXPECT_DOUBLE_EQ(r[3], 1.0 / s.r2 + 0.2 * 1.1 * s.r1 * dr / d3);
}

TEST(ConservedD, Examples) {
    EXPECT_NEAR(conserved_d({1, 0, 1.2, 0}, Params(0.2, 1.44)), 0.0, 1e-14);
    EXPECT_DOUBLE_EQ(conserved_d({2, 0, 1, 0}, Params(0.2, 1.0)), 3.0);
}

TEST(ConservedD, RateVanishes) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ur(0.3, 2.0), uz(-1.0, 1.0), ug(1.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const Params p(0.4, ug(rng));
        const FullState s{ur(rng), uz(rng), ur(rng), uz(rng)};
        const auto r = rhs_full(s, p);
        const double dd = 2.0 * p.gamma() * s.r1 * r[0] - 2.0 * s.r2 * r[2];
        EXPECT_NEAR(dd, 0.0, 1e-12 * (1.0 + std::abs(p.gamma() * s.r1 * r[0])));
    }
}

TEST(Reduce, ZeroD) {
    const auto red = reduce({1, 1, 2, 0}, Params(0.2, 4.0));
    const auto* rs = std::get_if<ReducedState>(&red);
    ASSERT_NE(rs, nullptr);
    EXPECT_NEAR(rs->theta, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(rs->w, 1.0);
}

TEST(Reduce, NonzeroD) {
    const Params p(0.2, 1.0);
    const auto red = reduce({2, 0.3, 1, 0.3}, p);
    const auto* hs = std::get_if<HyperbolicState>(&red);
    ASSERT_NE(hs, nullptr);
    EXPECT_DOUBLE_EQ(hs->d, 3.0);
    EXPECT_DOUBLE_EQ(hs->w, 0.0);
    const auto [r1, r2] = radii(*hs, p);
    EXPECT_NEAR(r1, 2.0, 1e-13);
    EXPECT_NEAR(r2, 1.0, 1e-13);
}

TEST(Reduce, NegativeDRoundTrip) {
    const Params p(0.2, 1.5);
    const FullState s{1.0, 0.2, 1.5, -0.1};
    const auto hs = std::get<HyperbolicState>(reduce(s, p));
    EXPECT_LT(hs.d, 0.0);
    const auto [r1, r2] = radii(hs, p);
    EXPECT_NEAR(r1, 1.0, 1e-13);
    EXPECT_NEAR(r2, 1.5, 1e-13);
    EXPECT_NEAR(hs.w, 0.3, 1e-15);
}

TEST(Reduce, InvalidState) {
    EXPECT_EQ(code_of([] { reduce({-1, 0, 1, 0}, Params(0.2, 1.0)); }), ErrorCode::InvalidInitialState);
}

TEST(RhsReduced, Gamma1ByHand) {
    const auto r = rhs_reduced({0.0, 1.0}, Params(0.5, 1.0));
    EXPECT_DOUBLE_EQ(r[0], -0.5);
    EXPECT_DOUBLE_EQ(r[1], -2.0);
}

TEST(RhsReduced, Gamma1SingularLine) {
    EXPECT_EQ(code_of([] { rhs_reduced({0.0, 0.0}, Params(0.5, 1.0)); }), ErrorCode::OnSingularLine);
}

TEST(RhsReduced, AxisAndEquilibriumLine) {
    const Params p(0.2, 1.7);
    for (double th : {-2.0, 0.0, 3.0}) EXPECT_EQ(rhs_reduced({th, 0.0}, p)[0], 0.0);
    const Params crit(0.2, gamma_star(0.2));
    for (double th : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
        const auto r = rhs_reduced({th, 0.0}, crit);
        EXPECT_NEAR(r[1] * std::exp(th), 0.0, 1e-12) << th;
    }
}

TEST(RhsReduced, MatchesFullSystem) {
    // On d = 0 the reduced field is the pushforward of the full one.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(-1.0, 1.0), uw(-1.5, 1.5), ug(1.0, 2.5);
    for (int i = 0; i < 40; ++i) {
        const Params p(0.3, ug(rng));
        const ReducedState rs{ut(rng), uw(rng)};
        if (std::abs(rs.w) < 1e-3) continue;
        const auto [r1, r2] = radii(rs, p);
        const FullState fs{r1, rs.w, r2, 0.0};
        const auto f = rhs_full(fs, p);
        const auto r = rhs_reduced(rs, p);
        EXPECT_NEAR(r[0], f[0] / r1, 1e-11 * (1 + std::abs(r[0])));
        EXPECT_NEAR(r[1], f[1] - f[3], 1e-11 * (1 + std::abs(r[1])));
    }
}

TEST(RhsReduced, ReflectionSymmetry) {
    const Params p(0.25, 1.3);
    for (double th : {-1.0, 0.2, 1.4})
        for (double w : {0.3, 1.1}) {
            const auto a = rhs_reduced({th, w}, p);
            const auto b = rhs_reduced({th, -w}, p);
            EXPECT_DOUBLE_EQ(a[0], -b[0]);
            EXPECT_DOUBLE_EQ(a[1], b[1]);
        }
}

TEST(Hamiltonian, Gamma1Zero) {
    EXPECT_NEAR(hamiltonian({0.0, 0.25}, Params(0.5, 1.0)), 0.0, 1e-15);
}

TEST(Hamiltonian, Gamma1Divergent) {
    EXPECT_EQ(code_of([] { hamiltonian({0.0, 0.0}, Params(0.5, 1.0)); }), ErrorCode::Divergent);
    EXPECT_GT(hamiltonian({0.0, 1e-9}, Params(0.5, 1.0)), 1e8);
}

TEST(Hamiltonian, ConservedByField) {
    // grad H . F = 0
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(-1.0, 1.5), uw(0.1, 2.0), ug(1.0, 2.5);
    for (int i = 0; i < 30; ++i) {
        const Params p(0.35, ug(rng));
        const ReducedState rs{ut(rng), uw(rng)};
        const double h = 1e-6;
        const double dht = (hamiltonian({rs.theta + h, rs.w}, p) - hamiltonian({rs.theta - h, rs.w}, p)) / (2 * h);
        const double dhw = (hamiltonian({rs.theta, rs.w + h}, p) - hamiltonian({rs.theta, rs.w - h}, p)) / (2 * h);
        const auto f = rhs_reduced(rs, p);
        EXPECT_NEAR(dht * f[0] + dhw * f[1], 0.0, 1e-6 * (1 + std::abs(dht * f[0])));
    }
}

TEST(LevelSet, AltFormAndW) {
    const Params p(0.2, 1.1);
    const ReducedState rs{0.3, 0.4};
    const double h0 = hamiltonian(rs, p);
    EXPECT_NEAR(w_from_theta(rs.theta, p, h0), rs.w, 1e-12);
    const auto alt = rhs_reduced_alt(rs.theta, p, h0);
    const auto f = rhs_reduced(rs, p);
    EXPECT_NEAR(alt[0], f[0], 1e-12);
    EXPECT_NEAR(alt[1], f[1], 1e-12);
}

TEST(LevelSet, OffLevelSetAndBoundary) {
    const Params p(0.2, 1.1);
    EXPECT_EQ(code_of([&] { rhs_reduced_alt(5.0, p, 10.0); }), ErrorCode::OffLevelSet);
    const double th = 0.4;
    const double h0 = hamiltonian({th, 0.0}, p);  // level through the axis point
    EXPECT_NEAR(w_from_theta(th, p, h0), 0.0, 1e-7);
}

TEST(Hyperbolic, DomainAndDivergence) {
    const Params p(0.2, 1.5);
    EXPECT_EQ(code_of([&] { hamiltonian_hyperbolic({0.0, 0.1, 1.0}, p); }), ErrorCode::DomainError);
    EXPECT_EQ(code_of([&] { hamiltonian_hyperbolic({-0.5, 0.1, 1.0}, p); }), ErrorCode::DomainError);
    const double th_c = std::atanh(1.0 / std::sqrt(1.5));  // R1 = R2
    const double near = hamiltonian_hyperbolic({th_c + 1e-7, 1e-7, 1.0}, p);
    const double far = hamiltonian_hyperbolic({th_c + 1e-2, 1e-2, 1.0}, p);
    EXPECT_GT(near, far + 1e4);
}

TEST(Hyperbolic, MatchesFullSystem) {
    const Params p(0.2, 1.5);
    for (const FullState& s : {FullState{1.0, 0.5, 1.0, 0.0}, FullState{1.0, 0.2, 1.5, -0.1}}) {
        const auto hs = std::get<HyperbolicState>(reduce(s, p));
        const auto f = rhs_full(s, p);
        const auto r = rhs_hyperbolic(hs, p);
        EXPECT_NEAR(r[1], f[1] - f[3], 1e-12);
        // R1 = c(theta)  =>  R1' = c'(theta) theta'
        const double h = 1e-6;
        const double dr1 = (radii(HyperbolicState{hs.theta + h, hs.w, hs.d}, p).first -
                            radii(HyperbolicState{hs.theta - h, hs.w, hs.d}, p).first) / (2 * h);
        EXPECT_NEAR(dr1 * r[0], f[0], 1e-8);
    }
}

TEST(Ansatz, RandomStates) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ur(0.3, 2.0), uz(-1.0, 1.0), ug(1.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        const Params p(0.45, ug(rng));
        const FullState s{ur(rng), uz(rng), ur(rng), uz(rng)};
        if (s.separation_sq() < 0.01) continue;
        EXPECT_LT(ansatz_residual(s, p, 16), 1e-10);
        EXPECT_LT(ansatz_residual(s, p, 16, 0.37), 1e-10);
    }
}

TEST(Ansatz, SymmetricGamma1) {
    EXPECT_LT(ansatz_residual({1.0, 0.7, 1.0, 0.0}, Params(0.5, 1.0), 16), 1e-10);
}
