#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "error.hpp"

namespace filcol {

/// Model constants. alpha is the interaction strength, gamma = |Gamma1/Gamma2|
/// after orienting the pair so that gamma >= 1.
class Params {
public:
    Params(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw Error(ErrorCode::DomainError, "alpha must lie in (0,1)");
        if (!(gamma >= 1.0) || !std::isfinite(gamma))
            throw Error(ErrorCode::DomainError, "gamma must be finite and >= 1");
    }

    double alpha() const noexcept { return alpha_; }
    double gamma() const noexcept { return gamma_; }

    double sqrt_gamma() const noexcept { return std::sqrt(gamma_); }
    /// gamma + gamma^{-1/2}, the self-induction coefficient of the reduced system.
    double self_coeff() const noexcept { return gamma_ + 1.0 / std::sqrt(gamma_); }
    /// sqrt(gamma) - 1, the radius mismatch factor of the d = 0 hyperbola.
    double mismatch() const noexcept { return std::sqrt(gamma_) - 1.0; }
    bool equal_circulation() const noexcept { return gamma_ == 1.0; }

private:
    double alpha_;
    double gamma_;
};

/// Radii and axial positions of the two coaxial circles.
struct FullState {
    double r1;
    double z1;
    double r2;
    double z2;

    double separation_sq() const noexcept {
        return (r1 - r2) * (r1 - r2) + (z1 - z2) * (z1 - z2);
    }
    bool valid() const noexcept {
        return r1 > 0.0 && r2 > 0.0 && std::isfinite(z1) && std::isfinite(z2) &&
               separation_sq() > 0.0;
    }
};

/// (theta, W) = (log R1, z1 - z2) on the d = 0 hyperbola.
struct ReducedState {
    double theta;
    double w;
};

/// Coordinates on the hyperbola gamma R1^2 - R2^2 = d, d != 0.
/// d > 0: R1 = sqrt(d/gamma) cosh(theta), R2 = sqrt(d) sinh(theta).
/// d < 0: R1 = sqrt(|d|/gamma) sinh(theta), R2 = sqrt(|d|) cosh(theta).
struct HyperbolicState {
    double theta;
    double w;
    double d;
};

template <std::size_t N>
using Derivative = std::array<double, N>;

using FullRates = Derivative<4>;
using ReducedRates = Derivative<2>;

} // namespace filcol
