#pragma once

#include <cmath>

namespace lobsim {

/// Single-trade aggregate impact f(Q) = scale * Q^exponent, in ticks.
struct ImpactModel {
    double scale = 0.561;
    double exponent = 0.5;

    double operator()(double volume) const noexcept {
        return volume <= 0.0 ? 0.0 : scale * std::pow(volume, exponent);
    }
    /// sign(Q) * f(|Q|)
    double signed_impact(double excess_demand) const noexcept {
        if (excess_demand > 0.0) return (*this)(excess_demand);
        if (excess_demand < 0.0) return -(*this)(-excess_demand);
        return 0.0;
    }
    bool valid() const noexcept { return scale > 0.0 && exponent > 0.0 && exponent < 1.5; }
};

}  // namespace lobsim
