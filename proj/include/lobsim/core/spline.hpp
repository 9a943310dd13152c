#pragma once

#include <span>
#include <vector>

namespace lobsim {

/// Interpolating cubic spline with zero second derivative at both end knots.
/// Beyond the knots it continues linearly, which is the natural extension.
class NaturalCubicSpline {
public:
    /// Knots must be strictly increasing; at least two are required.
    NaturalCubicSpline(std::span<const double> x, std::span<const double> y);

    double operator()(double x) const noexcept;

private:
    std::vector<double> x_, y_, m_;  // m: second derivatives at the knots
};

}  // namespace lobsim
