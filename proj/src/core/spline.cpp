#include "lobsim/core/spline.hpp"

#include <algorithm>

#include "lobsim/core/types.hpp"

namespace lobsim {

NaturalCubicSpline::NaturalCubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), m_(x.size(), 0.0) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("spline needs at least two knots with matching values");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x_[i] > x_[i - 1])) throw DomainError("spline knots must be strictly increasing");
    }
    if (n == 2) return;
    // Thomas algorithm for the interior second derivatives.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double h0 = x_[i] - x_[i - 1];
        double h1 = x_[i + 1] - x_[i];
        double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
        double rhs = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
        double denom = b - a * c[i - 1];
        c[i] = cc / denom;
        d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m_[i] = d[i] - c[i] * m_[i + 1];
        if (i == 1) break;
    }
}

double NaturalCubicSpline::operator()(double x) const noexcept {
    const std::size_t n = x_.size();
    if (x <= x_.front()) {
        double h = x_[1] - x_[0];
        double slope = (y_[1] - y_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0;
        return y_[0] + slope * (x - x_[0]);
    }
    if (x >= x_.back()) {
        double h = x_[n - 1] - x_[n - 2];
        double slope = (y_[n - 1] - y_[n - 2]) / h + h * (m_[n - 2] + 2.0 * m_[n - 1]) / 6.0;
        return y_[n - 1] + slope * (x - x_[n - 1]);
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    double h = x_[i + 1] - x_[i];
    double a = (x_[i + 1] - x) / h;
    double b = (x - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

}  // namespace lobsim
