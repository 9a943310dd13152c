#pragma once

namespace lobsim {

/// TC = alpha * sigma^delta * (Q / ADV)^gamma + beta * spread, in the units
/// of sigma and spread.
struct BloombergTCParams {
    double alpha = 1.0 / 3.0;
    double delta = 1.0;
    double gamma = 0.5;
    double beta = 0.5;
    double sigma_daily = 0.0;
    double adv = 0.0;
    double spread = 0.0;
};

/// Throws DomainError when ADV is not positive.
double bloomberg_tc(double quantity, const BloombergTCParams& p);

}  // namespace lobsim
