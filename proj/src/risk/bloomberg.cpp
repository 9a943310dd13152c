#include "lobsim/risk/bloomberg.hpp"

#include <cmath>

#include "lobsim/core/types.hpp"

namespace lobsim {

double bloomberg_tc(double quantity, const BloombergTCParams& p) {
    if (!(p.adv > 0.0)) throw DomainError("Bloomberg TC needs a positive ADV");
    if (quantity < 0.0) throw DomainError("Bloomberg TC needs a non-negative quantity");
    double impact = quantity > 0.0 ? p.alpha * std::pow(p.sigma_daily, p.delta) * std::pow(quantity / p.adv, p.gamma) : 0.0;
    return impact + p.beta * p.spread;
}

}  // namespace lobsim
