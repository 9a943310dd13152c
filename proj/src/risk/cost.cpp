#include "lobsim/risk/cost.hpp"

#include <fmt/format.h>

namespace lobsim {

Shortfall implementation_shortfall(std::span<const Fill> fills, double reference, Side side) {
    Shortfall s;
    double pv = 0.0, v = 0.0;
    for (const auto& f : fills) {
        pv += static_cast<double>(f.price) * static_cast<double>(f.quantity);
        v += static_cast<double>(f.quantity);
    }
    if (v <= 0.0) return s;
    s.raw = pv / v - reference;
    s.cost = side_sign(side) * s.raw;
    s.bps = reference != 0.0 ? 1e4 * s.cost / reference : 0.0;
    s.valid = true;
    return s;
}

CostRecord decompose(std::span<const Fill> fills, std::span<const double> baseline_mids, double reference, Side side) {
    CostRecord c;
    c.reference = reference;
    double v = 0.0, pv = 0.0, bv = 0.0, dv = 0.0;
    for (const auto& f : fills) {
        if (f.step < 0 || static_cast<std::size_t>(f.step) >= baseline_mids.size()) {
            throw DomainError(fmt::format("fill at step {} has no baseline mid", f.step));
        }
        const double q = static_cast<double>(f.quantity);
        const double pb = baseline_mids[static_cast<std::size_t>(f.step)];
        v += q;
        pv += static_cast<double>(f.price) * q;
        bv += pb * q;
        dv += (static_cast<double>(f.price) - pb) * q;
        c.executed += f.quantity;
    }
    if (v <= 0.0) return c;
    const double s = side_sign(side);
    c.zeta = s * (pv / v - reference);
    c.zeta_mr = s * (bv / v - reference);
    c.zeta_mi = s * (dv / v);
    if (reference != 0.0) {
        c.zeta_bps = 1e4 * c.zeta / reference;
        c.mr_bps = 1e4 * c.zeta_mr / reference;
        c.mi_bps = 1e4 * c.zeta_mi / reference;
    }
    c.valid = true;
    return c;
}

}  // namespace lobsim
