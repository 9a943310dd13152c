#pragma once

#include <span>

#include "lobsim/exec/schedule.hpp"

namespace lobsim {

/// raw = VWAP - reference. cost is positive when adverse: raw for buys,
/// -raw for sells.
struct Shortfall {
    double raw = 0.0;
    double cost = 0.0;
    double bps = 0.0;
    bool valid = false;  // false when there were no fills
};

Shortfall implementation_shortfall(std::span<const Fill> fills, double reference, Side side);

/// Per-run cost split into market risk (baseline drift against the
/// reference) and market impact (fills against the baseline mid at the fill
/// step). All three are positive-adverse and zeta = mr + mi.
struct CostRecord {
    double reference = 0.0;
    double zeta = 0.0;
    double zeta_mr = 0.0;
    double zeta_mi = 0.0;
    double zeta_bps = 0.0;
    double mr_bps = 0.0;
    double mi_bps = 0.0;
    double executed_fraction = 0.0;
    Qty executed = 0;
    bool valid = false;
};

/// Throws DomainError when a fill step has no baseline mid.
CostRecord decompose(std::span<const Fill> fills, std::span<const double> baseline_mids, double reference, Side side);

}  // namespace lobsim
