#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobsim/calib/impact_model.hpp"
#include "lobsim/core/session.hpp"
#include "lobsim/data/book_rebuild.hpp"
#include "lobsim/sim/simulator.hpp"

namespace lobsim {

/// One aggregation window: signed traded volume and the mid change over it.
struct ImpactSample {
    double excess_demand = 0.0;
    double price_change = 0.0;
};

struct ImpactFit {
    ImpactModel model;  // the one to use downstream
    std::string method; // "loglog" or "nls"
    ImpactModel loglog;
    ImpactModel nls;
    bool loglog_ok = false;
    bool nls_ok = false;
    double r2_loglog = 0.0;  // in log space, sign-consistent windows
    double r2_nls = 0.0;     // in price space, all windows
    std::size_t windows = 0;
    std::size_t sign_consistent = 0;
};

inline constexpr std::size_t kMinImpactWindows = 100;

/// Log-log least squares over windows where the price moved with the excess
/// demand, plus direct nonlinear least squares over all windows. The log-log
/// estimate is used unless it is unavailable or outside the valid range.
/// With a fixed exponent only the scale is fitted, by least squares in
/// price space. Throws DomainError on
/// fewer than kMinImpactWindows windows with nonzero excess demand.
ImpactFit fit_impact_samples(std::span<const ImpactSample> samples, std::optional<double> fixed_exponent = {});

/// Windows of `window_ns` over historical data: excess demand from the
/// inferred market orders, mid change between the mids prevailing at the
/// window edges. Windows without trades are dropped.
std::vector<ImpactSample> impact_samples(std::span<const HistoricalMarketOrder> market_orders,
                                         std::span<const L2Row> l2, std::int64_t window_ns);

/// Same windows over a simulated path; needs recorded trades.
std::vector<ImpactSample> impact_samples(const PathRecord& path, Step window_steps);

ImpactFit fit_impact(std::span<const HistoricalMarketOrder> market_orders, std::span<const L2Row> l2,
                     std::int64_t window_ns = 1'000'000'000);

}  // namespace lobsim
