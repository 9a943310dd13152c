#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lobsim/risk/bloomberg.hpp"
#include "lobsim/risk/montecarlo.hpp"

namespace lobsim {

struct SurfaceSpec {
    std::vector<Step> horizons;
    std::vector<Qty> sizes;
    Step interval_steps = 250;
    Side side = Side::Sell;
    Step start_step = 0;
    std::size_t n_runs = 400;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    double full_execution_pct = 99.0;  // cells at or above count as fully executed
    std::optional<BloombergTCParams> bloomberg;  // adds the comparison column
};

struct SurfaceCell {
    Step horizon = 0;
    Qty size = 0;
    double mean_cost_mi_bps = 0.0;
    double se_cost_mi_bps = 0.0;
    double std_cost_bps = 0.0;
    double pct_executed = 0.0;  // 0..100
    std::size_t n_runs = 0;
    std::size_t valid_runs = 0;
    double reference = 0.0;  // mean p_R
    bool extrapolated = false;
    std::optional<double> bloomberg_tc_bps;
    std::vector<CostRecord> costs;
};

/// Horizon-major grid of cells.
struct LiquidityRiskSurface {
    std::vector<Step> horizons;
    std::vector<Qty> sizes;
    std::vector<SurfaceCell> cells;

    const SurfaceCell& cell(std::size_t h, std::size_t s) const { return cells[h * sizes.size() + s]; }
};

/// Uniform liquidation of every (horizon, size) cell. The simulation is
/// lengthened to cover the longest horizon when needed. Cells below
/// full_execution_pct take their mean and std from a natural cubic spline
/// along size through the fully executed cells of the same horizon.
LiquidityRiskSurface build_surface(const SimConfig& config, const MarketModel& model, const SurfaceSpec& spec);

void write_surface_csv(const std::filesystem::path& path, const LiquidityRiskSurface& surface,
                       const std::string& header_comment);

}  // namespace lobsim
