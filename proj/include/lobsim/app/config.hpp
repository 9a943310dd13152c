#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lobsim/risk/bloomberg.hpp"
#include "lobsim/sim/simulator.hpp"
#include "lobsim/sim/synthetic.hpp"

namespace lobsim {

/// One execution strategy. Times are seconds of trading time; for
/// daily_vwap the horizon is one session per entry of `fractions`.
struct StrategySpec {
    std::string id = "uniform";
    std::string type = "uniform";  // uniform | daily_vwap
    double interval_s = 10.0;
    std::vector<double> fractions;
    Side side = Side::Sell;
    Qty quantity = 0;
    double start_s = 0.0;
    double horizon_s = 300.0;
};

struct DayFiles {
    std::string ticks;
    std::string trades;
};

struct DataSpec {
    std::vector<DayFiles> days;
    std::string extraction_dir;  // ingest output, calibrate input
};

struct CalibrationSpec {
    std::size_t surrogate_iterations = 20;  // on top of the design
    std::size_t design_size = 0;            // 0: ten per free dimension
    int runs_per_point = 5;
    double impact_window_s = 1.0;
    double bounds_low = 0.5;  // multiples of the starting parameters
    double bounds_high = 2.0;
    int placement_window_minutes = 30;
};

struct SurfaceGridSpec {
    std::vector<double> horizons_s{60.0, 300.0};
    std::vector<Qty> sizes{100, 200};
    double interval_s = 10.0;
    Side side = Side::Sell;
    double start_s = 60.0;
    std::size_t n_runs = 400;
    double full_execution_pct = 99.0;
    std::optional<BloombergTCParams> bloomberg;
};

struct FrontierSpec {
    std::size_t n_runs = 50;
    std::vector<double> lambdas{0.0, 0.001, 0.01, 0.1, 1.0};
};

struct ImpactSpec {
    std::size_t n_runs = 50;
    double tail_s = 300.0;  // curve extends this far past the latest execution end
};

struct RunConfig {
    std::vector<SessionWindow> windows{{9 * 60 + 15, 16 * 60 + 30}};
    int step_ms = 20;
    double tick_size = 1.0;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string output_dir = "out";
    std::string bundle;  // empty: synthetic market

    SyntheticSpec synthetic;
    SimConfig sim;  // calendar is rebuilt from windows/step_ms
    std::map<std::string, double> chiarella_overrides;
    std::size_t simulate_runs = 1;

    DataSpec data;
    CalibrationSpec calibration;
    std::vector<StrategySpec> strategies;
    SurfaceGridSpec surface;
    FrontierSpec frontier;
    ImpactSpec impact;

    SessionCalendar calendar() const { return SessionCalendar(windows, step_ms); }
    Step to_steps(double seconds) const;
};

/// Throws ConfigError on malformed input or unknown keys.
RunConfig parse_config(const std::string& yaml_text);
RunConfig load_config(const std::string& path);

/// Every key with its default, commented.
std::string example_config();

/// FNV-1a over the text, hex.
std::string config_hash(const std::string& text);

void apply_chiarella_overrides(ChiarellaParams& p, const std::map<std::string, double>& overrides);

ExecutionSchedule build_strategy(const StrategySpec& s, const RunConfig& cfg, const RateProfile& profile);

}  // namespace lobsim
