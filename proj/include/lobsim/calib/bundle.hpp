#pragma once

#include <string>
#include <vector>

#include "lobsim/agents/placement.hpp"
#include "lobsim/agents/rate_profile.hpp"
#include "lobsim/calib/chiarella_calibration.hpp"
#include "lobsim/calib/fundamental.hpp"
#include "lobsim/calib/impact_fit.hpp"
#include "lobsim/core/session.hpp"
#include "lobsim/sim/simulator.hpp"

namespace lobsim {

inline constexpr int kBundleVersion = 1;

/// Everything calibration produces, persisted as a directory of CSV files
/// plus bundle.json.
struct CalibrationBundle {
    std::vector<SessionWindow> windows;
    int step_ms = 20;
    RateProfile rates;
    EmpiricalOrderDistribution placement;
    ImpactFit impact;
    FundamentalProxy proxy;
    double initial_fundamental = 0.0;
    ChiarellaParams chiarella;
    double distance = 0.0;
    std::uint64_t calibration_seed = 0;
    std::vector<CalibrationRecord> evaluation_log;
    std::vector<PriceLevel> opening_bids;
    std::vector<PriceLevel> opening_asks;

    SessionCalendar calendar() const { return SessionCalendar(windows, step_ms); }
    MarketModel market_model() const;
};

/// `provenance`, when non-empty, is written as a leading '#' comment line of
/// every CSV.
void write_bundle(const std::string& dir, const CalibrationBundle& bundle, const std::string& provenance = {});

/// Validates the schema of every artifact; a missing one is an IoError that
/// names it.
CalibrationBundle read_bundle(const std::string& dir);

}  // namespace lobsim
