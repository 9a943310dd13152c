#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lobsim/app/config.hpp"

namespace lobsim {

/// A loaded config plus where outputs go.
struct RunContext {
    RunConfig config;
    std::string config_hash;
    std::filesystem::path out;

    /// `seed=N config_hash=H`, the first comment line of every CSV.
    std::string header() const;
};

struct CommandResult {
    std::vector<std::string> outputs;  // relative to the output directory
    std::vector<std::string> warnings;
};

const char* lobsim_version() noexcept;

/// Market model and simulation settings from the bundle when one is
/// configured, else the synthetic market. Chiarella overrides apply last.
MarketModel resolve_market(const RunConfig& config, SimConfig& sim);

CommandResult cmd_synth(const RunContext& ctx);
CommandResult cmd_ingest(const RunContext& ctx);
CommandResult cmd_calibrate(const RunContext& ctx);
CommandResult cmd_simulate(const RunContext& ctx);
CommandResult cmd_impact(const RunContext& ctx);
CommandResult cmd_surface(const RunContext& ctx);
CommandResult cmd_frontier(const RunContext& ctx);

/// manifest.json: command, version, seed, threads, config hash, wall time,
/// outputs and warnings.
void write_manifest(const RunContext& ctx, const std::string& command, const CommandResult& result,
                    double wall_seconds);

}  // namespace lobsim
