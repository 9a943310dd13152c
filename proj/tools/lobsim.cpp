#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lobsim/app/commands.hpp"

using namespace lobsim;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;
};

RunContext make_context(const Flags& f) {
    std::string text;
    if (!f.config.empty()) {
        std::ifstream in(f.config, std::ios::binary);
        if (!in) throw IoError(fmt::format("cannot open config {}", f.config));
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    RunContext ctx;
    ctx.config = parse_config(text);
    ctx.config_hash = config_hash(text);
    if (f.seed) ctx.config.seed = *f.seed;
    if (f.threads) ctx.config.threads = *f.threads;
    if (!f.out.empty()) ctx.config.output_dir = f.out;
    ctx.out = ctx.config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", ctx.out.string(), ec.message()));
    return ctx;
}

using Command = CommandResult (*)(const RunContext&);

int run(const std::string& name, Command cmd, const Flags& flags) {
    const auto t0 = std::chrono::steady_clock::now();
    RunContext ctx = make_context(flags);
    CommandResult res = cmd(ctx);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(ctx, name, res, wall);
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << fmt::format("{}: {} outputs in {} ({:.1f}s)\n", name, res.outputs.size(), ctx.out.string(), wall);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Agent-based limit order book simulator and liquidity risk engine"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lobsim_version());

    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config, "YAML run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
        sub->add_option("--threads", flags.threads, "worker cap, 0 = all cores");
        sub->add_option("--out", flags.out, "output directory (overrides the config)");
    };

    struct Entry {
        const char* name;
        const char* help;
        Command cmd;
    };
    const Entry entries[] = {
        {"ingest", "rebuild books and extract orders from tick files", cmd_ingest},
        {"calibrate", "calibrate a bundle from extracted data", cmd_calibrate},
        {"simulate", "simulate market paths", cmd_simulate},
        {"impact", "mean baseline and counterfactual mid curves per strategy", cmd_impact},
        {"surface", "liquidity risk surface over horizon and size", cmd_surface},
        {"frontier", "efficient frontier over the configured strategies", cmd_frontier},
        {"synth", "write synthetic tick and trade files", cmd_synth},
    };
    std::vector<std::pair<CLI::App*, const Entry*>> subs;
    for (const auto& e : entries) {
        auto* sub = app.add_subcommand(e.name, e.help);
        add_common(sub);
        subs.emplace_back(sub, &e);
    }
    bool example = false;
    auto* config_cmd = app.add_subcommand("config", "configuration helpers");
    config_cmd->add_flag("--example", example, "print a configuration with every default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (config_cmd->parsed()) {
            if (!example) {
                std::cerr << "config: nothing to do (try --example)\n";
                return 2;
            }
            std::cout << example_config();
            return 0;
        }
        for (const auto& [sub, e] : subs) {
            if (sub->parsed()) return run(e->name, e->cmd, flags);
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
