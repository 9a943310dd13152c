#include "lobsim/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace lobsim {

namespace {

const char* kExample = R"(# lobsim run configuration. Every key is optional; values shown are defaults.
seed: 1                 # master seed, recorded in every output
threads: 0              # worker cap, 0 = all cores
output_dir: out
bundle: ""              # calibration bundle directory; empty = synthetic market

session:
  windows: ["09:15-16:30"]
  step_ms: 20
  tick_size: 1.0

synthetic:              # used when no bundle is given
  limit_per_step: 1.0
  market_per_step: 0.1
  u_shape: 0.5
  depth_mean: 2.0
  limit_volume_max: 5
  market_volume_max: 5
  duration_mean: 100.0
  open_bid: 18999
  open_ask: 19001
  open_levels: 10
  open_level_volume: 100
  impact_scale: 0.025
  impact_exponent: 0.5
  sigma_v: 0.05
  placement_samples: 20000
  seed: 1

simulation:
  days: 1
  mode: chiarella       # chiarella | zi
  warmup_steps: 1000
  max_steps: 0          # 0 = whole sessions
  drift: 0.0            # fundamental drift per step
  runs: 1               # paths written by `simulate`
  record_events: false
  agents:
    fundamental: 1
    momentum_hf: 1
    momentum_lf: 1
    noise: 1
    zi: 1
  chiarella: {}         # overrides, e.g. {kappa: 0.011, sigma: 0.249}
  zi:
    alpha: 0.5
    mu: 0.05
    delta: 0.002
    lambda: 0.5
    limit_volume_max: 1
    market_volume_max: 1
    use_rate_profile: false
    cancel: duration    # duration | per_step

data:
  days: []              # [{ticks: day0_ticks.csv, trades: day0_trades.csv}]
  extraction_dir: ""

calibration:
  surrogate_iterations: 20
  design_size: 0        # 0 = ten points per free dimension
  runs_per_point: 5
  impact_window_s: 1.0
  bounds_low: 0.5
  bounds_high: 2.0
  placement_window_minutes: 30

strategies:             # used by simulate, impact and frontier
  - id: uniform
    type: uniform       # uniform | daily_vwap
    interval_s: 10
    side: sell
    quantity: 300
    start_s: 60
    horizon_s: 300
    fractions: []       # daily_vwap: one fraction per session

impact:
  n_runs: 50
  tail_s: 300

surface:
  horizons_s: [60, 300]
  sizes: [100, 200]
  interval_s: 10
  side: sell
  start_s: 60
  n_runs: 400
  full_execution_pct: 99.0
  bloomberg: null       # {sigma_daily: 432.7, adv: 100000, spread: 2, alpha: 0.3333, delta: 1, gamma: 0.5, beta: 0.5}

frontier:
  n_runs: 50
  lambdas: [0, 0.001, 0.01, 0.1, 1]
)";

std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    return m.is_null() ? std::string{} : fmt::format(" (line {})", m.line + 1);
}

void check_keys(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!node) return;
    if (!node.IsMap()) throw ConfigError(fmt::format("'{}' must be a mapping{}", section, where(node)));
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        auto key = kv.first.as<std::string>();
        if (!ok.count(key)) {
            throw ConfigError(fmt::format("unknown key '{}' in {}{}", key, section.empty() ? "config" : section,
                                          where(kv.first)));
        }
    }
}

template <class T>
void get(const YAML::Node& parent, const char* key, T& out) {
    const YAML::Node n = parent[key];
    if (!n || n.IsNull()) return;
    try {
        out = n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(fmt::format("bad value for '{}'{}", key, where(n)));
    }
}

void get_side(const YAML::Node& parent, const char* key, Side& out) {
    std::string s;
    get(parent, key, s);
    if (s.empty()) return;
    try {
        out = parse_side(s);
    } catch (const Error&) {
        throw ConfigError(fmt::format("'{}' must be buy or sell, got '{}'", key, s));
    }
}

void parse_session(const YAML::Node& n, RunConfig& c) {
    check_keys(n, "session", {"windows", "step_ms", "tick_size"});
    if (!n) return;
    std::vector<std::string> w;
    get(n, "windows", w);
    if (!w.empty()) {
        c.windows.clear();
        for (const auto& s : w) {
            try {
                c.windows.push_back(parse_window(s));
            } catch (const Error& e) {
                throw ConfigError(fmt::format("session window '{}': {}", s, e.what()));
            }
        }
    }
    get(n, "step_ms", c.step_ms);
    get(n, "tick_size", c.tick_size);
}

void parse_synthetic(const YAML::Node& n, SyntheticSpec& s) {
    check_keys(n, "synthetic",
               {"limit_per_step", "market_per_step", "u_shape", "depth_mean", "limit_volume_max", "market_volume_max",
                "duration_mean", "open_bid", "open_ask", "open_levels", "open_level_volume", "impact_scale",
                "impact_exponent", "sigma_v", "placement_samples", "seed"});
    if (!n) return;
    get(n, "limit_per_step", s.limit_per_step);
    get(n, "market_per_step", s.market_per_step);
    get(n, "u_shape", s.u_shape);
    get(n, "depth_mean", s.depth_mean);
    get(n, "limit_volume_max", s.limit_volume_max);
    get(n, "market_volume_max", s.market_volume_max);
    get(n, "duration_mean", s.duration_mean);
    get(n, "open_bid", s.open_bid);
    get(n, "open_ask", s.open_ask);
    get(n, "open_levels", s.open_levels);
    get(n, "open_level_volume", s.open_level_volume);
    get(n, "impact_scale", s.impact.scale);
    get(n, "impact_exponent", s.impact.exponent);
    get(n, "sigma_v", s.sigma_v);
    get(n, "placement_samples", s.placement_samples);
    get(n, "seed", s.seed);
}

void parse_simulation(const YAML::Node& n, RunConfig& c) {
    check_keys(n, "simulation",
               {"days", "mode", "warmup_steps", "max_steps", "drift", "runs", "record_events", "agents", "chiarella",
                "zi"});
    if (!n) return;
    SimConfig& s = c.sim;
    get(n, "days", s.days);
    std::string mode;
    get(n, "mode", mode);
    if (mode == "chiarella") {
        s.mode = ModelMode::Chiarella;
    } else if (mode == "zi") {
        s.mode = ModelMode::ZeroIntelligence;
    } else if (!mode.empty()) {
        throw ConfigError(fmt::format("simulation.mode must be chiarella or zi, got '{}'", mode));
    }
    get(n, "warmup_steps", s.warmup_steps);
    get(n, "max_steps", s.max_steps);
    get(n, "drift", s.drift);
    get(n, "runs", c.simulate_runs);
    get(n, "record_events", s.record.events);

    const YAML::Node a = n["agents"];
    check_keys(a, "simulation.agents", {"fundamental", "momentum_hf", "momentum_lf", "noise", "zi"});
    if (a) {
        get(a, "fundamental", s.agents.fundamental);
        get(a, "momentum_hf", s.agents.momentum_hf);
        get(a, "momentum_lf", s.agents.momentum_lf);
        get(a, "noise", s.agents.noise);
        get(a, "zi", s.agents.zi);
    }
    const YAML::Node ch = n["chiarella"];
    check_keys(ch, "simulation.chiarella",
               {"kappa", "beta_h", "gamma_h", "eta_h", "beta_l", "gamma_l", "eta_l", "sigma"});
    if (ch) {
        for (const auto& kv : ch) {
            double v = 0.0;
            try {
                v = kv.second.as<double>();
            } catch (const YAML::Exception&) {
                throw ConfigError(fmt::format("bad value for chiarella.{}{}", kv.first.as<std::string>(),
                                              where(kv.second)));
            }
            c.chiarella_overrides[kv.first.as<std::string>()] = v;
        }
    }
    const YAML::Node z = n["zi"];
    check_keys(z, "simulation.zi",
               {"alpha", "mu", "delta", "lambda", "limit_volume_max", "market_volume_max", "use_rate_profile",
                "cancel"});
    if (z) {
        get(z, "alpha", s.zi.alpha);
        get(z, "mu", s.zi.mu);
        get(z, "delta", s.zi.delta);
        get(z, "lambda", s.zi.lambda);
        get(z, "limit_volume_max", s.zi.limit_volume_max);
        get(z, "market_volume_max", s.zi.market_volume_max);
        get(z, "use_rate_profile", s.zi_use_rate_profile);
        std::string cancel;
        get(z, "cancel", cancel);
        if (cancel == "duration") {
            s.zi_cancel = ZiCancelMode::Duration;
        } else if (cancel == "per_step") {
            s.zi_cancel = ZiCancelMode::PerStep;
        } else if (!cancel.empty()) {
            throw ConfigError(fmt::format("simulation.zi.cancel must be duration or per_step, got '{}'", cancel));
        }
    }
}

void parse_data(const YAML::Node& n, DataSpec& d) {
    check_keys(n, "data", {"days", "extraction_dir"});
    if (!n) return;
    get(n, "extraction_dir", d.extraction_dir);
    const YAML::Node days = n["days"];
    if (!days || days.IsNull()) return;
    if (!days.IsSequence()) throw ConfigError("data.days must be a list");
    for (const auto& day : days) {
        check_keys(day, "data.days[]", {"ticks", "trades"});
        DayFiles f;
        get(day, "ticks", f.ticks);
        get(day, "trades", f.trades);
        if (f.ticks.empty() || f.trades.empty()) throw ConfigError("each data.days entry needs ticks and trades");
        d.days.push_back(f);
    }
}

void parse_calibration(const YAML::Node& n, CalibrationSpec& c) {
    check_keys(n, "calibration",
               {"surrogate_iterations", "design_size", "runs_per_point", "impact_window_s", "bounds_low",
                "bounds_high", "placement_window_minutes"});
    if (!n) return;
    get(n, "surrogate_iterations", c.surrogate_iterations);
    get(n, "design_size", c.design_size);
    get(n, "runs_per_point", c.runs_per_point);
    get(n, "impact_window_s", c.impact_window_s);
    get(n, "bounds_low", c.bounds_low);
    get(n, "bounds_high", c.bounds_high);
    get(n, "placement_window_minutes", c.placement_window_minutes);
}

StrategySpec parse_strategy(const YAML::Node& n) {
    check_keys(n, "strategies[]",
               {"id", "type", "interval_s", "fractions", "side", "quantity", "start_s", "horizon_s"});
    StrategySpec s;
    get(n, "id", s.id);
    get(n, "type", s.type);
    if (s.type != "uniform" && s.type != "daily_vwap") {
        throw ConfigError(fmt::format("strategy '{}': type must be uniform or daily_vwap", s.id));
    }
    get(n, "interval_s", s.interval_s);
    get(n, "fractions", s.fractions);
    get_side(n, "side", s.side);
    get(n, "quantity", s.quantity);
    get(n, "start_s", s.start_s);
    get(n, "horizon_s", s.horizon_s);
    if (s.type == "daily_vwap" && s.fractions.empty()) {
        throw ConfigError(fmt::format("strategy '{}': daily_vwap needs fractions", s.id));
    }
    return s;
}

void parse_bloomberg(const YAML::Node& n, std::optional<BloombergTCParams>& out) {
    if (!n || n.IsNull()) return;
    check_keys(n, "surface.bloomberg", {"alpha", "delta", "gamma", "beta", "sigma_daily", "adv", "spread"});
    BloombergTCParams p;
    get(n, "alpha", p.alpha);
    get(n, "delta", p.delta);
    get(n, "gamma", p.gamma);
    get(n, "beta", p.beta);
    get(n, "sigma_daily", p.sigma_daily);
    get(n, "adv", p.adv);
    get(n, "spread", p.spread);
    if (!(p.adv > 0.0)) throw ConfigError("surface.bloomberg.adv must be positive");
    out = p;
}

void validate(const RunConfig& c) {
    if (c.step_ms <= 0 || 1000 % c.step_ms != 0) throw ConfigError("session.step_ms must divide 1000");
    if (!(c.tick_size > 0.0)) throw ConfigError("session.tick_size must be positive");
    if (c.sim.days < 1) throw ConfigError("simulation.days must be at least 1");
    if (c.simulate_runs < 1) throw ConfigError("simulation.runs must be at least 1");
    if (c.calibration.runs_per_point < 1) throw ConfigError("calibration.runs_per_point must be at least 1");
    if (!(c.calibration.bounds_low > 0.0 && c.calibration.bounds_low < 1.0 && c.calibration.bounds_high > 1.0)) {
        throw ConfigError("calibration bounds must satisfy 0 < bounds_low < 1 < bounds_high");
    }
    std::set<std::string> ids;
    for (const auto& s : c.strategies) {
        if (!ids.insert(s.id).second) throw ConfigError(fmt::format("duplicate strategy id '{}'", s.id));
        if (s.quantity < 0) throw ConfigError(fmt::format("strategy '{}': negative quantity", s.id));
        if (!(s.interval_s > 0.0)) throw ConfigError(fmt::format("strategy '{}': interval_s must be positive", s.id));
    }
    if (c.surface.n_runs < 2) throw ConfigError("surface.n_runs must be at least 2");
    if (c.frontier.n_runs < 1 || c.impact.n_runs < 1) throw ConfigError("n_runs must be positive");
    for (double l : c.frontier.lambdas) {
        if (l < 0.0) throw ConfigError("frontier.lambdas must be non-negative");
    }
}

}  // namespace

Step RunConfig::to_steps(double seconds) const {
    return static_cast<Step>(std::llround(seconds * 1000.0 / step_ms));
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
    }
    RunConfig c;
    c.sim.chiarella = synthetic_chiarella();
    c.strategies.push_back(StrategySpec{"uniform", "uniform", 10.0, {}, Side::Sell, 300, 60.0, 300.0});
    if (!root || root.IsNull()) return c;
    check_keys(root, "",
               {"seed", "threads", "output_dir", "bundle", "session", "synthetic", "simulation", "data",
                "calibration", "strategies", "impact", "surface", "frontier"});
    get(root, "seed", c.seed);
    get(root, "threads", c.threads);
    get(root, "output_dir", c.output_dir);
    get(root, "bundle", c.bundle);
    parse_session(root["session"], c);
    parse_synthetic(root["synthetic"], c.synthetic);
    parse_simulation(root["simulation"], c);
    parse_data(root["data"], c.data);
    parse_calibration(root["calibration"], c.calibration);

    if (const YAML::Node st = root["strategies"]; st && !st.IsNull()) {
        if (!st.IsSequence()) throw ConfigError("strategies must be a list");
        c.strategies.clear();
        for (const auto& s : st) c.strategies.push_back(parse_strategy(s));
    }
    if (const YAML::Node im = root["impact"]) {
        check_keys(im, "impact", {"n_runs", "tail_s"});
        get(im, "n_runs", c.impact.n_runs);
        get(im, "tail_s", c.impact.tail_s);
    }
    if (const YAML::Node su = root["surface"]) {
        check_keys(su, "surface",
                   {"horizons_s", "sizes", "interval_s", "side", "start_s", "n_runs", "full_execution_pct",
                    "bloomberg"});
        get(su, "horizons_s", c.surface.horizons_s);
        get(su, "sizes", c.surface.sizes);
        get(su, "interval_s", c.surface.interval_s);
        get_side(su, "side", c.surface.side);
        get(su, "start_s", c.surface.start_s);
        get(su, "n_runs", c.surface.n_runs);
        get(su, "full_execution_pct", c.surface.full_execution_pct);
        parse_bloomberg(su["bloomberg"], c.surface.bloomberg);
    }
    if (const YAML::Node fr = root["frontier"]) {
        check_keys(fr, "frontier", {"n_runs", "lambdas"});
        get(fr, "n_runs", c.frontier.n_runs);
        get(fr, "lambdas", c.frontier.lambdas);
    }
    c.synthetic.windows = c.windows;
    c.synthetic.step_ms = c.step_ms;
    validate(c);
    c.sim.calendar = c.calendar();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open config {}", path));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string example_config() { return kExample; }

std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

void apply_chiarella_overrides(ChiarellaParams& p, const std::map<std::string, double>& o) {
    for (const auto& [k, v] : o) {
        if (k == "kappa") p.kappa = v;
        else if (k == "beta_h") p.beta_h = v;
        else if (k == "gamma_h") p.gamma_h = v;
        else if (k == "eta_h") p.eta_h = v;
        else if (k == "beta_l") p.beta_l = v;
        else if (k == "gamma_l") p.gamma_l = v;
        else if (k == "eta_l") p.eta_l = v;
        else if (k == "sigma") p.sigma = v;
        else throw ConfigError(fmt::format("unknown Chiarella parameter '{}'", k));
    }
}

ExecutionSchedule build_strategy(const StrategySpec& s, const RunConfig& cfg, const RateProfile& profile) {
    MetaOrder m{s.side, s.quantity, cfg.to_steps(s.start_s), std::max<Step>(1, cfg.to_steps(s.horizon_s)), s.id};
    const Step interval = std::max<Step>(1, cfg.to_steps(s.interval_s));
    if (s.type == "daily_vwap") {
        const SessionCalendar cal = cfg.calendar();
        return build_daily_schedule(m, s.fractions, profile, cal, interval);
    }
    return build_uniform_schedule(m, interval);
}

}  // namespace lobsim
