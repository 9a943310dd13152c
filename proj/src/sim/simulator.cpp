#include "lobsim/sim/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace lobsim {

Step SimConfig::total_steps() const noexcept {
    Step full = static_cast<Step>(days) * calendar.steps_per_day();
    return max_steps > 0 ? std::min(full, max_steps) : full;
}

double MarketModel::opening_mid() const {
    if (opening_bids.empty() || opening_asks.empty()) throw DomainError("opening book must have both sides");
    return 0.5 * static_cast<double>(opening_bids.front().price + opening_asks.front().price);
}

namespace {

enum class AgentKind : std::uint8_t { Fundamental, MomentumHF, MomentumLF, Noise, ZI };

struct Agent {
    AgentKind kind;
    AgentId id;
    std::uint64_t seed;
    OrderId next_order;
    MomentumState momentum;
};

struct Quotes {
    Price bid = 0;
    Price ask = 0;
    double mid = 0.0;
    Price spread() const noexcept { return ask - bid; }
};

Step zi_lifetime(double delta, RandomStream& rng) {
    return std::max<Step>(1, static_cast<Step>(std::ceil(rng.exponential(-std::log1p(-delta)))));
}

std::vector<Agent> build_agents(const SimConfig& cfg, const SeedSet& seeds) {
    std::vector<Agent> agents;
    auto add = [&](AgentKind kind, int count) {
        for (int i = 0; i < count; ++i) {
            std::size_t idx = agents.size();
            agents.push_back({kind, static_cast<AgentId>(idx + 1), seeds.agent(idx), agent_id_base(idx), {}});
        }
    };
    if (cfg.mode == ModelMode::Chiarella) {
        add(AgentKind::Fundamental, cfg.agents.fundamental);
        add(AgentKind::MomentumHF, cfg.agents.momentum_hf);
        add(AgentKind::MomentumLF, cfg.agents.momentum_lf);
        add(AgentKind::Noise, cfg.agents.noise);
    } else {
        add(AgentKind::ZI, cfg.agents.zi);
    }
    return agents;
}

}  // namespace

PathRecord run_simulation(const SimConfig& cfg, const MarketModel& model, const SeedSet& seeds,
                          const ExecutionSchedule* schedule) {
    const Step total = cfg.total_steps();
    if (total <= 0) throw ConfigError("simulation has no steps");
    if (cfg.mode == ModelMode::Chiarella) {
        cfg.chiarella.validate();
        if (!model.placement.has_limits() || !model.placement.has_markets()) {
            throw ConfigError("placement distribution is empty");
        }
    } else {
        cfg.zi.validate();
    }
    const auto& cal = cfg.calendar;
    const bool per_step_cancel = cfg.mode == ModelMode::ZeroIntelligence && cfg.zi_cancel == ZiCancelMode::PerStep;

    PathRecord rec;
    rec.steps = total;
    rec.warmup = std::min(cfg.warmup_steps, total);
    rec.mids.resize(static_cast<std::size_t>(total));
    if (cfg.record.spreads) rec.spreads.resize(static_cast<std::size_t>(total));
    if (cfg.record.fundamental) {
        rec.fundamental.resize(static_cast<std::size_t>(total));
        rec.reflexive.resize(static_cast<std::size_t>(total));
    }
    const auto minutes = static_cast<std::size_t>((total + cal.steps_per_minute() - 1) / cal.steps_per_minute());
    rec.limit_per_minute.assign(minutes, 0);
    rec.market_per_minute.assign(minutes, 0);

    OrderBook book;
    if (cfg.record.events) book.set_event_log(&rec.events);

    std::vector<OrderId> zi_resting;

    // Opening book: one resting order per historical level.
    {
        RandomStream rng(seeds.book_seeding());
        const Price open_spread = model.opening_asks.empty() || model.opening_bids.empty()
                                      ? 1
                                      : model.opening_asks.front().price - model.opening_bids.front().price;
        OrderId next = OrderId{1} << 40;
        auto seed_side = [&](const std::vector<PriceLevel>& levels, Side side) {
            for (const auto& lv : levels) {
                if (lv.volume <= 0 || lv.price <= 0) continue;
                Order o;
                o.id = next++;
                o.agent_id = 0;
                o.side = side;
                o.price = lv.price;
                o.quantity = lv.volume;
                o.submit_step = -1;
                if (cfg.mode == ModelMode::Chiarella) {
                    const auto& pool = model.placement.limit_pool(open_spread, cal.open_minute());
                    o.expiry_step = -1 + std::max<Step>(1, pool[rng.index(pool.size())].duration);
                } else if (!per_step_cancel) {
                    o.expiry_step = -1 + zi_lifetime(cfg.zi.delta, rng);
                } else {
                    zi_resting.push_back(o.id);
                }
                book.submit_limit(o);
            }
        };
        seed_side(model.opening_bids, Side::Buy);
        seed_side(model.opening_asks, Side::Sell);
    }
    if (!book.two_sided()) throw DomainError("opening book must have both sides");

    rec.opening_mid = book.last_mid();
    Quotes prev{*book.best_bid(), *book.best_ask(), book.last_mid()};
    double mid_before_prev = prev.mid;
    int last_move = 0;

    FundamentalState fs;
    fs.value = model.initial_fundamental != 0.0 ? model.initial_fundamental : rec.opening_mid;
    fs.drift = cfg.drift;
    fs.volatility = model.sigma_v;
    double excess_demand = 0.0;

    auto agents = build_agents(cfg, seeds);
    const std::size_t exec_index = agents.size();
    std::optional<ExecutionAgent> exec;
    OrderId exec_next = agent_id_base(exec_index);
    if (schedule != nullptr && !schedule->slices.empty()) {
        exec.emplace(*schedule, static_cast<AgentId>(exec_index + 1));
    }

    const std::uint64_t fundamental_seed = seeds.fundamental();
    const std::uint64_t cancel_seed = seeds.cancellation();

    std::vector<Trade> step_trades;

    for (Step t = 0; t < total; ++t) {
        book.expire_orders(t);

        if (per_step_cancel && !zi_resting.empty()) {
            RandomStream rng = step_stream(cancel_seed, t);
            std::size_t keep = 0;
            for (OrderId id : zi_resting) {
                if (!book.find(id)) continue;
                if (rng.uniform() < cfg.zi.delta) {
                    book.cancel(id, t);
                } else {
                    zi_resting[keep++] = id;
                }
            }
            zi_resting.resize(keep);
        }

        if (t > 0) {
            RandomStream rng = step_stream(fundamental_seed, t);
            update_fundamental(fs, rng);
        }
        update_reflexive(fs, excess_demand, model.impact);

        const int minute = cal.minute_of_day(t);
        const auto minute_index = static_cast<std::size_t>(cal.trading_minute(t));
        step_trades.clear();

        auto submit_limit = [&](Agent& a, Side side, Price price, Qty qty, std::optional<Step> life) {
            if (price <= 0 || qty <= 0) return;
            Order o;
            o.id = a.next_order++;
            o.agent_id = a.id;
            o.side = side;
            o.price = price;
            o.quantity = qty;
            o.submit_step = t;
            if (life) o.expiry_step = t + *life;
            auto r = book.submit_limit(o);
            ++rec.limit_per_minute[minute_index];
            step_trades.insert(step_trades.end(), r.trades.begin(), r.trades.end());
            if (per_step_cancel && r.queued > 0) zi_resting.push_back(o.id);
        };
        auto submit_market = [&](Agent& a, Side side, Qty qty) {
            if (qty <= 0) return;
            Order o;
            o.id = a.next_order++;
            o.agent_id = a.id;
            o.side = side;
            o.kind = OrderKind::Market;
            o.quantity = qty;
            o.submit_step = t;
            auto r = book.submit_market(o);
            ++rec.market_per_minute[minute_index];
            if (r.filled > 0) rec.order_signs.push_back(static_cast<std::int8_t>(side_sign(side)));
            step_trades.insert(step_trades.end(), r.trades.begin(), r.trades.end());
        };

        const double alpha = cfg.mode == ModelMode::Chiarella || cfg.zi_use_rate_profile ? model.rates.alpha_at(minute)
                                                                                         : cfg.zi.alpha;
        const double mu = cfg.mode == ModelMode::Chiarella || cfg.zi_use_rate_profile ? model.rates.mu_at(minute)
                                                                                      : cfg.zi.mu;
        const auto& cp = cfg.chiarella;

        for (auto& a : agents) {
            RandomStream rng = step_stream(a.seed, t);
            if (a.kind == AgentKind::ZI) {
                ZIParams p = cfg.zi;
                p.alpha = alpha;
                p.mu = mu;
                auto intents = zi_step(prev.mid, p, rng);
                for (const auto& in : intents) {
                    if (in.kind == OrderKind::Limit) {
                        submit_limit(a, in.side, in.price, in.quantity,
                                     per_step_cancel ? std::nullopt : std::optional<Step>(in.duration));
                    } else {
                        submit_market(a, in.side, in.quantity);
                    }
                }
                continue;
            }
            double demand = 0.0;
            switch (a.kind) {
                case AgentKind::Fundamental:
                    demand = fundamental_demand(fs, prev.bid, prev.ask, cp.kappa);
                    break;
                case AgentKind::MomentumHF:
                    demand = momentum_demand(a.momentum, mid_before_prev, prev.mid, cp.beta_h, cp.gamma_h, cp.eta_h);
                    break;
                case AgentKind::MomentumLF:
                    demand = momentum_demand(a.momentum, mid_before_prev, prev.mid, cp.beta_l, cp.gamma_l, cp.eta_l);
                    break;
                case AgentKind::Noise:
                    demand = noise_demand(cp.sigma, rng);
                    break;
                case AgentKind::ZI:
                    break;
            }
            auto d = demand_to_intents(demand, alpha, mu, rng);
            if (d.limit) {
                auto pl = sample_limit_placement(model.placement, prev.spread(), minute, d.side, prev.bid, prev.ask, rng);
                submit_limit(a, d.side, pl.price, pl.volume, pl.duration);
            }
            if (d.market) {
                submit_market(a, d.side, sample_market_volume(model.placement, prev.spread(), minute, rng));
            }
        }

        if (exec) {
            if (auto r = exec->act(t, book, exec_next)) {
                ++exec_next;
                if (r->filled > 0) rec.order_signs.push_back(static_cast<std::int8_t>(side_sign(schedule->side)));
                step_trades.insert(step_trades.end(), r->trades.begin(), r->trades.end());
            }
        }

        // Excess demand of this step, signed against the mid the agents saw.
        excess_demand = 0.0;
        for (const auto& tr : step_trades) {
            excess_demand += classify_trade_sign(static_cast<double>(tr.price), prev.mid, last_move) *
                             static_cast<double>(tr.quantity);
        }

        const double mid = book.last_mid();
        rec.mids[static_cast<std::size_t>(t)] = mid;
        if (!book.two_sided()) ++rec.carried_steps;
        if (cfg.record.spreads) rec.spreads[static_cast<std::size_t>(t)] = book.last_spread();
        if (cfg.record.fundamental) {
            rec.fundamental[static_cast<std::size_t>(t)] = fs.value;
            rec.reflexive[static_cast<std::size_t>(t)] = fs.reflexive;
        }
        if (cfg.record.trades) rec.trades.insert(rec.trades.end(), step_trades.begin(), step_trades.end());
        for (const auto& tr : step_trades) {
            ++rec.trade_count;
            rec.traded_volume += tr.quantity;
        }

        if (mid > prev.mid) last_move = 1;
        else if (mid < prev.mid) last_move = -1;
        mid_before_prev = prev.mid;
        prev.mid = mid;
        if (book.two_sided()) {
            prev.bid = *book.best_bid();
            prev.ask = *book.best_ask();
        }
    }

    if (exec) rec.execution = exec->record();
    return rec;
}

}  // namespace lobsim
