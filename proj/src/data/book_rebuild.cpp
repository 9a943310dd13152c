#include "lobsim/data/book_rebuild.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "lobsim/data/csv.hpp"

namespace lobsim {

namespace {

class AggregateBook {
public:
    void add(Side side, Price price, Qty qty) {
        if (side == Side::Buy) {
            bids_[price] += qty;
        } else {
            asks_[price] += qty;
        }
    }
    void remove(Side side, Price price, Qty qty) {
        auto drop = [&](auto& book) {
            auto it = book.find(price);
            if (it == book.end()) return;
            it->second -= qty;
            if (it->second <= 0) book.erase(it);
        };
        if (side == Side::Buy) {
            drop(bids_);
        } else {
            drop(asks_);
        }
    }
    std::optional<Price> best_bid() const { return bids_.empty() ? std::nullopt : std::optional(bids_.begin()->first); }
    std::optional<Price> best_ask() const { return asks_.empty() ? std::nullopt : std::optional(asks_.begin()->first); }

    L2Snapshot snapshot(double last_mid, Price last_spread, bool has_mid) const {
        L2Snapshot s;
        for (auto it = bids_.begin(); it != bids_.end() && s.bid_levels < kL2Depth; ++it)
            s.bids[s.bid_levels++] = {it->first, it->second};
        for (auto it = asks_.begin(); it != asks_.end() && s.ask_levels < kL2Depth; ++it)
            s.asks[s.ask_levels++] = {it->first, it->second};
        s.best_bid = best_bid();
        s.best_ask = best_ask();
        if (s.best_bid && s.best_ask) {
            s.mid = 0.5 * static_cast<double>(*s.best_bid + *s.best_ask);
            s.spread = *s.best_ask - *s.best_bid;
            s.has_mid = true;
        } else {
            s.mid = last_mid;
            s.spread = last_spread;
            s.carried = true;
            s.has_mid = has_mid;
        }
        return s;
    }

private:
    std::map<Price, Qty, std::greater<>> bids_;
    std::map<Price, Qty> asks_;
};

int minute_of(std::int64_t ts_ns) { return static_cast<int>(ts_ns / SessionCalendar::kNsPerMinute % 1440); }

}  // namespace

RebuildResult rebuild_book(std::span<const TickOperation> ops, std::span<const TradeRecord> trades, int step_ms) {
    const std::int64_t step_ns = std::int64_t{step_ms} * SessionCalendar::kNsPerMs;
    RebuildResult out;
    AggregateBook book;
    struct Live {
        Side side;
        Price price;
        Qty qty;
        std::size_t record;
    };
    std::unordered_map<OrderId, Live> live;

    double mid = 0.0;
    Price spread = 0;
    bool has_mid = false;
    int last_move = 0;

    auto refresh = [&] {
        auto bb = book.best_bid();
        auto ba = book.best_ask();
        if (bb && ba) {
            double m = 0.5 * static_cast<double>(*bb + *ba);
            if (has_mid && m != mid) last_move = m > mid ? 1 : -1;
            mid = m;
            spread = *ba - *bb;
            has_mid = true;
        }
    };

    std::size_t oi = 0, ti = 0;
    while (oi < ops.size() || ti < trades.size()) {
        std::int64_t ts = std::numeric_limits<std::int64_t>::max();
        if (oi < ops.size()) ts = ops[oi].timestamp_ns;
        if (ti < trades.size()) ts = std::min(ts, trades[ti].timestamp_ns);

        // Trades at this timestamp are classified against the prevailing mid.
        if (ti < trades.size() && trades[ti].timestamp_ns == ts) {
            Qty vol = 0;
            double notional = 0.0;
            for (; ti < trades.size() && trades[ti].timestamp_ns == ts; ++ti) {
                vol += trades[ti].quantity;
                notional += static_cast<double>(trades[ti].price) * static_cast<double>(trades[ti].quantity);
            }
            double vwap = notional / static_cast<double>(vol);
            int sign = has_mid ? classify_trade_sign(vwap, mid, last_move) : 1;
            out.market_orders.push_back(
                {ts, sign > 0 ? Side::Buy : Side::Sell, vol, has_mid ? spread : 0, minute_of(ts)});
            out.traded_volume += vol;
        }

        bool touched = false;
        for (; oi < ops.size() && ops[oi].timestamp_ns == ts; ++oi) {
            const TickOperation& op = ops[oi];
            touched = true;
            auto it = live.find(op.order_id);
            switch (op.action) {
                case TickAction::New: {
                    if (it != live.end()) {
                        out.inconsistent_ids.push_back(op.order_id);
                        break;
                    }
                    auto bb = book.best_bid();
                    auto ba = book.best_ask();
                    HistoricalLimitOrder h;
                    h.submit_time_ns = ts;
                    h.order_id = op.order_id;
                    h.side = op.side;
                    h.price = op.price;
                    h.volume = op.quantity;
                    h.minute_of_day = minute_of(ts);
                    if (bb && ba) h.spread_at_submit = *ba - *bb;
                    if (op.side == Side::Buy) {
                        if (ba) h.depth = *ba - op.price; else h.no_reference = true;
                    } else {
                        if (bb) h.depth = op.price - *bb; else h.no_reference = true;
                    }
                    live.emplace(op.order_id, Live{op.side, op.price, op.quantity, out.limit_orders.size()});
                    out.limit_orders.push_back(h);
                    book.add(op.side, op.price, op.quantity);
                    break;
                }
                case TickAction::Amend: {
                    if (it == live.end()) {
                        out.inconsistent_ids.push_back(op.order_id);
                        break;
                    }
                    book.remove(it->second.side, it->second.price, it->second.qty);
                    it->second.price = op.price;
                    it->second.qty = op.quantity;
                    book.add(it->second.side, op.price, op.quantity);
                    break;
                }
                case TickAction::Cancel: {
                    if (it == live.end()) {
                        out.inconsistent_ids.push_back(op.order_id);
                        break;
                    }
                    book.remove(it->second.side, it->second.price, it->second.qty);
                    auto& h = out.limit_orders[it->second.record];
                    h.duration_steps = static_cast<Step>(std::llround(static_cast<double>(ts - h.submit_time_ns) /
                                                                      static_cast<double>(step_ns)));
                    live.erase(it);
                    break;
                }
            }
        }
        if (touched) {
            refresh();
            L2Snapshot snap = book.snapshot(mid, spread, has_mid);
            out.l2.push_back({ts, snap});
        }
    }

    const std::int64_t end_ts = out.l2.empty() ? 0 : out.l2.back().ts_ns;
    for (const auto& [id, l] : live) {
        auto& h = out.limit_orders[l.record];
        h.censored = true;
        h.duration_steps = std::max<Step>(1, (end_ts - h.submit_time_ns) / step_ns);
    }
    std::sort(out.inconsistent_ids.begin(), out.inconsistent_ids.end());
    out.inconsistent_ids.erase(std::unique(out.inconsistent_ids.begin(), out.inconsistent_ids.end()),
                               out.inconsistent_ids.end());
    return out;
}

namespace {

std::vector<std::string> l2_header() {
    std::vector<std::string> h{"ts_ns"};
    for (const char* group : {"bid_px", "bid_qty", "ask_px", "ask_qty"})
        for (int i = 1; i <= kL2Depth; ++i) h.push_back(fmt::format("{}_{}", group, i));
    return h;
}

}  // namespace

void write_l2_csv(const std::string& path, std::span<const L2Row> rows) {
    auto out = open_output(path);
    out << fmt::format("{}\n", fmt::join(l2_header(), ","));
    std::string line;
    for (const auto& r : rows) {
        const auto& s = r.snapshot;
        line = std::to_string(r.ts_ns);
        for (int i = 0; i < kL2Depth; ++i) line += fmt::format(",{}", i < s.bid_levels ? s.bids[i].price : 0);
        for (int i = 0; i < kL2Depth; ++i) line += fmt::format(",{}", i < s.bid_levels ? s.bids[i].volume : 0);
        for (int i = 0; i < kL2Depth; ++i) line += fmt::format(",{}", i < s.ask_levels ? s.asks[i].price : 0);
        for (int i = 0; i < kL2Depth; ++i) line += fmt::format(",{}", i < s.ask_levels ? s.asks[i].volume : 0);
        out << line << '\n';
    }
}

std::vector<L2Row> read_l2_csv(const std::string& path) {
    CsvReader reader(path, l2_header());
    std::vector<L2Row> rows;
    double mid = 0.0;
    Price spread = 0;
    bool has_mid = false;
    while (auto f = reader.next()) {
        if (f->size() != 1 + 4 * kL2Depth) throw IoError(fmt::format("{}:{}: wrong field count", path, reader.line()));
        L2Row r;
        r.ts_ns = parse_int((*f)[0], reader);
        auto& s = r.snapshot;
        for (int i = 0; i < kL2Depth; ++i) {
            Price bp = parse_int((*f)[1 + i], reader);
            Qty bq = parse_int((*f)[1 + kL2Depth + i], reader);
            Price ap = parse_int((*f)[1 + 2 * kL2Depth + i], reader);
            Qty aq = parse_int((*f)[1 + 3 * kL2Depth + i], reader);
            if (bq > 0) s.bids[s.bid_levels++] = {bp, bq};
            if (aq > 0) s.asks[s.ask_levels++] = {ap, aq};
        }
        if (s.bid_levels > 0) s.best_bid = s.bids[0].price;
        if (s.ask_levels > 0) s.best_ask = s.asks[0].price;
        if (s.best_bid && s.best_ask) {
            mid = 0.5 * static_cast<double>(*s.best_bid + *s.best_ask);
            spread = *s.best_ask - *s.best_bid;
            has_mid = true;
            s.mid = mid;
            s.spread = spread;
            s.has_mid = true;
        } else {
            s.mid = mid;
            s.spread = spread;
            s.carried = true;
            s.has_mid = has_mid;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_limit_orders_csv(const std::string& path, std::span<const HistoricalLimitOrder> orders) {
    auto out = open_output(path);
    out << "submit_time_ns,order_id,side,price,depth,volume,duration_steps,spread_at_submit,minute_of_day,censored,"
           "no_reference\n";
    for (const auto& o : orders) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", o.submit_time_ns, o.order_id, to_string(o.side),
                           o.price, o.depth, o.volume, o.duration_steps, o.spread_at_submit, o.minute_of_day,
                           o.censored ? 1 : 0, o.no_reference ? 1 : 0);
    }
}

std::vector<HistoricalLimitOrder> read_limit_orders_csv(const std::string& path) {
    CsvReader reader(path, {"submit_time_ns", "order_id", "side", "price", "depth", "volume", "duration_steps",
                            "spread_at_submit", "minute_of_day", "censored", "no_reference"});
    std::vector<HistoricalLimitOrder> out;
    while (auto f = reader.next()) {
        if (f->size() != 11) throw IoError(fmt::format("{}:{}: wrong field count", path, reader.line()));
        HistoricalLimitOrder o;
        o.submit_time_ns = parse_int((*f)[0], reader);
        o.order_id = parse_int((*f)[1], reader);
        o.side = parse_side((*f)[2]);
        o.price = parse_int((*f)[3], reader);
        o.depth = parse_int((*f)[4], reader);
        o.volume = parse_int((*f)[5], reader);
        o.duration_steps = parse_int((*f)[6], reader);
        o.spread_at_submit = parse_int((*f)[7], reader);
        o.minute_of_day = static_cast<int>(parse_int((*f)[8], reader));
        o.censored = parse_int((*f)[9], reader) != 0;
        o.no_reference = parse_int((*f)[10], reader) != 0;
        out.push_back(o);
    }
    return out;
}

void write_market_orders_csv(const std::string& path, std::span<const HistoricalMarketOrder> orders) {
    auto out = open_output(path);
    out << "time_ns,side,volume,spread_at_submit,minute_of_day\n";
    for (const auto& o : orders) {
        out << fmt::format("{},{},{},{},{}\n", o.time_ns, to_string(o.side), o.volume, o.spread_at_submit,
                           o.minute_of_day);
    }
}

std::vector<HistoricalMarketOrder> read_market_orders_csv(const std::string& path) {
    CsvReader reader(path, {"time_ns", "side", "volume", "spread_at_submit", "minute_of_day"});
    std::vector<HistoricalMarketOrder> out;
    while (auto f = reader.next()) {
        if (f->size() != 5) throw IoError(fmt::format("{}:{}: wrong field count", path, reader.line()));
        HistoricalMarketOrder o;
        o.time_ns = parse_int((*f)[0], reader);
        o.side = parse_side((*f)[1]);
        o.volume = parse_int((*f)[2], reader);
        o.spread_at_submit = parse_int((*f)[3], reader);
        o.minute_of_day = static_cast<int>(parse_int((*f)[4], reader));
        out.push_back(o);
    }
    return out;
}

StepSeries resample_to_steps(std::span<const L2Row> rows, const SessionCalendar& calendar) {
    StepSeries out;
    const Step n = calendar.steps_per_day();
    out.mids.resize(static_cast<std::size_t>(n));
    out.spreads.resize(static_cast<std::size_t>(n));
    if (rows.empty()) throw DomainError("no L2 snapshots to resample");
    // Skip leading one-sided snapshots so early steps take the first valid quote.
    std::size_t first_valid = 0;
    while (first_valid < rows.size() && !rows[first_valid].snapshot.has_mid) ++first_valid;
    if (first_valid == rows.size()) throw DomainError("book never two-sided");
    std::size_t r = first_valid;
    const L2Snapshot* cur = &rows[first_valid].snapshot;
    for (Step s = 0; s < n; ++s) {
        const std::int64_t end = calendar.time_of_day_ns(s) + calendar.step_ns();
        while (r < rows.size() && rows[r].ts_ns < end) {
            if (rows[r].snapshot.has_mid) cur = &rows[r].snapshot;
            ++r;
        }
        out.mids[static_cast<std::size_t>(s)] = cur->mid;
        out.spreads[static_cast<std::size_t>(s)] = cur->spread;
    }
    return out;
}

const L2Snapshot& opening_snapshot(std::span<const L2Row> rows) {
    for (const auto& r : rows) {
        if (r.snapshot.best_bid && r.snapshot.best_ask) return r.snapshot;
    }
    throw DomainError("book never two-sided; no opening snapshot");
}

}  // namespace lobsim
