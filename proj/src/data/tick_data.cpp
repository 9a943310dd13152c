#include "lobsim/data/tick_data.hpp"

#include <unordered_map>

#include <fmt/format.h>

#include "lobsim/data/csv.hpp"

namespace lobsim {

namespace {

constexpr std::size_t kMaxMessages = 20;

std::optional<TickAction> parse_action(std::string_view s) noexcept {
    if (s == "New" || s == "NEW" || s == "new") return TickAction::New;
    if (s == "Amend" || s == "AMEND" || s == "amend") return TickAction::Amend;
    if (s == "Cancel" || s == "CANCEL" || s == "cancel") return TickAction::Cancel;
    return std::nullopt;
}

std::string_view action_name(TickAction a) noexcept {
    switch (a) {
        case TickAction::New: return "New";
        case TickAction::Amend: return "Amend";
        case TickAction::Cancel: return "Cancel";
    }
    return "?";
}

std::optional<Side> try_side(std::string_view s) noexcept {
    if (s == "Buy" || s == "B" || s == "buy" || s == "BUY") return Side::Buy;
    if (s == "Sell" || s == "S" || s == "sell" || s == "SELL") return Side::Sell;
    return std::nullopt;
}

void skip(ParseReport& report, const CsvReader& reader, std::string_view why) {
    ++report.rows_skipped;
    if (report.messages.size() < kMaxMessages) {
        report.messages.push_back(fmt::format("{}:{}: {}", reader.path(), reader.line(), why));
    }
}

}  // namespace

Parsed<TickOperation> parse_tick_file(const std::string& path) {
    CsvReader reader(path, {"timestamp_ns", "order_id", "action", "side", "price", "qty"});
    Parsed<TickOperation> out;
    std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
    while (auto row = reader.next()) {
        ++out.report.rows_read;
        if (row->size() != 6) {
            skip(out.report, reader, "wrong field count");
            continue;
        }
        auto ts = try_parse_int((*row)[0]);
        auto id = try_parse_int((*row)[1]);
        auto action = parse_action((*row)[2]);
        auto side = try_side((*row)[3]);
        auto price = try_parse_int((*row)[4]);
        auto qty = try_parse_int((*row)[5]);
        if (!ts || !id || !action || !side || !price || !qty) {
            skip(out.report, reader, "unparseable field");
            continue;
        }
        if (*qty < 0 || (*action != TickAction::Cancel && *qty == 0)) {
            skip(out.report, reader, "non-positive quantity");
            continue;
        }
        if (*action != TickAction::Cancel && *price <= 0) {
            skip(out.report, reader, "non-positive price");
            continue;
        }
        if (*ts < last_ts) {
            skip(out.report, reader, "timestamp goes backwards");
            continue;
        }
        last_ts = *ts;
        out.rows.push_back({*ts, *action, *id, *side, *price, *qty});
    }
    return out;
}

Parsed<TradeRecord> parse_trade_file(const std::string& path) {
    CsvReader reader(path, {"timestamp_ns", "price", "qty"});
    Parsed<TradeRecord> out;
    std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
    while (auto row = reader.next()) {
        ++out.report.rows_read;
        if (row->size() != 3) {
            skip(out.report, reader, "wrong field count");
            continue;
        }
        auto ts = try_parse_int((*row)[0]);
        auto price = try_parse_int((*row)[1]);
        auto qty = try_parse_int((*row)[2]);
        if (!ts || !price || !qty) {
            skip(out.report, reader, "unparseable field");
            continue;
        }
        if (*qty <= 0 || *price <= 0) {
            skip(out.report, reader, "non-positive quantity or price");
            continue;
        }
        if (*ts < last_ts) {
            skip(out.report, reader, "timestamp goes backwards");
            continue;
        }
        last_ts = *ts;
        out.rows.push_back({*ts, *price, *qty});
    }
    return out;
}

void write_tick_file(const std::string& path, std::span<const TickOperation> ops) {
    auto out = open_output(path);
    out << "timestamp_ns,order_id,action,side,price,qty\n";
    for (const auto& op : ops) {
        out << fmt::format("{},{},{},{},{},{}\n", op.timestamp_ns, op.order_id, action_name(op.action),
                           to_string(op.side), op.price, op.quantity);
    }
}

void write_trade_file(const std::string& path, std::span<const TradeRecord> trades) {
    auto out = open_output(path);
    out << "timestamp_ns,price,qty\n";
    for (const auto& t : trades) out << fmt::format("{},{},{}\n", t.timestamp_ns, t.price, t.quantity);
}

TickDay tick_day_from_events(std::span<const EngineEvent> events, const SessionCalendar& calendar) {
    constexpr std::int64_t kNsPerDay = 86'400'000'000'000;
    struct Live {
        Side side;
        Price price;
        Qty remaining;
    };
    std::unordered_map<OrderId, Live> live;
    TickDay day;
    auto stamp = [&](Step s) { return calendar.time_of_day_ns(s) + calendar.day(s) * kNsPerDay; };
    for (const auto& e : events) {
        const std::int64_t ts = stamp(e.step);
        switch (e.type) {
            case EventType::Queue: {
                auto [it, fresh] = live.try_emplace(e.order_id, Live{e.side, e.price, e.qty});
                if (fresh) {
                    day.ops.push_back({ts, TickAction::New, e.order_id, e.side, e.price, e.qty});
                } else {
                    // Residual of an amended order that re-entered the book.
                    it->second = Live{e.side, e.price, e.qty};
                    day.ops.push_back({ts, TickAction::Amend, e.order_id, e.side, e.price, e.qty});
                }
                break;
            }
            case EventType::Trade: {
                day.trades.push_back({ts, e.price, e.qty});
                auto it = live.find(e.order_id);
                if (it == live.end()) break;
                it->second.remaining -= e.qty;
                if (it->second.remaining <= 0) {
                    day.ops.push_back({ts, TickAction::Cancel, e.order_id, it->second.side, it->second.price, 0});
                    live.erase(it);
                } else {
                    day.ops.push_back({ts, TickAction::Amend, e.order_id, it->second.side, it->second.price,
                                       it->second.remaining});
                }
                break;
            }
            case EventType::Cancel:
            case EventType::Expire: {
                auto it = live.find(e.order_id);
                if (it == live.end()) break;
                day.ops.push_back({ts, TickAction::Cancel, e.order_id, it->second.side, it->second.price,
                                   it->second.remaining});
                live.erase(it);
                break;
            }
            case EventType::Amend: {
                auto it = live.find(e.order_id);
                if (it == live.end()) break;
                bool keeps_priority = e.price == it->second.price && e.qty <= it->second.remaining;
                if (keeps_priority) {
                    it->second.remaining = e.qty;
                    day.ops.push_back({ts, TickAction::Amend, e.order_id, e.side, e.price, e.qty});
                } else {
                    // Re-entry: the following Queue event (if any) re-creates it.
                    day.ops.push_back({ts, TickAction::Cancel, e.order_id, it->second.side, it->second.price,
                                       it->second.remaining});
                    live.erase(it);
                }
                break;
            }
            default:
                break;
        }
    }
    return day;
}

}  // namespace lobsim
