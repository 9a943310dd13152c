#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lobsim/core/session.hpp"
#include "lobsim/core/types.hpp"
#include "lobsim/lob/order_book.hpp"

namespace lobsim {

enum class TickAction : std::uint8_t { New, Amend, Cancel };

/// One order-level book operation. Fills of resting orders appear as Amend
/// (partial) or Cancel (complete) on the resting order.
struct TickOperation {
    std::int64_t timestamp_ns = 0;  // since midnight
    TickAction action = TickAction::New;
    OrderId order_id = 0;
    Side side = Side::Buy;
    Price price = 0;
    Qty quantity = 0;

    bool operator==(const TickOperation&) const = default;
};

struct TradeRecord {
    std::int64_t timestamp_ns = 0;
    Price price = 0;
    Qty quantity = 0;

    bool operator==(const TradeRecord&) const = default;
};

struct ParseReport {
    std::size_t rows_read = 0;
    std::size_t rows_skipped = 0;
    std::vector<std::string> messages;  // first few per-row failures
};

template <class T>
struct Parsed {
    std::vector<T> rows;
    ParseReport report;
};

/// `timestamp_ns,order_id,action,side,price,qty`
Parsed<TickOperation> parse_tick_file(const std::string& path);
/// `timestamp_ns,price,qty`
Parsed<TradeRecord> parse_trade_file(const std::string& path);

void write_tick_file(const std::string& path, std::span<const TickOperation> ops);
void write_trade_file(const std::string& path, std::span<const TradeRecord> trades);

struct TickDay {
    std::vector<TickOperation> ops;
    std::vector<TradeRecord> trades;
};

/// Converts an engine event log into the order-level tick schema, the form
/// exchange feeds publish. Days after the first are offset by 24h.
TickDay tick_day_from_events(std::span<const EngineEvent> events, const SessionCalendar& calendar);

}  // namespace lobsim
